#include "drclab/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace drclab {

DrcConfig uniform_config(const FilterbankSpec& fb, const DetectorParams& det,
                         const CompressorSpec& spec) {
  DrcConfig cfg;
  cfg.filterbank = fb;
  cfg.detector = det;
  cfg.compressors.assign(static_cast<std::size_t>(fb.num_bands), spec);
  return cfg;
}

void validate(const DrcConfig& cfg) {
  validate(cfg.filterbank);
  validate(cfg.detector);
  if (cfg.compressors.size() != static_cast<std::size_t>(cfg.filterbank.num_bands))
    throw std::invalid_argument(
        "config has " + std::to_string(cfg.compressors.size()) +
        " compressors for " + std::to_string(cfg.filterbank.num_bands) +
        " bands");
}

namespace {

void check_banded_components(const std::vector<BandedSignal>& components,
                             const DrcConfig& cfg) {
  if (components.empty())
    throw std::invalid_argument("need at least one component");
  for (const auto& c : components) {
    if (c.channels.rows() != components[0].channels.rows())
      throw std::invalid_argument("component length mismatch");
    if (c.num_bands() != cfg.filterbank.num_bands ||
        c.spec.sample_rate != cfg.filterbank.sample_rate)
      throw std::invalid_argument("component was split with a different bank");
  }
}

Eigen::ArrayXXd gain_track_from_envelope(const Eigen::ArrayXXd& env,
                                         const DrcConfig& cfg) {
  Eigen::ArrayXXd g(env.rows(), env.cols());
  for (Eigen::Index b = 0; b < env.cols(); ++b) {
    const CompressorSpec& spec = cfg.compressors[static_cast<std::size_t>(b)];
    for (Eigen::Index t = 0; t < env.rows(); ++t)
      g(t, b) = gain(spec, env(t, b));
  }
  return g;
}

// Envelope of the summed interferer components (indices 1..N-1). Empty track
// for single-component runs.
EnvelopeTrack interferer_envelope(const std::vector<Eigen::ArrayXXd>& channels,
                                  const FilterbankSpec& fb,
                                  const DetectorParams& det) {
  if (channels.size() < 2) return EnvelopeTrack{{}, det.floor_power};
  BandedSignal sum;
  sum.spec = fb;
  sum.channels = channels[1];
  for (std::size_t i = 2; i < channels.size(); ++i) sum.channels += channels[i];
  return detect(sum, det);
}

MixtureRun assemble_run(const std::vector<BandedSignal>& components,
                        const std::vector<Eigen::ArrayXXd>& gain_tracks,
                        const DrcConfig& cfg) {
  const std::size_t n = components.size();
  const FilterbankSpec& fb = cfg.filterbank;
  const bool shared_gain = gain_tracks.size() == 1;

  MixtureRun run;
  run.gain_tracks = gain_tracks;

  // Output component bands; the mixture output is their ordered sum, which
  // keeps the decomposition exact to roundoff.
  std::vector<Eigen::ArrayXXd> out_channels(n);
  for (std::size_t i = 0; i < n; ++i)
    out_channels[i] =
        components[i].channels * (shared_gain ? gain_tracks[0] : gain_tracks[i]);

  Eigen::ArrayXXd y = out_channels[0];
  for (std::size_t i = 1; i < n; ++i) y += out_channels[i];
  run.mixture_output = synthesize({y, fb});

  run.outputs.reserve(n);
  run.env_in.reserve(n);
  run.env_out.reserve(n);
  std::vector<Eigen::ArrayXXd> in_channels(n);
  for (std::size_t i = 0; i < n; ++i) {
    BandedSignal banded_out{out_channels[i], fb};
    run.outputs.push_back(synthesize(banded_out));
    run.env_in.push_back(detect(components[i], cfg.detector));
    run.env_out.push_back(detect(banded_out, cfg.detector));
    in_channels[i] = components[i].channels;
  }
  run.interferer_env_in = interferer_envelope(in_channels, fb, cfg.detector);
  run.interferer_env_out = interferer_envelope(out_channels, fb, cfg.detector);
  return run;
}

std::vector<BandedSignal> analyze_components(
    const std::vector<SignalBuffer>& components, const DrcConfig& cfg) {
  if (components.empty())
    throw std::invalid_argument("need at least one component");
  for (const auto& c : components) {
    if (c.sample_rate != components[0].sample_rate)
      throw std::invalid_argument("component sample-rate mismatch");
    if (c.samples.size() != components[0].samples.size())
      throw std::invalid_argument("component length mismatch");
  }
  std::vector<BandedSignal> banded;
  banded.reserve(components.size());
  for (const auto& c : components) banded.push_back(analyze(c, cfg.filterbank));
  return banded;
}

}  // namespace

MixtureRun process_mixture_banded(const std::vector<BandedSignal>& components,
                                  const DrcConfig& cfg) {
  validate(cfg);
  check_banded_components(components, cfg);

  BandedSignal mixture;
  mixture.spec = cfg.filterbank;
  mixture.channels = components[0].channels;
  for (std::size_t i = 1; i < components.size(); ++i)
    mixture.channels += components[i].channels;

  EnvelopeTrack mixture_env = detect(mixture, cfg.detector);
  std::vector<Eigen::ArrayXXd> gain_tracks{
      gain_track_from_envelope(mixture_env.values, cfg)};

  MixtureRun run = assemble_run(components, gain_tracks, cfg);
  run.mixture_env = std::move(mixture_env);
  return run;
}

MixtureRun process_mixture(const std::vector<SignalBuffer>& components,
                           const DrcConfig& cfg) {
  validate(cfg);
  return process_mixture_banded(analyze_components(components, cfg), cfg);
}

MixtureRun process_independently_banded(
    const std::vector<BandedSignal>& components, const DrcConfig& cfg) {
  validate(cfg);
  check_banded_components(components, cfg);

  std::vector<Eigen::ArrayXXd> gain_tracks;
  gain_tracks.reserve(components.size());
  for (const auto& c : components) {
    EnvelopeTrack env = detect(c, cfg.detector);
    gain_tracks.push_back(gain_track_from_envelope(env.values, cfg));
  }

  BandedSignal mixture;
  mixture.spec = cfg.filterbank;
  mixture.channels = components[0].channels;
  for (std::size_t i = 1; i < components.size(); ++i)
    mixture.channels += components[i].channels;

  MixtureRun run = assemble_run(components, gain_tracks, cfg);
  run.mixture_env = detect(mixture, cfg.detector);
  return run;
}

MixtureRun process_independently(const std::vector<SignalBuffer>& components,
                                 const DrcConfig& cfg) {
  validate(cfg);
  return process_independently_banded(analyze_components(components, cfg), cfg);
}

}  // namespace drclab
