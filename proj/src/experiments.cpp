#include "drclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "drclab/csv.hpp"
#include "drclab/ecf.hpp"
#include "drclab/wav.hpp"

namespace drclab {

namespace {

// Scatter CSVs keep one sample every 16 ms at 16 kHz; summary statistics
// always use the full tracks.
constexpr Eigen::Index kScatterStride = 256;

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir + "/" + file;
}

Eigen::Index settle_samples(const ExperimentConfig& cfg, Eigen::Index length,
                            int sample_rate) {
  auto skip =
      static_cast<Eigen::Index>(std::llround(cfg.settle_s * sample_rate));
  if (skip < 0 || skip >= length - 1)
    throw std::invalid_argument("settle_s must be shorter than duration_s");
  return skip;
}

void drop_head(Eigen::ArrayXXd& a, Eigen::Index skip) {
  a = a.bottomRows(a.rows() - skip).eval();
}

// Removes the settling period from envelope and gain tracks; audio buffers
// keep their full length.
MixtureRun trim_run(MixtureRun run, Eigen::Index skip) {
  for (auto& g : run.gain_tracks) drop_head(g, skip);
  drop_head(run.mixture_env.values, skip);
  for (auto& e : run.env_in) drop_head(e.values, skip);
  for (auto& e : run.env_out) drop_head(e.values, skip);
  if (run.interferer_env_in.values.size() > 0)
    drop_head(run.interferer_env_in.values, skip);
  if (run.interferer_env_out.values.size() > 0)
    drop_head(run.interferer_env_out.values, skip);
  return run;
}

Eigen::ArrayXd band_db(const EnvelopeTrack& track, Eigen::Index band) {
  return 10.0 * track.values.col(band).log10();
}

BandedSignal scaled_bands(const BandedSignal& bands, double amplitude_factor) {
  return {bands.channels * amplitude_factor, bands.spec};
}

double level_scale(double target_level_db, double realized_level_db) {
  return db_to_amplitude(target_level_db - realized_level_db);
}

CompressorSpec with_ratio(const CompressorSpec& spec, double cr) {
  switch (spec.kind) {
    case CompressorKind::linear:
      return CompressorSpec::power_law(cr, spec.gain_db);
    case CompressorKind::power_law:
      return CompressorSpec::power_law(cr, spec.g0_db);
    case CompressorKind::knee:
      return CompressorSpec::knee(spec.g0_db, spec.knee_low_db, cr,
                                  spec.limit_db, spec.smooth_db);
    case CompressorKind::logarithmic:
      throw std::invalid_argument(
          "ratio sweeps need a ratio-parameterized compressor");
  }
  throw std::logic_error("unknown compressor kind");
}

DrcConfig ratio_variant(const DrcConfig& base, double cr) {
  DrcConfig cfg = base;
  for (auto& spec : cfg.compressors) spec = with_ratio(spec, cr);
  return cfg;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  Eigen::ArrayXd arr = Eigen::Map<Eigen::ArrayXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  return percentile(arr, 50.0);
}

void append_per_band_rows(CsvWriter& csv, const std::vector<PerBandStat*>& stats,
                          Eigen::Index bands) {
  for (Eigen::Index b = 0; b < bands; ++b) {
    std::vector<double> row{static_cast<double>(b)};
    for (const auto* s : stats) row.push_back(s->values[b]);
    csv.add_row(row);
  }
  std::vector<double> avg{-1.0};  // band -1 carries the cross-band average
  for (const auto* s : stats) avg.push_back(s->average);
  csv.add_row(avg);
}

}  // namespace

SignalBuffer realize_source(const SourceSpec& src, double duration_s,
                            int sample_rate) {
  auto length = static_cast<Eigen::Index>(
      std::llround(duration_s * sample_rate));
  if (length < 1) throw std::invalid_argument("duration too short");
  switch (src.kind) {
    case SourceSpec::Kind::white:
      return generate_white_noise(length, src.level_db, RngSeed{src.seed},
                                  sample_rate);
    case SourceSpec::Kind::speechlike:
      return generate_speechlike(length, src.level_db, RngSeed{src.seed},
                                 src.speech, sample_rate);
    case SourceSpec::Kind::wav: {
      SignalBuffer x = read_wav(src.path, sample_rate);
      if (x.samples.size() < length)
        throw std::runtime_error(src.path + ": file provides " +
                                 std::to_string(x.samples.size()) +
                                 " samples, need " + std::to_string(length));
      SignalBuffer cut{x.samples.head(length).eval(), x.sample_rate};
      cut.samples *= std::sqrt(db_to_power(src.level_db) / mean_power(cut));
      return cut;
    }
  }
  throw std::logic_error("unknown source kind");
}

Fig5Result run_fig5(const ExperimentConfig& cfg) {
  if (cfg.sources.size() != 2)
    throw std::invalid_argument("this experiment needs exactly two sources");
  validate(cfg.drc);
  const int rate = cfg.drc.filterbank.sample_rate;
  std::vector<SignalBuffer> sources{
      realize_source(cfg.sources[0], cfg.duration_s, rate),
      realize_source(cfg.sources[1], cfg.duration_s, rate)};
  MixtureRun run = process_mixture(sources, cfg.drc);
  run = trim_run(std::move(run),
                 settle_samples(cfg, run.mixture_env.length(), rate));
  MetricsReport metrics = compute_metrics(run);

  const int bands = cfg.drc.filterbank.num_bands;
  CsvWriter scatter(
      {"band", "env1_in_db", "env2_in_db", "env1_out_db", "env2_out_db"});
  for (int b = 0; b < bands; ++b) {
    // 0 dB on the scatter axes is the band's mean mixture input level.
    double offset = band_db(run.mixture_env, b).mean();
    Eigen::ArrayXd e1i = band_db(run.env_in[0], b) - offset;
    Eigen::ArrayXd e2i = band_db(run.env_in[1], b) - offset;
    Eigen::ArrayXd e1o = band_db(run.env_out[0], b) - offset;
    Eigen::ArrayXd e2o = band_db(run.env_out[1], b) - offset;
    for (Eigen::Index t = 0; t < e1i.size(); t += kScatterStride)
      scatter.add_row(
          {static_cast<double>(b), e1i[t], e2i[t], e1o[t], e2o[t]});
  }
  scatter.write(out_path(cfg, cfg.name + "_scatter.csv"));

  CsvWriter rho({"band", "rho_in", "rho_out"});
  append_per_band_rows(rho, {&metrics.rho_in, &metrics.rho_out}, bands);
  rho.write(out_path(cfg, cfg.name + "_rho.csv"));
  write_resolved_config(cfg);
  return {metrics.rho_in, metrics.rho_out};
}

Fig6Result run_fig6(const ExperimentConfig& cfg) {
  if (cfg.sources.size() != 2)
    throw std::invalid_argument("this experiment needs exactly two sources");
  if (cfg.snr_sweep_db.empty())
    throw std::invalid_argument("this experiment needs an SNR list");
  validate(cfg.drc);
  const int rate = cfg.drc.filterbank.sample_rate;
  const int bands = cfg.drc.filterbank.num_bands;
  SignalBuffer target = realize_source(cfg.sources[0], cfg.duration_s, rate);
  SignalBuffer noise = realize_source(cfg.sources[1], cfg.duration_s, rate);
  BandedSignal target_bands = analyze(target, cfg.drc.filterbank);
  BandedSignal noise_bands = analyze(noise, cfg.drc.filterbank);

  Fig6Result result;
  CsvWriter ecr_csv({"snr_db", "ecr"});
  for (double snr : cfg.snr_sweep_db) {
    // The interferer holds its configured level; the target moves.
    double target_level = cfg.sources[1].level_db + snr;
    double amp = level_scale(target_level, cfg.sources[0].level_db);
    MixtureRun run = process_mixture_banded(
        {scaled_bands(target_bands, amp), noise_bands}, cfg.drc);
    run = trim_run(std::move(run),
                   settle_samples(cfg, run.mixture_env.length(), rate));

    double ecr =
        effective_compression_ratio(run.env_in[0], run.env_out[0]).average;
    result.snr_db.push_back(snr);
    result.ecr.push_back(ecr);
    ecr_csv.add_row({snr, ecr});

    std::string tag = format_double(snr);
    CsvWriter measured({"band", "env_in_db", "env_out_db"});
    std::vector<double> residuals;
    CsvWriter theory({"band", "env_in_db", "ecf_out_db"});
    for (int b = 0; b < bands; ++b) {
      double v2 = run.env_in[1].values.col(b).mean();
      EcfContext ctx{cfg.drc.compressors[static_cast<std::size_t>(b)], b};
      Eigen::ArrayXd in_db = band_db(run.env_in[0], b);
      Eigen::ArrayXd out_db = band_db(run.env_out[0], b);
      for (Eigen::Index t = 0; t < in_db.size(); t += kScatterStride) {
        measured.add_row({static_cast<double>(b), in_db[t], out_db[t]});
        double predicted =
            10.0 * std::log10(ecf(ctx, db_to_power(in_db[t]), v2));
        residuals.push_back(std::abs(out_db[t] - predicted));
      }
      double lo = in_db.minCoeff(), hi = in_db.maxCoeff();
      const int curve_points = 101;
      for (int i = 0; i < curve_points; ++i) {
        double v1_db = lo + (hi - lo) * i / (curve_points - 1);
        double curve =
            10.0 * std::log10(ecf(ctx, db_to_power(v1_db), v2));
        theory.add_row({static_cast<double>(b), v1_db, curve});
      }
    }
    measured.write(out_path(cfg, cfg.name + "_measured_" + tag + ".csv"));
    theory.write(out_path(cfg, cfg.name + "_theory_" + tag + ".csv"));
    result.median_residual_db.push_back(median(std::move(residuals)));
  }
  ecr_csv.write(out_path(cfg, cfg.name + "_ecr.csv"));
  write_resolved_config(cfg);
  return result;
}

namespace {

// Band envelopes of one component, trimmed past the settling period, plus
// per-band time averages. Envelope tracks scale exactly with input power as
// long as they stay above the detector floor, so one detection per source
// serves the whole level sweep.
struct ComponentEnvelopes {
  std::vector<Eigen::ArrayXd> bands;
  std::vector<double> means;
};

ComponentEnvelopes component_envelopes(const SignalBuffer& x,
                                       const DrcConfig& drc,
                                       Eigen::Index skip) {
  EnvelopeTrack env = detect(analyze(x, drc.filterbank), drc.detector);
  Eigen::Index n = env.length() - skip;
  ComponentEnvelopes out;
  for (int b = 0; b < drc.filterbank.num_bands; ++b) {
    out.bands.push_back(env.values.col(b).tail(n).eval());
    out.means.push_back(out.bands.back().mean());
  }
  return out;
}

struct SnrPoint {
  double in_db = 0.0;
  double out_db = 0.0;
};

// Long-term SNR through the closed-form effective compression of the
// measured envelopes, aggregated across bands by envelope power. The
// interferer either keeps its full envelope track (scaled to the sweep
// level) or is collapsed to its per-band time average, the constant-envelope
// case.
SnrPoint effective_snr(const ComponentEnvelopes& target,
                       const ComponentEnvelopes& interferer,
                       double interferer_power_scale, bool constant_envelope,
                       const DrcConfig& drc) {
  double out_num = 0, out_den = 0, in_num = 0, in_den = 0;
  const auto bands = static_cast<std::size_t>(drc.filterbank.num_bands);
  for (std::size_t b = 0; b < bands; ++b) {
    EcfContext ctx{drc.compressors[b], static_cast<int>(b)};
    const Eigen::ArrayXd& v1 = target.bands[b];
    const auto n = static_cast<double>(v1.size());
    double acc_num = 0, acc_den = 0;
    if (constant_envelope) {
      double v2 = interferer_power_scale * interferer.means[b];
      for (Eigen::Index t = 0; t < v1.size(); ++t) {
        acc_num += ecf(ctx, v1[t], v2);
        acc_den += ecf(ctx, v2, v1[t]);
      }
    } else {
      const Eigen::ArrayXd& v2 = interferer.bands[b];
      for (Eigen::Index t = 0; t < v1.size(); ++t) {
        double v2t = interferer_power_scale * v2[t];
        acc_num += ecf(ctx, v1[t], v2t);
        acc_den += ecf(ctx, v2t, v1[t]);
      }
    }
    out_num += acc_num / n;
    out_den += acc_den / n;
    in_num += target.means[b];
    in_den += interferer_power_scale * interferer.means[b];
  }
  return {10.0 * std::log10(in_num / in_den),
          10.0 * std::log10(out_num / out_den)};
}

}  // namespace

Fig7Result run_fig7(const ExperimentConfig& cfg) {
  if (cfg.sources.size() != 2)
    throw std::invalid_argument("this experiment needs exactly two sources");
  if (cfg.snr_sweep_db.empty() || cfg.cr_list.empty())
    throw std::invalid_argument("this experiment needs SNR and ratio lists");
  validate(cfg.drc);
  const int rate = cfg.drc.filterbank.sample_rate;
  SignalBuffer target = realize_source(cfg.sources[0], cfg.duration_s, rate);
  SignalBuffer noise = realize_source(cfg.sources[1], cfg.duration_s, rate);
  Eigen::Index skip = settle_samples(cfg, target.samples.size(), rate);
  ComponentEnvelopes env_t = component_envelopes(target, cfg.drc, skip);
  ComponentEnvelopes env_n = component_envelopes(noise, cfg.drc, skip);

  const auto points = static_cast<Eigen::Index>(cfg.snr_sweep_db.size());
  const auto ratios = static_cast<Eigen::Index>(cfg.cr_list.size());
  Fig7Result result;
  result.cr_list = cfg.cr_list;
  result.snr_in_db.assign(static_cast<std::size_t>(points), 0.0);
  result.snr_out_db.resize(points, ratios);

  for (Eigen::Index c = 0; c < ratios; ++c) {
    double cr = cfg.cr_list[static_cast<std::size_t>(c)];
    DrcConfig drc = ratio_variant(cfg.drc, cr);
    CsvWriter csv({"snr_nominal_db", "snr_in_db", "snr_out_db"});
    for (Eigen::Index p = 0; p < points; ++p) {
      double snr = cfg.snr_sweep_db[static_cast<std::size_t>(p)];
      double noise_level = cfg.sources[0].level_db - snr;
      double scale = db_to_power(noise_level - cfg.sources[1].level_db);
      SnrPoint s = effective_snr(env_t, env_n, scale, true, drc);
      result.snr_in_db[static_cast<std::size_t>(p)] = s.in_db;
      result.snr_out_db(p, c) = s.out_db;
      csv.add_row({snr, s.in_db, s.out_db});
    }
    csv.write(out_path(cfg, cfg.name + "_cr" + format_double(cr) + ".csv"));
  }
  write_resolved_config(cfg);
  return result;
}

Fig8Result run_fig8(const ExperimentConfig& cfg) {
  if (cfg.sources.size() != 2)
    throw std::invalid_argument("this experiment needs exactly two sources");
  if (cfg.snr_sweep_db.empty())
    throw std::invalid_argument("this experiment needs an SNR list");
  validate(cfg.drc);
  const int rate = cfg.drc.filterbank.sample_rate;
  auto length = static_cast<Eigen::Index>(std::llround(cfg.duration_s * rate));
  SignalBuffer target = realize_source(cfg.sources[0], cfg.duration_s, rate);
  Eigen::Index skip = settle_samples(cfg, target.samples.size(), rate);
  ComponentEnvelopes env_t = component_envelopes(target, cfg.drc, skip);

  const SourceSpec& base = cfg.sources[1];
  SplitMix64 master(RngSeed{base.seed});

  // Interferer family: steady noise, one competing talker, and a premixed
  // many-talker babble whose residual modulation is much shallower.
  SignalBuffer white =
      generate_white_noise(length, base.level_db, RngSeed{base.seed}, rate);
  SignalBuffer talker = generate_speechlike(
      length, base.level_db, master.fork(1), cfg.sources[0].speech, rate);
  const int babble_talkers = 14;
  Eigen::ArrayXd babble_sum = Eigen::ArrayXd::Zero(length);
  for (int i = 0; i < babble_talkers; ++i) {
    SignalBuffer clip = generate_speechlike(
        length, 0.0, master.fork(10 + static_cast<std::uint64_t>(i)),
        cfg.sources[0].speech, rate);
    babble_sum += clip.samples;
  }
  SignalBuffer babble{babble_sum, rate};
  babble.samples *= std::sqrt(db_to_power(base.level_db) / mean_power(babble));

  struct Interferer {
    std::string name;
    ComponentEnvelopes env;
    bool constant_envelope;
  };
  std::vector<Interferer> interferers;
  interferers.push_back({"white", component_envelopes(white, cfg.drc, skip), true});
  interferers.push_back({"talker", component_envelopes(talker, cfg.drc, skip), false});
  interferers.push_back({"babble", component_envelopes(babble, cfg.drc, skip), false});

  const auto points = static_cast<Eigen::Index>(cfg.snr_sweep_db.size());
  Fig8Result result;
  result.snr_nominal_db = cfg.snr_sweep_db;
  result.delta_snr_db.resize(points,
                             static_cast<Eigen::Index>(interferers.size()));

  for (std::size_t k = 0; k < interferers.size(); ++k) {
    result.noise_types.push_back(interferers[k].name);
    CsvWriter csv(
        {"snr_nominal_db", "snr_in_db", "snr_out_db", "delta_snr_db"});
    for (Eigen::Index p = 0; p < points; ++p) {
      double snr = cfg.snr_sweep_db[static_cast<std::size_t>(p)];
      double level = cfg.sources[0].level_db - snr;
      double scale = db_to_power(level - base.level_db);
      SnrPoint s = effective_snr(env_t, interferers[k].env, scale,
                                 interferers[k].constant_envelope, cfg.drc);
      result.delta_snr_db(p, static_cast<Eigen::Index>(k)) = s.out_db - s.in_db;
      csv.add_row({snr, s.in_db, s.out_db, s.out_db - s.in_db});
    }
    csv.write(out_path(cfg, cfg.name + "_" + interferers[k].name + ".csv"));
  }
  write_resolved_config(cfg);
  return result;
}

TheorySuiteResult run_theory_suite(RngSeed seed, int instances,
                                   const std::string& output_dir) {
  SplitMix64 master(seed);
  TheorySuiteResult result;
  result.batches.push_back(run_lemma2_batch(master.fork(0), instances));
  result.batches.push_back(run_theorem1_batch(master.fork(1), instances));
  result.batches.push_back(run_theorem2_batch());
  result.batches.push_back(run_lemma3_batch());
  result.batches.push_back(run_theorem3_batch(master.fork(2), instances));
  result.all_hold = true;
  for (const auto& batch : result.batches)
    result.all_hold = result.all_hold && batch.all_hold();

  std::filesystem::create_directories(output_dir);
  std::string path = output_dir + "/theory_report.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write report");
  out << "[\n";
  for (std::size_t i = 0; i < result.batches.size(); ++i) {
    out << to_json(result.batches[i]);
    if (i + 1 < result.batches.size()) out << ",";
    out << "\n";
  }
  out << "]\n";
  return result;
}

ProcessResult run_process(const ExperimentConfig& cfg) {
  if (cfg.sources.empty())
    throw std::invalid_argument("processing needs at least one source");
  validate(cfg.drc);
  const int rate = cfg.drc.filterbank.sample_rate;
  std::vector<SignalBuffer> sources;
  sources.reserve(cfg.sources.size());
  for (const auto& src : cfg.sources)
    sources.push_back(realize_source(src, cfg.duration_s, rate));
  MixtureRun run = process_mixture(sources, cfg.drc);

  write_wav(out_path(cfg, "y.wav"), run.mixture_output);
  for (std::size_t i = 0; i < run.outputs.size(); ++i)
    write_wav(out_path(cfg, "r" + std::to_string(i) + ".wav"), run.outputs[i]);

  const int bands = cfg.drc.filterbank.num_bands;
  CsvWriter gains({"t", "band", "gain_db"});
  const Eigen::ArrayXXd& g = run.gain_tracks[0];
  for (int b = 0; b < bands; ++b)
    for (Eigen::Index t = 0; t < g.rows(); t += kScatterStride)
      gains.add_row({static_cast<double>(t), static_cast<double>(b),
                     20.0 * std::log10(g(t, b))});
  gains.write(out_path(cfg, "gains.csv"));

  CsvWriter envelopes({"t", "band", "component", "env_in_db", "env_out_db"});
  for (std::size_t i = 0; i < run.env_in.size(); ++i)
    for (int b = 0; b < bands; ++b)
      for (Eigen::Index t = 0; t < run.env_in[i].length(); t += kScatterStride)
        envelopes.add_row({static_cast<double>(t), static_cast<double>(b),
                           static_cast<double>(i),
                           10.0 * std::log10(run.env_in[i].values(t, b)),
                           10.0 * std::log10(run.env_out[i].values(t, b))});
  envelopes.write(out_path(cfg, "envelopes.csv"));

  ProcessResult result;
  Eigen::ArrayXd residual = run.mixture_output.samples;
  for (const auto& r : run.outputs) residual -= r.samples;
  result.decomposition_error = residual.abs().maxCoeff();

  if (cfg.sources.size() >= 2) {
    run = trim_run(std::move(run),
                   settle_samples(cfg, run.mixture_env.length(), rate));
    result.metrics = compute_metrics(run);
    CsvWriter metrics_csv({"band", "rho_in", "rho_out", "ecr", "snr_in_db",
                           "snr_out_db", "dr_in_db", "dr_out_db"});
    append_per_band_rows(
        metrics_csv,
        {&result.metrics.rho_in, &result.metrics.rho_out, &result.metrics.ecr,
         &result.metrics.snr_in_db, &result.metrics.snr_out_db,
         &result.metrics.dr_in_db, &result.metrics.dr_out_db},
        bands);
    metrics_csv.write(out_path(cfg, "metrics.csv"));
  }
  write_resolved_config(cfg);
  return result;
}

}  // namespace drclab
