#include "drclab/filterbank.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace drclab {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

void validate(const FilterbankSpec& spec) {
  if (spec.num_bands < 1) throw std::invalid_argument("need at least one band");
  if (spec.sample_rate <= 0)
    throw std::invalid_argument("sample rate must be positive");
  if (spec.fir_length < 3 || spec.fir_length % 2 == 0)
    throw std::invalid_argument("fir_length must be odd and >= 3, got " +
                                std::to_string(spec.fir_length));
  if (!(spec.f_low >= 0.0) || !(spec.f_low < spec.f_high) ||
      !(spec.f_high <= 0.5 * spec.sample_rate))
    throw std::invalid_argument(
        "band edges must satisfy 0 <= f_low < f_high <= sample_rate/2");
}

namespace {

Eigen::ArrayXd edges_hz(const FilterbankSpec& spec) {
  double mel_low = hz_to_mel(spec.f_low);
  double mel_high = hz_to_mel(spec.f_high);
  Eigen::ArrayXd edges(spec.num_bands + 1);
  for (int i = 0; i <= spec.num_bands; ++i) {
    double frac = static_cast<double>(i) / spec.num_bands;
    edges[i] = mel_to_hz(mel_low + frac * (mel_high - mel_low));
  }
  // Pin the outer edges so the summed bank covers [f_low, f_high] exactly.
  edges[0] = spec.f_low;
  edges[spec.num_bands] = spec.f_high;
  return edges;
}

}  // namespace

std::vector<std::pair<double, double>> mel_band_edges(
    const FilterbankSpec& spec) {
  validate(spec);
  Eigen::ArrayXd edges = edges_hz(spec);
  std::vector<std::pair<double, double>> bands;
  bands.reserve(static_cast<std::size_t>(spec.num_bands));
  for (int b = 0; b < spec.num_bands; ++b)
    bands.emplace_back(edges[b], edges[b + 1]);
  return bands;
}

Eigen::ArrayXXd filterbank_taps(const FilterbankSpec& spec) {
  validate(spec);
  Eigen::ArrayXd edges = edges_hz(spec);
  const int length = spec.fir_length;
  const int mid = (length - 1) / 2;
  Eigen::ArrayXXd taps(length, spec.num_bands);

  // Ideal bandpass truncated to `length` taps under a Hamming window. Both
  // edges of adjacent bands use the same cutoff term, so summing the columns
  // telescopes to the full-band filter and reconstruction error reduces to
  // the window rolloff of that single filter.
  for (int b = 0; b < spec.num_bands; ++b) {
    double w_low = 2.0 * std::numbers::pi * edges[b] / spec.sample_rate;
    double w_high = 2.0 * std::numbers::pi * edges[b + 1] / spec.sample_rate;
    for (int n = 0; n < length; ++n) {
      int k = n - mid;
      double ideal;
      if (k == 0)
        ideal = (w_high - w_low) / std::numbers::pi;
      else
        ideal = (std::sin(w_high * k) - std::sin(w_low * k)) /
                (std::numbers::pi * k);
      double window =
          0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
      taps(n, b) = ideal * window;
    }
  }
  return taps;
}

BandedSignal analyze(const SignalBuffer& x, const FilterbankSpec& spec) {
  validate(x);
  validate(spec);
  if (x.sample_rate != spec.sample_rate)
    throw std::invalid_argument(
        "signal rate " + std::to_string(x.sample_rate) +
        " does not match filterbank rate " + std::to_string(spec.sample_rate));

  const Eigen::Index n = x.samples.size();
  const int length = spec.fir_length;
  const int mid = (length - 1) / 2;
  Eigen::ArrayXXd taps = filterbank_taps(spec);

  // Zero-padded input shifted by the group delay: with symmetric taps,
  // out[t] = sum_k taps[k] * padded[t + k] realigns band b with the input.
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n + 2 * mid);
  padded.segment(mid, n) = x.samples.matrix();

  BandedSignal out;
  out.spec = spec;
  out.channels.resize(n, spec.num_bands);
  for (int b = 0; b < spec.num_bands; ++b) {
    Eigen::VectorXd h = taps.col(b).matrix();
    for (Eigen::Index t = 0; t < n; ++t)
      out.channels(t, b) = h.dot(padded.segment(t, length));
  }
  return out;
}

SignalBuffer synthesize(const BandedSignal& bands) {
  if (bands.channels.rows() == 0)
    throw std::invalid_argument("empty banded signal");
  return {bands.channels.rowwise().sum(), bands.spec.sample_rate};
}

}  // namespace drclab
