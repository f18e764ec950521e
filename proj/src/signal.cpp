#include "drclab/signal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace drclab {

double mean_power(const SignalBuffer& x) { return x.samples.square().mean(); }

void validate(const SignalBuffer& x) {
  if (x.samples.size() < 1) throw std::invalid_argument("signal is empty");
  if (x.sample_rate <= 0)
    throw std::invalid_argument("sample rate must be positive, got " +
                                std::to_string(x.sample_rate));
  if (!x.samples.isFinite().all())
    throw std::invalid_argument("signal contains non-finite samples");
}

namespace {

Eigen::ArrayXd gaussian_array(Eigen::Index length, SplitMix64& rng) {
  Eigen::ArrayXd out(length);
  for (Eigen::Index i = 0; i < length; ++i) out[i] = rng.next_gaussian();
  return out;
}

// Scales x in place so its mean power is exactly 10^(level_db/10).
void normalize_power(Eigen::ArrayXd& x, double level_db) {
  double current = x.square().mean();
  if (current <= 0.0)
    throw std::runtime_error("degenerate generator output, zero power");
  x *= std::sqrt(db_to_power(level_db) / current);
}

// One-pole lowpass of unit-variance white Gaussian noise, rescaled back to
// unit variance. The filter is warmed up over several time constants before
// sample 0 so the output is stationary from the start.
Eigen::ArrayXd lowpass_gaussian(Eigen::Index length, double cutoff_hz,
                                int sample_rate, SplitMix64& rng) {
  double c = std::exp(-2.0 * std::numbers::pi * cutoff_hz / sample_rate);
  double state = 0.0;
  auto warmup = static_cast<Eigen::Index>(std::ceil(4.0 / (1.0 - c)));
  for (Eigen::Index i = 0; i < warmup; ++i)
    state = c * state + (1.0 - c) * rng.next_gaussian();
  Eigen::ArrayXd out(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    state = c * state + (1.0 - c) * rng.next_gaussian();
    out[i] = state;
  }
  // Var(out) = (1-c)/(1+c) before correction.
  out *= std::sqrt((1.0 + c) / (1.0 - c));
  return out;
}

}  // namespace

SignalBuffer generate_white_noise(Eigen::Index length, double level_db,
                                  RngSeed seed, int sample_rate) {
  if (length < 1) throw std::invalid_argument("length must be >= 1");
  SplitMix64 rng(seed);
  Eigen::ArrayXd samples = gaussian_array(length, rng);
  normalize_power(samples, level_db);
  return {std::move(samples), sample_rate};
}

SignalBuffer generate_speechlike(Eigen::Index length, double level_db,
                                 RngSeed seed, const SpeechlikeParams& params,
                                 int sample_rate) {
  if (length < 1) throw std::invalid_argument("length must be >= 1");
  if (!(params.mod_rate_hz > 0.0) ||
      params.mod_rate_hz >= 0.5 * sample_rate)
    throw std::invalid_argument("modulation rate must lie in (0, rate/2), got " +
                                std::to_string(params.mod_rate_hz) + " Hz");
  SplitMix64 rng(seed);
  SplitMix64 carrier_rng(rng.fork(0));
  SplitMix64 syllabic_rng(rng.fork(1));
  SplitMix64 phonemic_rng(rng.fork(2));
  SplitMix64 gate_rng(rng.fork(3));

  Eigen::ArrayXd samples = gaussian_array(length, carrier_rng);
  if (!params.constant_modulator) {
    Eigen::ArrayXd syllabic =
        lowpass_gaussian(length, params.mod_rate_hz, sample_rate, syllabic_rng);
    Eigen::ArrayXd phonemic = lowpass_gaussian(length, 4.0 * params.mod_rate_hz,
                                               sample_rate, phonemic_rng);
    Eigen::ArrayXd gate_drive = lowpass_gaussian(
        length, 0.5 * params.mod_rate_hz, sample_rate, gate_rng);

    Eigen::ArrayXd level = params.syllabic_db_sigma * syllabic +
                           params.phonemic_db_sigma * phonemic;
    // Soft gate: mostly 1, dipping toward the pause floor when the slow
    // drive falls below gap_bias.
    double floor_amp = db_to_amplitude(params.gap_floor_db);
    Eigen::ArrayXd gate =
        (1.0 + (-(gate_drive - params.gap_bias) / params.gap_softness).exp())
            .inverse();
    Eigen::ArrayXd amp =
        (level * (std::numbers::ln10 / 20.0)).exp() *
        (gate + (1.0 - gate) * floor_amp);
    samples *= amp;
  }
  normalize_power(samples, level_db);
  return {std::move(samples), sample_rate};
}

SignalBuffer generate_speechlike(Eigen::Index length, double level_db,
                                 RngSeed seed, double mod_rate_hz,
                                 int sample_rate) {
  SpeechlikeParams params;
  params.mod_rate_hz = mod_rate_hz;
  return generate_speechlike(length, level_db, seed, params, sample_rate);
}

SignalBuffer mix(const SignalBuffer& a, const SignalBuffer& b) {
  if (a.sample_rate != b.sample_rate)
    throw std::invalid_argument("sample rate mismatch: " +
                                std::to_string(a.sample_rate) + " vs " +
                                std::to_string(b.sample_rate));
  if (a.samples.size() != b.samples.size())
    throw std::invalid_argument("length mismatch: " +
                                std::to_string(a.samples.size()) + " vs " +
                                std::to_string(b.samples.size()));
  return {a.samples + b.samples, a.sample_rate};
}

SignalBuffer scaled(const SignalBuffer& x, double amplitude_factor) {
  return {x.samples * amplitude_factor, x.sample_rate};
}

Eigen::ArrayXd smoothed_power(const SignalBuffer& x, double window_s) {
  auto window = static_cast<Eigen::Index>(
      std::max(1.0, std::round(window_s * x.sample_rate)));
  Eigen::Index n = x.samples.size();
  window = std::min(window, n);
  // Prefix sums make the boxcar O(n); the window is truncated at the edges.
  Eigen::ArrayXd cumulative(n + 1);
  cumulative[0] = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    cumulative[i + 1] = cumulative[i] + x.samples[i] * x.samples[i];
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index lo = std::max<Eigen::Index>(0, i - window / 2);
    Eigen::Index hi = std::min(n, lo + window);
    out[i] = (cumulative[hi] - cumulative[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace drclab
