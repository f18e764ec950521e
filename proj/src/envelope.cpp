#include "drclab/envelope.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace drclab {

void validate(const DetectorParams& params) {
  if (!(params.beta_attack >= 0.0) ||
      !(params.beta_attack <= params.beta_release) ||
      !(params.beta_release < 1.0))
    throw std::invalid_argument(
        "detector needs 0 <= beta_attack <= beta_release < 1");
  if (!(params.floor_power > 0.0))
    throw std::invalid_argument("floor_power must be positive");
}

double ansi_beta(double time_ms, int sample_rate) {
  if (!(time_ms > 0.0))
    throw std::invalid_argument("time must be positive, got " +
                                std::to_string(time_ms) + " ms");
  if (sample_rate <= 0)
    throw std::invalid_argument("sample rate must be positive");
  // Anchors: 10 ms -> 0.978 and 50 ms -> 0.996 at 16 kHz. Between and beyond
  // them the decay constant k = -ln(beta) follows a power law in the window
  // length n = time_ms * rate / 1000, which reproduces both anchors exactly
  // and keeps beta monotone in the time constant.
  const double n_a = 160.0, k_a = -std::log(0.978);
  const double n_r = 800.0, k_r = -std::log(0.996);
  const double slope = std::log(k_r / k_a) / std::log(n_r / n_a);
  double n = time_ms * sample_rate / 1000.0;
  return std::exp(-k_a * std::pow(n / n_a, slope));
}

DetectorParams make_detector(double attack_ms, double release_ms,
                             int sample_rate, double floor_power) {
  DetectorParams params;
  params.beta_attack = ansi_beta(attack_ms, sample_rate);
  params.beta_release = ansi_beta(release_ms, sample_rate);
  params.floor_power = floor_power;
  validate(params);
  return params;
}

Eigen::ArrayXd detect(const Eigen::ArrayXd& x, const DetectorParams& params) {
  validate(params);
  const Eigen::Index n = x.size();
  if (n == 0) throw std::invalid_argument("empty signal");
  Eigen::ArrayXd out(n);
  double state = std::max(x[0] * x[0], params.floor_power);
  for (Eigen::Index t = 0; t < n; ++t) {
    double p = x[t] * x[t];
    double beta = p >= state ? params.beta_attack : params.beta_release;
    state = beta * state + (1.0 - beta) * p;
    if (state < params.floor_power) state = params.floor_power;
    out[t] = state;
  }
  return out;
}

EnvelopeTrack detect(const BandedSignal& bands, const DetectorParams& params) {
  EnvelopeTrack track;
  track.floor_power = params.floor_power;
  track.values.resize(bands.channels.rows(), bands.channels.cols());
  for (Eigen::Index b = 0; b < bands.channels.cols(); ++b)
    track.values.col(b) = detect(bands.channels.col(b).eval(), params);
  return track;
}

}  // namespace drclab
