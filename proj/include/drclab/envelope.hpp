#pragma once

#include <Eigen/Core>

#include "drclab/filterbank.hpp"

namespace drclab {

/// First-order attack/release power detector,
///   v[t] = beta * v[t-1] + (1 - beta) * x[t]^2,
/// with beta = beta_attack while x[t]^2 >= v[t-1] and beta_release otherwise.
/// The state seeds from max(x[0]^2, floor_power) so short signals carry no
/// startup transient, and the output never drops below floor_power, keeping
/// downstream dB conversions and gain divisions finite on silence.
struct DetectorParams {
  double beta_attack = 0.978;   // 10 ms at 16 kHz
  double beta_release = 0.996;  // 50 ms at 16 kHz
  double floor_power = 1e-10;
};

/// Requires 0 <= beta_attack <= beta_release < 1 and floor_power > 0.
void validate(const DetectorParams& params);

/// Per-band power envelopes aligned 1:1 with the BandedSignal they were
/// detected from. Every value >= floor_power.
struct EnvelopeTrack {
  Eigen::ArrayXXd values;
  double floor_power = 1e-10;

  Eigen::Index length() const { return values.rows(); }
  int num_bands() const { return static_cast<int>(values.cols()); }
};

/// Smoothing coefficient for an ANSI S3.22 attack/release time at the given
/// rate. Calibrated to reproduce the two published 16 kHz anchors,
/// beta(10 ms) = 0.978 and beta(50 ms) = 0.996, exactly; other times come
/// from a power-law interpolation in the window length
/// n = time_ms * sample_rate / 1000, monotone in time_ms.
double ansi_beta(double time_ms, int sample_rate);

DetectorParams make_detector(double attack_ms, double release_ms,
                             int sample_rate, double floor_power = 1e-10);

/// Power envelope of one channel, same length as x.
Eigen::ArrayXd detect(const Eigen::ArrayXd& x, const DetectorParams& params);

/// Column-wise envelopes of a banded signal.
EnvelopeTrack detect(const BandedSignal& bands, const DetectorParams& params);

}  // namespace drclab
