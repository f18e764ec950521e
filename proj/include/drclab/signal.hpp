#pragma once

#include <Eigen/Core>
#include <cmath>

#include "drclab/rng.hpp"

namespace drclab {

/// Mono sampled waveform, full scale +-1.0. Amplitudes are stored as
/// doubles and may exceed full scale inside the processing chain.
struct SignalBuffer {
  Eigen::ArrayXd samples;
  int sample_rate = 16000;
};

inline double power_to_db(double power) { return 10.0 * std::log10(power); }
inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
inline double amplitude_to_db(double amp) { return 20.0 * std::log10(amp); }
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

/// Mean of squared samples.
double mean_power(const SignalBuffer& x);

/// Throws std::invalid_argument if the buffer is empty, the rate is not
/// positive, or any sample is non-finite.
void validate(const SignalBuffer& x);

/// Zero-mean white Gaussian noise scaled so the sample mean power equals
/// 10^(level_db/10) exactly.
SignalBuffer generate_white_noise(Eigen::Index length, double level_db,
                                  RngSeed seed, int sample_rate = 16000);

/// Knobs of the speech-like generator. The defaults give a wide-dynamic-range
/// signal whose 50 ms level distribution resembles running speech: a slow
/// syllabic modulation, a faster phonemic one, and soft pauses that drop the
/// level to gap_floor_db.
struct SpeechlikeParams {
  double mod_rate_hz = 4.0;       // syllabic modulation bandwidth
  double syllabic_db_sigma = 7.0; // dB std of the slow modulator
  double phonemic_db_sigma = 4.0; // dB std of the fast modulator (4x rate)
  double gap_bias = -0.85;        // gate threshold in modulator std units
  double gap_softness = 0.12;     // logistic width of the gate
  double gap_floor_db = -50.0;    // residual level inside pauses
  bool constant_modulator = false; // force modulator to 1 (white-noise stats)
};

SignalBuffer generate_speechlike(Eigen::Index length, double level_db,
                                 RngSeed seed, const SpeechlikeParams& params,
                                 int sample_rate = 16000);

SignalBuffer generate_speechlike(Eigen::Index length, double level_db,
                                 RngSeed seed, double mod_rate_hz = 4.0,
                                 int sample_rate = 16000);

/// Elementwise sum. Requires equal lengths and sample rates.
SignalBuffer mix(const SignalBuffer& a, const SignalBuffer& b);

/// Copy of x with samples multiplied by an amplitude factor.
SignalBuffer scaled(const SignalBuffer& x, double amplitude_factor);

/// Moving-average of squared samples over a boxcar window (seconds).
/// Used for level-distribution diagnostics of generated signals.
Eigen::ArrayXd smoothed_power(const SignalBuffer& x, double window_s);

}  // namespace drclab
