#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "drclab/signal.hpp"

namespace drclab {

/// Mel frequency of f in Hz: 2595 * log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Linear-phase FIR analysis bank with band edges equally spaced on the mel
/// scale between f_low and f_high. Adjacent bands share an edge, so the
/// summed impulse responses telescope to one full-band filter and
/// synthesize(analyze(x)) reconstructs x up to window rolloff.
/// fir_length must be odd; the group delay (fir_length-1)/2 is an integer.
struct FilterbankSpec {
  int num_bands = 6;
  double f_low = 0.0;
  double f_high = 8000.0;
  int fir_length = 255;
  int sample_rate = 16000;
};

/// Throws std::invalid_argument on non-positive counts, even fir_length, or
/// edges outside [0, sample_rate/2].
void validate(const FilterbankSpec& spec);

/// Contiguous (low, high) Hz pairs, one per band.
std::vector<std::pair<double, double>> mel_band_edges(const FilterbankSpec& spec);

/// Hamming-windowed ideal-bandpass taps, shape (fir_length, num_bands),
/// column b for band b.
Eigen::ArrayXXd filterbank_taps(const FilterbankSpec& spec);

/// Signal split into bands. channels is (N, num_bands); column b is the
/// delay-compensated output of band b, so channels.rowwise().sum() tracks the
/// input sample-for-sample.
struct BandedSignal {
  Eigen::ArrayXXd channels;
  FilterbankSpec spec;

  Eigen::Index length() const { return channels.rows(); }
  int num_bands() const { return spec.num_bands; }
};

/// Splits x into bands. Zero-padded convolution with the group delay removed,
/// so analyze is linear in x and preserves length.
BandedSignal analyze(const SignalBuffer& x, const FilterbankSpec& spec);

/// Sums the band channels back into one waveform.
SignalBuffer synthesize(const BandedSignal& bands);

}  // namespace drclab
