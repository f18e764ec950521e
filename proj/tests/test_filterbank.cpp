#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "drclab/filterbank.hpp"
#include "drclab/signal.hpp"

using namespace drclab;

namespace {

// Mel formula restated locally so the edge tests check the library against
// an independent expression rather than against itself.
double mel_of(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

// Inverts mel_of by bisection; the formula is strictly increasing.
double hz_at_mel(double target_mel, double lo_hz, double hi_hz) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo_hz + hi_hz);
    (mel_of(mid) < target_mel ? lo_hz : hi_hz) = mid;
  }
  return 0.5 * (lo_hz + hi_hz);
}

double magnitude_response_db(const Eigen::ArrayXd& taps, double freq_hz,
                             int sample_rate) {
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index n = 0; n < taps.size(); ++n) {
    double phase = -2.0 * std::numbers::pi * freq_hz *
                   static_cast<double>(n) / sample_rate;
    acc += taps[n] * std::polar(1.0, phase);
  }
  return 20.0 * std::log10(std::abs(acc));
}

SignalBuffer sine(double freq_hz, Eigen::Index length, int rate) {
  SignalBuffer x;
  x.sample_rate = rate;
  x.samples.resize(length);
  for (Eigen::Index n = 0; n < length; ++n)
    x.samples[n] =
        std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(n) / rate);
  return x;
}

}  // namespace

TEST_CASE("mel conversions invert each other and match the formula") {
  CHECK(hz_to_mel(0.0) == 0.0);
  CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));
  for (double hz : {50.0, 440.0, 1000.0, 4000.0, 8000.0}) {
    CHECK(hz_to_mel(hz) == doctest::Approx(mel_of(hz)).epsilon(1e-12));
    CHECK(mel_to_hz(hz_to_mel(hz)) == doctest::Approx(hz).epsilon(1e-10));
  }
}

TEST_CASE("a single band spans the full configured range") {
  FilterbankSpec spec;
  spec.num_bands = 1;
  auto edges = mel_band_edges(spec);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].first == 0.0);
  CHECK(edges[0].second == 8000.0);
}

TEST_CASE("two bands split at the mel midpoint") {
  FilterbankSpec spec;
  spec.num_bands = 2;
  auto edges = mel_band_edges(spec);
  REQUIRE(edges.size() == 2);
  double target_mel = 0.5 * (mel_of(0.0) + mel_of(8000.0));
  double expected_hz = hz_at_mel(target_mel, 0.0, 8000.0);
  CHECK(edges[0].second == doctest::Approx(expected_hz).epsilon(1e-9));
  CHECK(edges[1].first == edges[0].second);
  // The mel scale is concave in frequency, so the midpoint sits well below
  // the arithmetic center of the range.
  CHECK(edges[0].second < 4000.0);
  CHECK(edges[0].second > 1000.0);
}

TEST_CASE("band edges are contiguous and strictly increasing") {
  FilterbankSpec spec;  // 6 bands, 0..8000
  auto edges = mel_band_edges(spec);
  REQUIRE(edges.size() == 6);
  CHECK(edges.front().first == 0.0);
  CHECK(edges.back().second == 8000.0);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    CHECK(edges[b].second == edges[b + 1].first);
    CHECK(edges[b].first < edges[b].second);
  }
}

TEST_CASE("spec validation rejects malformed parameters") {
  FilterbankSpec spec;
  spec.fir_length = 256;  // even
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);

  spec = FilterbankSpec{};
  spec.num_bands = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);

  spec = FilterbankSpec{};
  spec.f_high = 9000.0;  // above Nyquist at 16 kHz
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);

  CHECK_NOTHROW(validate(FilterbankSpec{}));
}

TEST_CASE("taps are linear phase (symmetric) with the declared shape") {
  FilterbankSpec spec;
  Eigen::ArrayXXd taps = filterbank_taps(spec);
  REQUIRE(taps.rows() == spec.fir_length);
  REQUIRE(taps.cols() == spec.num_bands);
  for (int b = 0; b < spec.num_bands; ++b)
    for (int n = 0; n < spec.fir_length; ++n)
      CHECK(taps(n, b) ==
            doctest::Approx(taps(spec.fir_length - 1 - n, b)).epsilon(1e-12));
}

TEST_CASE("analysis is linear to floating-point precision") {
  FilterbankSpec spec;
  SignalBuffer a = generate_white_noise(4000, 0.0, RngSeed{1});
  SignalBuffer b = generate_speechlike(4000, 0.0, RngSeed{2});
  SignalBuffer combo = mix(scaled(a, 2.0), scaled(b, -3.0));

  BandedSignal ba = analyze(a, spec);
  BandedSignal bb = analyze(b, spec);
  BandedSignal bc = analyze(combo, spec);
  double err =
      (bc.channels - (2.0 * ba.channels - 3.0 * bb.channels)).abs().maxCoeff();
  CHECK(err <= 1e-10);
}

TEST_CASE("silence stays silent in every band") {
  SignalBuffer zeros;
  zeros.samples = Eigen::ArrayXd::Zero(2048);
  BandedSignal bands = analyze(zeros, FilterbankSpec{});
  CHECK(bands.channels.abs().maxCoeff() == 0.0);
}

TEST_CASE("a tone lands in its own band with at least 20 dB selectivity") {
  FilterbankSpec spec;
  auto edges = mel_band_edges(spec);
  const int target_band = 3;
  double center =
      0.5 * (edges[target_band].first + edges[target_band].second);
  BandedSignal bands = analyze(sine(center, 16000, spec.sample_rate), spec);

  Eigen::ArrayXd powers(spec.num_bands);
  for (int b = 0; b < spec.num_bands; ++b)
    powers[b] = bands.channels.col(b).square().mean();
  for (int b = 0; b < spec.num_bands; ++b) {
    if (b == target_band) continue;
    CHECK(10.0 * std::log10(powers[target_band] / powers[b]) >= 20.0);
  }
}

TEST_CASE("summed bank response is flat within half a dB in the passband") {
  FilterbankSpec spec;
  Eigen::ArrayXd summed = filterbank_taps(spec).rowwise().sum();
  for (int i = 0; i <= 100; ++i) {
    double f = 100.0 * std::pow(75.0, i / 100.0);  // 100 Hz .. 7.5 kHz
    CHECK(std::abs(magnitude_response_db(summed, f, spec.sample_rate)) <= 0.5);
  }
}

TEST_CASE("reconstruction tracks the input sample-for-sample") {
  FilterbankSpec spec;
  SignalBuffer x = sine(1000.0, 16000, spec.sample_rate);
  SignalBuffer y = synthesize(analyze(x, spec));
  REQUIRE(y.samples.size() == x.samples.size());
  // Skip the zero-padding ramps at both ends (one group delay each).
  const Eigen::Index skip = spec.fir_length;
  Eigen::ArrayXd err =
      (y.samples - x.samples).segment(skip, x.samples.size() - 2 * skip);
  double rel_rms = std::sqrt(err.square().mean() /
                             x.samples.segment(skip, err.size()).square().mean());
  CHECK(rel_rms < 0.06);  // 0.5 dB amplitude window
}

TEST_CASE("band powers of white noise add up to the total power") {
  FilterbankSpec spec;
  SignalBuffer x = generate_white_noise(160000, 0.0, RngSeed{77});
  BandedSignal bands = analyze(x, spec);
  double sum = 0.0;
  for (int b = 0; b < spec.num_bands; ++b)
    sum += bands.channels.col(b).square().mean();
  double delta_db = 10.0 * std::log10(sum / mean_power(x));
  CHECK(std::abs(delta_db) < 0.5);
}

TEST_CASE("analysis rejects a sample-rate mismatch") {
  SignalBuffer x = generate_white_noise(1000, 0.0, RngSeed{1}, 8000);
  CHECK_THROWS_AS(analyze(x, FilterbankSpec{}), std::invalid_argument);
}
