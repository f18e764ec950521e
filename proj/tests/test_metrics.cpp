#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "drclab/ecf.hpp"
#include "drclab/metrics.hpp"
#include "drclab/signal.hpp"

using namespace drclab;

namespace {

EnvelopeTrack track_from(const Eigen::ArrayXXd& values) {
  EnvelopeTrack track;
  track.values = values;
  return track;
}

EnvelopeTrack single_band(const Eigen::ArrayXd& values) {
  Eigen::ArrayXXd m(values.size(), 1);
  m.col(0) = values;
  return track_from(m);
}

}  // namespace

TEST_CASE("percentile interpolates linearly between order statistics") {
  Eigen::ArrayXd x(4);
  x << 3.0, 1.0, 4.0, 2.0;  // unsorted on purpose
  CHECK(percentile(x, 0.0) == 1.0);
  CHECK(percentile(x, 100.0) == 4.0);
  CHECK(percentile(x, 50.0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(percentile(x, 95.0) == doctest::Approx(3.85).epsilon(1e-12));

  CHECK_THROWS_AS(percentile(Eigen::ArrayXd(0), 50.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile(x, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile(x, 101.0), std::invalid_argument);
}

TEST_CASE("an envelope correlates perfectly with itself") {
  SignalBuffer noise = generate_speechlike(8000, 0.0, RngSeed{2});
  Eigen::ArrayXXd env(noise.samples.size(), 2);
  env.col(0) = noise.samples.square() + 1e-6;
  env.col(1) = noise.samples.square() * 2.0 + 1e-6;
  EnvelopeTrack track = track_from(env);

  PerBandStat rho = envelope_correlation(track, track);
  REQUIRE(rho.values.size() == 2);
  for (Eigen::Index b = 0; b < 2; ++b) {
    CHECK(rho.defined[static_cast<std::size_t>(b)]);
    CHECK(rho.values[b] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(rho.average == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.defined_count == 2);
}

TEST_CASE("reciprocal envelopes are perfectly anti-correlated in dB") {
  Eigen::ArrayXd v = Eigen::ArrayXd::LinSpaced(100, 0.1, 10.0);
  PerBandStat rho = envelope_correlation(single_band(v), single_band(v.inverse()));
  CHECK(rho.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rho.values[0] >= -1.0);  // clamp keeps the estimate in range
}

TEST_CASE("a constant envelope has undefined correlation") {
  Eigen::ArrayXd flat = Eigen::ArrayXd::Constant(50, 0.3);
  Eigen::ArrayXd varying = Eigen::ArrayXd::LinSpaced(50, 0.1, 1.0);
  PerBandStat rho =
      envelope_correlation(single_band(flat), single_band(varying));
  CHECK(!rho.defined[0]);
  CHECK(std::isnan(rho.values[0]));
  CHECK(rho.defined_count == 0);
  CHECK(std::isnan(rho.average));
}

TEST_CASE("independent envelopes are nearly uncorrelated") {
  Eigen::ArrayXd a = generate_white_noise(20000, 0.0, RngSeed{31}).samples.square() + 1e-8;
  Eigen::ArrayXd b = generate_white_noise(20000, 0.0, RngSeed{32}).samples.square() + 1e-8;
  PerBandStat rho = envelope_correlation(single_band(a), single_band(b));
  CHECK(std::abs(rho.values[0]) < 0.1);
}

TEST_CASE("correlation is invariant to level shifts of either side") {
  Eigen::ArrayXd a = generate_speechlike(8000, 0.0, RngSeed{33}).samples.square() + 1e-8;
  Eigen::ArrayXd b = generate_speechlike(8000, 0.0, RngSeed{34}).samples.square() + 1e-8;
  double base =
      envelope_correlation(single_band(a), single_band(b)).values[0];
  double shifted = envelope_correlation(single_band(100.0 * a),
                                        single_band(0.01 * b)).values[0];
  CHECK(shifted == doctest::Approx(base).epsilon(1e-9));
  CHECK(base >= -1.0);
  CHECK(base <= 1.0);
}

TEST_CASE("dynamic range measures the 5th-to-95th percentile span in dB") {
  // A uniform dB ramp over 0..99 dB: p95 = 94.05, p5 = 4.95, span 89.1.
  Eigen::ArrayXd db = Eigen::ArrayXd::LinSpaced(100, 0.0, 99.0);
  Eigen::ArrayXd power = (db / 10.0).unaryExpr([](double d) { return std::pow(10.0, d); });
  PerBandStat dr = dynamic_range_db(single_band(power));
  CHECK(dr.values[0] == doctest::Approx(89.1).epsilon(1e-9));

  PerBandStat flat = dynamic_range_db(single_band(Eigen::ArrayXd::Constant(10, 2.0)));
  CHECK(flat.values[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("identity processing yields an effective ratio of one") {
  Eigen::ArrayXd v =
      generate_speechlike(8000, 0.0, RngSeed{35}).samples.square() + 1e-8;
  EnvelopeTrack track = single_band(v);
  PerBandStat ecr = effective_compression_ratio(track, track);
  CHECK(ecr.defined[0]);
  CHECK(ecr.values[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a memoryless cube-root envelope map measures a ratio of three") {
  Eigen::ArrayXd v =
      generate_speechlike(8000, 0.0, RngSeed{36}).samples.square() + 1e-8;
  EnvelopeTrack in = single_band(v);
  EnvelopeTrack out = single_band(v.pow(1.0 / 3.0));
  PerBandStat ecr = effective_compression_ratio(in, out);
  CHECK(ecr.values[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("collapsed output range flags the ratio undefined") {
  Eigen::ArrayXd v = Eigen::ArrayXd::LinSpaced(50, 0.1, 1.0);
  EnvelopeTrack in = single_band(v);
  EnvelopeTrack out = single_band(Eigen::ArrayXd::Constant(50, 0.5));
  PerBandStat ecr = effective_compression_ratio(in, out);
  CHECK(!ecr.defined[0]);
  CHECK(std::isinf(ecr.values[0]));
}

TEST_CASE("long-term SNR of a track against itself is exactly zero") {
  Eigen::ArrayXd v =
      generate_speechlike(4000, 0.0, RngSeed{37}).samples.square() + 1e-8;
  EnvelopeTrack track = single_band(v);
  PerBandStat snr = long_term_snr(track, track);
  CHECK(snr.values[0] == 0.0);
}

TEST_CASE("long-term SNR is antisymmetric and shifts with target level") {
  Eigen::ArrayXd a =
      generate_speechlike(4000, 0.0, RngSeed{38}).samples.square() + 1e-8;
  Eigen::ArrayXd b =
      generate_white_noise(4000, -5.0, RngSeed{39}).samples.square() + 1e-8;
  EnvelopeTrack ta = single_band(a);
  EnvelopeTrack tb = single_band(b);

  double forward = long_term_snr(ta, tb).values[0];
  double backward = long_term_snr(tb, ta).values[0];
  CHECK(forward == doctest::Approx(-backward).epsilon(1e-12));

  double boosted = long_term_snr(single_band(10.0 * a), tb).values[0];
  CHECK(boosted == doctest::Approx(forward + 10.0).epsilon(1e-9));
}

TEST_CASE("an interferer stuck at the floor flags the band") {
  EnvelopeTrack target = single_band(Eigen::ArrayXd::Constant(50, 0.5));
  EnvelopeTrack silent = single_band(Eigen::ArrayXd::Constant(50, 1e-10));
  silent.floor_power = 1e-10;
  PerBandStat snr = long_term_snr(target, silent);
  CHECK(!snr.defined[0]);
  CHECK(std::isinf(snr.values[0]));
}

TEST_CASE("square-root compression of a two-level target costs 0.39 dB of SNR") {
  // Target envelope alternates between 1 and 3 against a constant interferer
  // at 1. With C(v) = sqrt(v), splitting the compressed mixture gives
  //   target out:     C(2)/2*1 = 0.70711,  C(4)/4*3 = 1.5
  //   interferer out: C(2)/2*1 = 0.70711,  C(4)/4*1 = 0.5
  // so the SNR drops from 2.0 to 1.10355/0.60355 = 1.82843.
  const Eigen::Index n = 400;
  Eigen::ArrayXd v1(n), v2(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    v1[t] = t % 2 == 0 ? 1.0 : 3.0;
    v2[t] = 1.0;
  }
  EcfContext ctx{CompressorSpec::power_law(2.0), 0};
  Eigen::ArrayXd out1(n), out2(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    out1[t] = ecf(ctx, v1[t], v2[t]);
    out2[t] = ecf(ctx, v2[t], v1[t]);
  }

  double snr_in = long_term_snr(single_band(v1), single_band(v2)).values[0];
  double snr_out =
      long_term_snr(single_band(out1), single_band(out2)).values[0];

  const double sqrt2 = std::sqrt(2.0);
  double expected_out = ((sqrt2 / 2.0 + 1.5) / 2.0) / ((sqrt2 / 2.0 + 0.5) / 2.0);
  CHECK(snr_in == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK(snr_out ==
        doctest::Approx(10.0 * std::log10(expected_out)).epsilon(1e-9));
  CHECK(expected_out == doctest::Approx(1.828).epsilon(1e-3));
  CHECK(snr_out < snr_in);
}

TEST_CASE("misaligned tracks are rejected") {
  EnvelopeTrack a = single_band(Eigen::ArrayXd::Constant(10, 1.0));
  EnvelopeTrack b = single_band(Eigen::ArrayXd::Constant(11, 1.0));
  CHECK_THROWS_AS(envelope_correlation(a, b), std::invalid_argument);
  CHECK_THROWS_AS(long_term_snr(a, b), std::invalid_argument);
  CHECK_THROWS_AS(effective_compression_ratio(a, b), std::invalid_argument);
}

TEST_CASE("full metric reports need a target and an interferer") {
  DrcConfig cfg = uniform_config(FilterbankSpec{},
                                 make_detector(10.0, 50.0, 16000),
                                 CompressorSpec::power_law(3.0));
  SignalBuffer x = generate_speechlike(8000, 0.0, RngSeed{40});
  MixtureRun solo = process_mixture({x}, cfg);
  CHECK_THROWS_AS(compute_metrics(solo), std::invalid_argument);

  SignalBuffer noise = generate_white_noise(8000, 0.0, RngSeed{41});
  MixtureRun duo = process_mixture({x, noise}, cfg);
  MetricsReport report = compute_metrics(duo);
  CHECK(report.rho_in.values.size() == 6);
  CHECK(report.rho_out.values.size() == 6);
  CHECK(report.ecr.defined_count > 0);
  CHECK(report.snr_in_db.defined_count == 6);
  for (Eigen::Index b = 0; b < 6; ++b) {
    CHECK(report.rho_in.values[b] >= -1.0);
    CHECK(report.rho_in.values[b] <= 1.0);
  }
}
