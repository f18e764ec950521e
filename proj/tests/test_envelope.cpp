#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "drclab/envelope.hpp"
#include "drclab/signal.hpp"

using namespace drclab;

TEST_CASE("published smoothing anchors are reproduced exactly") {
  CHECK(ansi_beta(10.0, 16000) == doctest::Approx(0.978).epsilon(1e-12));
  CHECK(ansi_beta(50.0, 16000) == doctest::Approx(0.996).epsilon(1e-12));

  DetectorParams params = make_detector(10.0, 50.0, 16000);
  CHECK(params.beta_attack == doctest::Approx(0.978).epsilon(1e-12));
  CHECK(params.beta_release == doctest::Approx(0.996).epsilon(1e-12));
}

TEST_CASE("smoothing coefficient grows with the time constant and rate") {
  double prev = 0.0;
  for (double ms : {1.0, 5.0, 10.0, 20.0, 50.0, 100.0, 500.0}) {
    double beta = ansi_beta(ms, 16000);
    CHECK(beta > prev);
    CHECK(beta < 1.0);
    prev = beta;
  }
  CHECK(ansi_beta(10.0, 32000) > ansi_beta(10.0, 16000));
  CHECK_THROWS_AS(ansi_beta(0.0, 16000), std::invalid_argument);
  CHECK_THROWS_AS(ansi_beta(10.0, 0), std::invalid_argument);
}

TEST_CASE("parameter validation enforces the attack/release ordering") {
  DetectorParams bad;
  bad.beta_attack = 0.996;
  bad.beta_release = 0.978;  // attack slower than release
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = DetectorParams{};
  bad.beta_release = 1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  bad = DetectorParams{};
  bad.floor_power = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  CHECK_NOTHROW(validate(DetectorParams{}));
}

TEST_CASE("a constant input is a fixed point of the detector") {
  Eigen::ArrayXd x = Eigen::ArrayXd::Constant(500, 0.25);
  Eigen::ArrayXd v = detect(x, DetectorParams{});
  CHECK((v == 0.0625).all());
}

TEST_CASE("a downward step releases along the closed-form exponential") {
  DetectorParams params;  // beta_release = 0.996
  const double a = 0.8, b = 0.1;
  const Eigen::Index hold = 100, tail = 2000;
  Eigen::ArrayXd x(hold + tail);
  x.head(hold) = a;
  x.tail(tail) = b;
  Eigen::ArrayXd v = detect(x, params);

  CHECK(v[hold - 1] == doctest::Approx(a * a).epsilon(1e-12));
  // v[hold + m] = beta_r^(m+1) (a^2 - b^2) + b^2 while the release branch
  // is active; derived by unrolling the one-pole recursion.
  for (Eigen::Index m = 0; m < tail; m += 37) {
    double expected =
        std::pow(params.beta_release, static_cast<double>(m + 1)) *
            (a * a - b * b) +
        b * b;
    CHECK(v[hold + m] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("silence pins the envelope to the floor") {
  Eigen::ArrayXd zeros = Eigen::ArrayXd::Zero(300);
  DetectorParams params;
  Eigen::ArrayXd v = detect(zeros, params);
  CHECK((v == params.floor_power).all());
}

TEST_CASE("silence after signal decays at the release rate in dB per second") {
  DetectorParams params;
  const int rate = 16000;
  Eigen::ArrayXd x(rate);
  x.head(100) = 1.0;
  x.tail(rate - 100) = 0.0;
  Eigen::ArrayXd v = detect(x, params);
  // Pure release on zero input multiplies the state by beta_release each
  // sample, i.e. 10*log10(beta_r)*rate dB/s, about -279 dB/s here. The span
  // stays short enough that the decay has not yet hit the envelope floor.
  double measured =
      10.0 * std::log10(v[4100] / v[100]) / (4000.0 / rate);
  double expected = 10.0 * std::log10(params.beta_release) * rate;
  CHECK(measured == doctest::Approx(expected).epsilon(1e-9));
  CHECK(expected < -250.0);
  CHECK(expected > -310.0);
}

TEST_CASE("asymmetric detector never under-tracks a symmetric smoother") {
  SignalBuffer noise = generate_speechlike(16000, 0.0, RngSeed{4});
  DetectorParams fast;  // attack faster than release
  DetectorParams symmetric;
  symmetric.beta_attack = fast.beta_release;
  symmetric.beta_release = fast.beta_release;

  Eigen::ArrayXd v_fast = detect(noise.samples, fast);
  Eigen::ArrayXd v_sym = detect(noise.samples, symmetric);
  CHECK((v_fast - v_sym).minCoeff() >= -1e-15);
  CHECK((v_fast - v_sym).maxCoeff() > 0.0);
}

TEST_CASE("envelope scales exactly with input power above the floor") {
  SignalBuffer x = generate_white_noise(8000, 0.0, RngSeed{9});
  Eigen::ArrayXd v1 = detect(x.samples, DetectorParams{});
  Eigen::ArrayXd v2 = detect((0.5 * x.samples).eval(), DetectorParams{});
  double worst = ((v2 - 0.25 * v1) / v1.abs()).abs().maxCoeff();
  CHECK(worst <= 1e-12);
}

TEST_CASE("banded detection equals per-column detection") {
  SignalBuffer x = generate_white_noise(4000, 0.0, RngSeed{12});
  FilterbankSpec fb;
  BandedSignal bands = analyze(x, fb);
  DetectorParams params;
  EnvelopeTrack track = detect(bands, params);
  REQUIRE(track.num_bands() == fb.num_bands);
  REQUIRE(track.length() == bands.length());
  CHECK(track.floor_power == params.floor_power);
  for (int b = 0; b < fb.num_bands; ++b) {
    Eigen::ArrayXd column = detect(bands.channels.col(b).eval(), params);
    CHECK((track.values.col(b) == column).all());
  }
  CHECK(track.values.minCoeff() >= params.floor_power);
}

TEST_CASE("empty input is rejected") {
  Eigen::ArrayXd empty(0);
  CHECK_THROWS_AS(detect(empty, DetectorParams{}), std::invalid_argument);
}
