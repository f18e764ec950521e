#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "drclab/compression.hpp"
#include "drclab/rng.hpp"

namespace drclab {

/// Finite discrete random variable. Enumerating its support makes every
/// expectation below exact, so the inequality checkers carry no Monte Carlo
/// error; randomness enters only through instance generation.
struct DiscreteRV {
  Eigen::ArrayXd support;  // strictly increasing
  Eigen::ArrayXd probs;    // nonnegative, sums to 1 within 1e-12

  double mean() const;
};

/// Throws std::invalid_argument on size mismatch, non-sorted support,
/// negative weights, or total probability off by more than 1e-12.
void validate(const DiscreteRV& rv);

/// Step functions on a support, f nondecreasing and g nonincreasing.
/// Monotonicity is checked on construction.
struct MonotonePair {
  Eigen::ArrayXd f;
  Eigen::ArrayXd g;
};

MonotonePair make_monotone_pair(const Eigen::ArrayXd& f,
                                const Eigen::ArrayXd& g);

/// E[f(X)g(X)] <= E[f(X)]E[g(X)] for f nondecreasing, g nonincreasing
/// (opposite-monotone functions of one variable are negatively correlated).
struct Lemma2Result {
  double lhs = 0.0;  // E[f(X)g(X)]
  double rhs = 0.0;  // E[f(X)]E[g(X)]
  bool holds = false;
};

Lemma2Result check_lemma2(const DiscreteRV& x, const MonotonePair& pair,
                          double tol = 1e-12);

/// Cov(ecf(V1|V2), ecf(V2|V1)) <= 0 for independent V1, V2 under a valid
/// compression curve, by exact enumeration of the product distribution.
struct Theorem1Result {
  double covariance = 0.0;
  bool holds = false;
};

Theorem1Result check_theorem1(const CompressorSpec& spec,
                              const DiscreteRV& v1, const DiscreteRV& v2,
                              double tol = 1e-12);

/// Effective compression slope >= compression slope at v1+v2 over a log
/// grid, with equality for linear curves and for v2 = 0.
struct Theorem2Result {
  double worst_margin = 0.0;       // min over grid of (effective - nominal)
  double worst_equality_gap = 0.0; // max |gap| over the stated equality cases
  int points_checked = 0;
  int points_skipped = 0;          // non-differentiable grid points
  bool holds = false;
};

Theorem2Result check_theorem2(const CompressorSpec& spec,
                              const WorkingDomain& grid, double tol = 1e-9);

/// Midpoint concavity of ecf in v1 and convexity in v2 on a log grid.
/// Requires the curve to pass the gain-convexity validation; otherwise the
/// check is skipped with the reason recorded.
struct Lemma3Result {
  bool precondition_ok = false;
  std::string skip_reason;
  double worst_concavity_margin = 0.0;  // along v1, >= -tol when holding
  double worst_convexity_margin = 0.0;  // along v2
  bool holds = false;
};

Lemma3Result check_lemma3(const CompressorSpec& spec, const WorkingDomain& grid,
                          double tol = 1e-9);

/// Long-term SNR never improves when a fluctuating target is compressed
/// against a constant interferer under a gain-convex curve:
///   snr_out = E[ecf(V1|v2)] / E[ecf(v2|V1)], exact over V1's distribution,
/// compared against snr_in = E[V1] / v2.
struct Theorem3Result {
  bool precondition_ok = false;
  std::string skip_reason;
  double snr_in = 0.0;   // linear power ratio
  double snr_out = 0.0;
  bool holds = false;
};

Theorem3Result check_theorem3(const CompressorSpec& spec, const DiscreteRV& v1,
                              double v2_const, double tol = 1e-12);

/// Batch driver: seeded random instances, exact per-instance checking, and
/// greedy shrinking of any failure to a minimal reproducer.
struct BatchReport {
  std::string name;
  int instances = 0;
  int failures = 0;
  int skipped = 0;  // precondition-failed checks, expected for some curves
  double worst_margin = 0.0;
  std::vector<std::string> failure_descriptions;  // minimal shrunk instances
  double elapsed_s = 0.0;

  bool all_hold() const { return failures == 0; }
};

/// Greedy minimization of a failing random-variable pair: repeatedly drops
/// support points and simplifies weights while `fails` stays true. Returns
/// the smallest pair found still failing.
std::pair<DiscreteRV, DiscreteRV> shrink_instance(
    DiscreteRV v1, DiscreteRV v2,
    const std::function<bool(const DiscreteRV&, const DiscreteRV&)>& fails);

BatchReport run_lemma2_batch(RngSeed seed, int instances);
BatchReport run_theorem1_batch(RngSeed seed, int instances);
BatchReport run_theorem2_batch();
BatchReport run_lemma3_batch();
BatchReport run_theorem3_batch(RngSeed seed, int instances);

/// JSON object {name, instances, failures, worst_margin, failures:[...]}.
std::string to_json(const BatchReport& report);

}  // namespace drclab
