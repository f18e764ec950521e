#pragma once

#include <Eigen/Core>
#include <limits>

namespace drclab {

/// Level-to-level compression curve families. All operate on power units
/// (v = squared amplitude envelope); dB parameters are re full-scale power.
///
///   linear       C(v) = g^2 * v
///   power_law    C(v) = g0^2 * v^(1/cr)
///   knee         dB-domain curve: slope 1 below knee_low_db, slope 1/cr
///                above, clamped at limit_db; corners optionally rounded by
///                quadratic blends of total width smooth_db
///   logarithmic  C(v) = scale * ln(1 + v / offset)
enum class CompressorKind { linear, power_law, knee, logarithmic };

struct CompressorSpec {
  CompressorKind kind = CompressorKind::linear;
  double gain_db = 0.0;      // linear
  double cr = 1.0;           // power_law, knee; >= 1, +inf = limiter
  double g0_db = 0.0;        // power_law, knee makeup gain
  double knee_low_db = 0.0;  // knee: input level where compression starts
  double limit_db = 0.0;     // knee: output ceiling
  double smooth_db = 0.0;    // knee: total blend width per corner, 0 = hard
  double scale = 1.0;        // logarithmic
  double offset = 1.0;       // logarithmic

  static CompressorSpec linear(double gain_db = 0.0);
  static CompressorSpec power_law(double cr, double g0_db = 0.0);
  static CompressorSpec knee(double g0_db, double knee_low_db, double cr,
                             double limit_db, double smooth_db = 0.0);
  static CompressorSpec logarithmic(double scale, double offset);
};

/// Log-spaced evaluation grid used by the validators and grid sweeps.
struct WorkingDomain {
  double v_min = 1e-6;
  double v_max = 1e2;
  int grid_points = 512;
};

/// grid_points log-spaced values covering [v_min, v_max] inclusive.
Eigen::ArrayXd log_grid(const WorkingDomain& domain);

/// C(v). Throws std::domain_error for v <= 0.
double compress_level(const CompressorSpec& spec, double v);

/// Amplitude gain sqrt(C(v)/v).
double gain(const CompressorSpec& spec, double v);

/// Log-log slope of C at v, d ln C / d ln v, with one-sided values at knee
/// corners. value is the two-sided slope when differentiable; at a corner it
/// is reported alongside the distinct one-sided slopes.
struct SlopeResult {
  double value = 0.0;
  double left = 0.0;
  double right = 0.0;
  bool differentiable = true;
};

SlopeResult compression_slope(const CompressorSpec& spec, double v);

/// Grid check of the compression-curve contract: nonnegative, nondecreasing,
/// and midpoint-concave in v. gain_convex additionally tests midpoint
/// convexity of C(v)/v, the side condition of the SNR results; it is reported
/// separately because curves with corners fail it while still being valid
/// compressors.
struct ValidationReport {
  bool nonnegative = false;
  bool nondecreasing = false;
  bool concave = false;
  bool gain_convex = false;
  double worst_concavity_margin = 0.0;     // most negative midpoint margin
  double worst_gain_convexity_margin = 0.0;

  bool valid_compressor() const { return nonnegative && nondecreasing && concave; }
};

ValidationReport validate_compression(const CompressorSpec& spec,
                                      const WorkingDomain& domain,
                                      double tol = 1e-9);

constexpr double kInfiniteRatio = std::numeric_limits<double>::infinity();

}  // namespace drclab
