#include "drclab/compression.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace drclab {

namespace {

constexpr double kCornerTolDb = 1e-9;

// dB-domain description of the knee curve: input level L maps to
//   g0 + L                     below the knee corner c1,
//   g0 + c1 + s * (L - c1)     between c1 and the limit corner c2,
//   limit                      above c2,
// with s = 1/cr. When h > 0 each corner is replaced by a quadratic blend of
// half-width h, which keeps the curve C1 while preserving monotonicity and
// dB-domain concavity (blend second derivatives are (s-1)/(2h) and -s/(2h),
// both <= 0).
struct KneeShape {
  double s;
  double c1;
  double c2;  // +inf when s == 0 (the plateau is the ceiling)
  double h;
  double g0;
  double limit;
};

KneeShape knee_shape(const CompressorSpec& spec) {
  KneeShape k;
  k.s = std::isinf(spec.cr) ? 0.0 : 1.0 / spec.cr;
  k.c1 = spec.knee_low_db;
  k.g0 = spec.g0_db;
  k.limit = spec.limit_db;
  k.h = spec.smooth_db / 2.0;
  k.c2 = k.s > 0.0 ? k.c1 + (k.limit - k.g0 - k.c1) / k.s
                   : std::numeric_limits<double>::infinity();
  return k;
}

double knee_out_db(const KneeShape& k, double level_db) {
  const double L = level_db;
  if (k.h > 0.0) {
    if (L <= k.c1 - k.h) return k.g0 + L;
    if (L < k.c1 + k.h) {
      double d = L - k.c1 + k.h;
      return k.g0 + L + (k.s - 1.0) * d * d / (4.0 * k.h);
    }
    if (L <= k.c2 - k.h) return k.g0 + k.c1 + k.s * (L - k.c1);
    if (L < k.c2 + k.h) {
      double d = L - k.c2 + k.h;
      return k.g0 + k.c1 + k.s * (L - k.c1) - k.s * d * d / (4.0 * k.h);
    }
    return k.limit;
  }
  double y = k.g0 + std::min(L, k.c1 + k.s * (L - k.c1));
  return std::min(y, k.limit);
}

SlopeResult knee_slope(const KneeShape& k, double level_db) {
  const double L = level_db;
  SlopeResult r;
  if (k.h > 0.0) {
    double v;
    if (L <= k.c1 - k.h)
      v = 1.0;
    else if (L < k.c1 + k.h)
      v = 1.0 + (k.s - 1.0) * (L - k.c1 + k.h) / (2.0 * k.h);
    else if (L <= k.c2 - k.h)
      v = k.s;
    else if (L < k.c2 + k.h)
      v = k.s * (1.0 - (L - k.c2 + k.h) / (2.0 * k.h));
    else
      v = 0.0;
    r.value = r.left = r.right = v;
    return r;
  }
  bool at_c1 = std::abs(L - k.c1) < kCornerTolDb && k.s != 1.0;
  bool at_c2 = std::isfinite(k.c2) && std::abs(L - k.c2) < kCornerTolDb;
  if (at_c1 || at_c2) {
    r.left = at_c1 ? 1.0 : k.s;
    r.right = at_c2 ? 0.0 : k.s;
    if (at_c1 && at_c2) r.left = 1.0;  // degenerate: both corners coincide
    r.value = 0.5 * (r.left + r.right);
    r.differentiable = false;
    return r;
  }
  double v;
  if (L < k.c1)
    v = 1.0;
  else if (L < k.c2)
    v = k.s;
  else
    v = 0.0;
  r.value = r.left = r.right = v;
  return r;
}

[[noreturn]] void bad_spec(const std::string& what) {
  throw std::invalid_argument("compressor spec: " + what);
}

void check_ratio(double cr) {
  if (std::isnan(cr) || cr < 1.0)
    bad_spec("ratio must be >= 1, got " + std::to_string(cr));
}

}  // namespace

CompressorSpec CompressorSpec::linear(double gain_db) {
  CompressorSpec spec;
  spec.kind = CompressorKind::linear;
  spec.gain_db = gain_db;
  return spec;
}

CompressorSpec CompressorSpec::power_law(double cr, double g0_db) {
  check_ratio(cr);
  CompressorSpec spec;
  spec.kind = CompressorKind::power_law;
  spec.cr = cr;
  spec.g0_db = g0_db;
  return spec;
}

CompressorSpec CompressorSpec::knee(double g0_db, double knee_low_db, double cr,
                                    double limit_db, double smooth_db) {
  check_ratio(cr);
  if (limit_db < g0_db + knee_low_db)
    bad_spec("limit_db must be at least g0_db + knee_low_db");
  if (smooth_db < 0.0) bad_spec("smooth_db must be nonnegative");
  double s = std::isinf(cr) ? 0.0 : 1.0 / cr;
  if (smooth_db > 0.0 && s > 0.0 && s < 1.0) {
    double span = (limit_db - g0_db - knee_low_db) / s;
    if (span < smooth_db)
      bad_spec("smooth_db wider than the compression region");
  }
  CompressorSpec spec;
  spec.kind = CompressorKind::knee;
  spec.g0_db = g0_db;
  spec.knee_low_db = knee_low_db;
  spec.cr = cr;
  spec.limit_db = limit_db;
  spec.smooth_db = smooth_db;
  return spec;
}

CompressorSpec CompressorSpec::logarithmic(double scale, double offset) {
  if (!(scale > 0.0) || !(offset > 0.0))
    bad_spec("logarithmic needs positive scale and offset");
  CompressorSpec spec;
  spec.kind = CompressorKind::logarithmic;
  spec.scale = scale;
  spec.offset = offset;
  return spec;
}

Eigen::ArrayXd log_grid(const WorkingDomain& domain) {
  if (!(domain.v_min > 0.0) || !(domain.v_min < domain.v_max))
    throw std::invalid_argument("working domain needs 0 < v_min < v_max");
  if (domain.grid_points < 2)
    throw std::invalid_argument("working domain needs >= 2 grid points");
  const int n = domain.grid_points;
  Eigen::ArrayXd grid(n);
  double lo = std::log(domain.v_min), hi = std::log(domain.v_max);
  for (int i = 0; i < n; ++i)
    grid[i] = std::exp(lo + (hi - lo) * i / (n - 1));
  grid[0] = domain.v_min;
  grid[n - 1] = domain.v_max;
  return grid;
}

double compress_level(const CompressorSpec& spec, double v) {
  if (!(v > 0.0)) throw std::domain_error("compression input must be > 0");
  switch (spec.kind) {
    case CompressorKind::linear:
      return std::pow(10.0, spec.gain_db / 10.0) * v;
    case CompressorKind::power_law: {
      double exponent = std::isinf(spec.cr) ? 0.0 : 1.0 / spec.cr;
      return std::pow(10.0, spec.g0_db / 10.0) * std::pow(v, exponent);
    }
    case CompressorKind::knee: {
      double level_db = 10.0 * std::log10(v);
      return std::pow(10.0, knee_out_db(knee_shape(spec), level_db) / 10.0);
    }
    case CompressorKind::logarithmic:
      return spec.scale * std::log1p(v / spec.offset);
  }
  throw std::logic_error("unknown compressor kind");
}

double gain(const CompressorSpec& spec, double v) {
  return std::sqrt(compress_level(spec, v) / v);
}

SlopeResult compression_slope(const CompressorSpec& spec, double v) {
  if (!(v > 0.0)) throw std::domain_error("compression input must be > 0");
  SlopeResult r;
  switch (spec.kind) {
    case CompressorKind::linear:
      r.value = r.left = r.right = 1.0;
      return r;
    case CompressorKind::power_law: {
      double slope = std::isinf(spec.cr) ? 0.0 : 1.0 / spec.cr;
      r.value = r.left = r.right = slope;
      return r;
    }
    case CompressorKind::knee:
      return knee_slope(knee_shape(spec), 10.0 * std::log10(v));
    case CompressorKind::logarithmic: {
      // d ln C / d ln v of scale*ln(1+x) with x = v/offset.
      double x = v / spec.offset;
      double slope = x / ((1.0 + x) * std::log1p(x));
      r.value = r.left = r.right = slope;
      return r;
    }
  }
  throw std::logic_error("unknown compressor kind");
}

ValidationReport validate_compression(const CompressorSpec& spec,
                                      const WorkingDomain& domain, double tol) {
  Eigen::ArrayXd grid = log_grid(domain);
  const int n = domain.grid_points;
  Eigen::ArrayXd c(n);
  for (int i = 0; i < n; ++i) c[i] = compress_level(spec, grid[i]);

  ValidationReport report;
  report.nonnegative = (c >= 0.0).all();
  report.nondecreasing = true;
  for (int i = 0; i + 1 < n; ++i)
    if (c[i + 1] < c[i] - tol) report.nondecreasing = false;

  // Midpoint tests over every grid pair, with the midpoint taken in linear
  // power units (the curve itself supplies the midpoint value).
  double worst_concave = std::numeric_limits<double>::infinity();
  double worst_gain = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double u = grid[i], w = grid[j];
      double m = 0.5 * (u + w);
      double cm = compress_level(spec, m);
      worst_concave = std::min(worst_concave, cm - 0.5 * (c[i] + c[j]));
      double gm = cm / m;
      worst_gain =
          std::min(worst_gain, 0.5 * (c[i] / u + c[j] / w) - gm);
    }
  }
  report.worst_concavity_margin = worst_concave;
  report.worst_gain_convexity_margin = worst_gain;
  report.concave = worst_concave >= -tol;
  report.gain_convex = worst_gain >= -tol;
  return report;
}

}  // namespace drclab
