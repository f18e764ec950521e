#include "drclab/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "drclab/csv.hpp"
#include "drclab/ecf.hpp"

namespace drclab {

double DiscreteRV::mean() const {
  long double m = 0.0L;
  for (Eigen::Index i = 0; i < support.size(); ++i)
    m += static_cast<long double>(probs[i]) * support[i];
  return static_cast<double>(m);
}

void validate(const DiscreteRV& rv) {
  if (rv.support.size() == 0 || rv.support.size() != rv.probs.size())
    throw std::invalid_argument("random variable needs matching nonempty "
                                "support and probabilities");
  for (Eigen::Index i = 0; i + 1 < rv.support.size(); ++i)
    if (!(rv.support[i] < rv.support[i + 1]))
      throw std::invalid_argument("support must be strictly increasing");
  if ((rv.probs < 0.0).any())
    throw std::invalid_argument("probabilities must be nonnegative");
  long double total = 0.0L;
  for (Eigen::Index i = 0; i < rv.probs.size(); ++i) total += rv.probs[i];
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities must sum to 1");
}

MonotonePair make_monotone_pair(const Eigen::ArrayXd& f,
                                const Eigen::ArrayXd& g) {
  if (f.size() != g.size() || f.size() == 0)
    throw std::invalid_argument("monotone pair needs equal nonempty sizes");
  for (Eigen::Index i = 0; i + 1 < f.size(); ++i) {
    if (f[i + 1] < f[i])
      throw std::invalid_argument("f must be nondecreasing");
    if (g[i + 1] > g[i])
      throw std::invalid_argument("g must be nonincreasing");
  }
  return {f, g};
}

Lemma2Result check_lemma2(const DiscreteRV& x, const MonotonePair& pair,
                          double tol) {
  validate(x);
  if (pair.f.size() != x.support.size())
    throw std::invalid_argument("pair does not match the support");
  long double e_fg = 0.0L, e_f = 0.0L, e_g = 0.0L;
  for (Eigen::Index i = 0; i < x.support.size(); ++i) {
    long double p = x.probs[i];
    e_fg += p * static_cast<long double>(pair.f[i]) * pair.g[i];
    e_f += p * pair.f[i];
    e_g += p * pair.g[i];
  }
  Lemma2Result result;
  result.lhs = static_cast<double>(e_fg);
  result.rhs = static_cast<double>(e_f * e_g);
  result.holds = result.lhs <= result.rhs + tol;
  return result;
}

Theorem1Result check_theorem1(const CompressorSpec& spec,
                              const DiscreteRV& v1, const DiscreteRV& v2,
                              double tol) {
  validate(v1);
  validate(v2);
  if ((v1.support <= 0.0).any() || (v2.support <= 0.0).any())
    throw std::invalid_argument("envelope supports must be positive");
  EcfContext ctx{spec, 0};
  const Eigen::Index n1 = v1.support.size(), n2 = v2.support.size();
  Eigen::ArrayXXd a(n1, n2), b(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      a(i, j) = ecf(ctx, v1.support[i], v2.support[j]);
      b(i, j) = ecf(ctx, v2.support[j], v1.support[i]);
    }
  }
  // Centered two-pass covariance in extended precision; the enumeration is
  // exact, so the only error left is accumulation roundoff.
  long double ea = 0.0L, eb = 0.0L;
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      long double w = static_cast<long double>(v1.probs[i]) * v2.probs[j];
      ea += w * a(i, j);
      eb += w * b(i, j);
    }
  }
  long double cov = 0.0L;
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      long double w = static_cast<long double>(v1.probs[i]) * v2.probs[j];
      cov += w * (a(i, j) - ea) * (b(i, j) - eb);
    }
  }
  Theorem1Result result;
  result.covariance = static_cast<double>(cov);
  result.holds = result.covariance <= tol;
  return result;
}

Theorem2Result check_theorem2(const CompressorSpec& spec,
                              const WorkingDomain& grid, double tol) {
  Eigen::ArrayXd points = log_grid(grid);
  EcfContext ctx{spec, 0};
  Theorem2Result result;
  result.worst_margin = std::numeric_limits<double>::infinity();
  result.worst_equality_gap = 0.0;

  for (Eigen::Index i = 0; i < points.size(); ++i) {
    for (Eigen::Index j = 0; j < points.size(); ++j) {
      double v1 = points[i], v2 = points[j];
      SlopeResult nominal = compression_slope(spec, v1 + v2);
      if (!nominal.differentiable) {
        ++result.points_skipped;
        continue;
      }
      SlopeResult effective = effective_compression_slope(ctx, v1, v2);
      result.worst_margin =
          std::min(result.worst_margin, effective.value - nominal.value);
      ++result.points_checked;
      if (spec.kind == CompressorKind::linear)
        result.worst_equality_gap =
            std::max(result.worst_equality_gap,
                     std::abs(effective.value - nominal.value));
    }
  }
  // v2 = 0 reduces the mixture to the component alone; the effective slope
  // must collapse to the plain compression slope.
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    SlopeResult nominal = compression_slope(spec, points[i]);
    if (!nominal.differentiable) {
      ++result.points_skipped;
      continue;
    }
    SlopeResult effective = effective_compression_slope(ctx, points[i], 0.0);
    result.worst_equality_gap =
        std::max(result.worst_equality_gap,
                 std::abs(effective.value - nominal.value));
    ++result.points_checked;
  }
  result.holds = result.worst_margin >= -tol && result.worst_equality_gap <= tol;
  return result;
}

Lemma3Result check_lemma3(const CompressorSpec& spec, const WorkingDomain& grid,
                          double tol) {
  Lemma3Result result;
  ValidationReport validation = validate_compression(spec, grid, tol);
  if (!validation.valid_compressor()) {
    result.skip_reason = "curve fails the compression-curve validation";
    return result;
  }
  if (!validation.gain_convex) {
    result.skip_reason =
        "gain function C(v)/v is not convex on the domain (worst midpoint "
        "margin " +
        format_double(validation.worst_gain_convexity_margin) + ")";
    return result;
  }
  result.precondition_ok = true;

  Eigen::ArrayXd points = log_grid(grid);
  EcfContext ctx{spec, 0};
  double worst_concave = std::numeric_limits<double>::infinity();
  double worst_convex = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < points.size(); ++k) {
    double fixed = points[k];
    for (Eigen::Index i = 0; i < points.size(); ++i) {
      for (Eigen::Index j = i + 1; j < points.size(); ++j) {
        double u = points[i], w = points[j], m = 0.5 * (u + w);
        // concave in the component level at fixed companion level
        double mid1 = ecf(ctx, m, fixed);
        double avg1 = 0.5 * (ecf(ctx, u, fixed) + ecf(ctx, w, fixed));
        worst_concave = std::min(worst_concave, mid1 - avg1);
        // convex in the companion level at fixed component level
        double mid2 = ecf(ctx, fixed, m);
        double avg2 = 0.5 * (ecf(ctx, fixed, u) + ecf(ctx, fixed, w));
        worst_convex = std::min(worst_convex, avg2 - mid2);
      }
    }
  }
  result.worst_concavity_margin = worst_concave;
  result.worst_convexity_margin = worst_convex;
  result.holds = worst_concave >= -tol && worst_convex >= -tol;
  return result;
}

Theorem3Result check_theorem3(const CompressorSpec& spec, const DiscreteRV& v1,
                              double v2_const, double tol) {
  validate(v1);
  Theorem3Result result;
  if (!(v2_const > 0.0)) {
    result.skip_reason = "interferer level must be positive";
    return result;
  }
  if ((v1.support <= 0.0).any()) {
    result.skip_reason = "target support must be positive";
    return result;
  }
  WorkingDomain domain;
  domain.v_min = 0.5 * std::min(v1.support[0], v2_const);
  domain.v_max = 2.0 * (v1.support[v1.support.size() - 1] + v2_const);
  domain.grid_points = 128;
  ValidationReport validation = validate_compression(spec, domain, 1e-9);
  if (!validation.valid_compressor() || !validation.gain_convex) {
    result.skip_reason = "curve is not gain-convex on the operating range";
    return result;
  }
  result.precondition_ok = true;

  EcfContext ctx{spec, 0};
  long double target_out = 0.0L, interf_out = 0.0L;
  for (Eigen::Index i = 0; i < v1.support.size(); ++i) {
    long double p = v1.probs[i];
    target_out += p * ecf(ctx, v1.support[i], v2_const);
    interf_out += p * ecf(ctx, v2_const, v1.support[i]);
  }
  result.snr_in = v1.mean() / v2_const;
  result.snr_out = static_cast<double>(target_out / interf_out);
  result.holds = result.snr_out <= result.snr_in * (1.0 + tol);
  return result;
}

namespace {

DiscreteRV drop_support_point(const DiscreteRV& rv, Eigen::Index index) {
  DiscreteRV out;
  const Eigen::Index n = rv.support.size();
  out.support.resize(n - 1);
  out.probs.resize(n - 1);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == index) continue;
    out.support[k] = rv.support[i];
    out.probs[k] = rv.probs[i];
    ++k;
  }
  double total = out.probs.sum();
  if (total <= 0.0) return rv;  // cannot renormalize, keep original
  out.probs /= total;
  return out;
}

DiscreteRV uniform_weights(const DiscreteRV& rv) {
  DiscreteRV out = rv;
  out.probs.setConstant(1.0 / static_cast<double>(rv.probs.size()));
  return out;
}

std::string describe(const DiscreteRV& rv) {
  std::string s = "{";
  for (Eigen::Index i = 0; i < rv.support.size(); ++i) {
    if (i) s += ", ";
    s += format_double(rv.support[i]) + ":" + format_double(rv.probs[i]);
  }
  return s + "}";
}

std::string describe(const CompressorSpec& spec) {
  switch (spec.kind) {
    case CompressorKind::linear:
      return "linear(gain_db=" + format_double(spec.gain_db) + ")";
    case CompressorKind::power_law:
      return "power_law(cr=" + format_double(spec.cr) +
             ", g0_db=" + format_double(spec.g0_db) + ")";
    case CompressorKind::knee:
      return "knee(g0_db=" + format_double(spec.g0_db) +
             ", knee_low_db=" + format_double(spec.knee_low_db) +
             ", cr=" + format_double(spec.cr) +
             ", limit_db=" + format_double(spec.limit_db) +
             ", smooth_db=" + format_double(spec.smooth_db) + ")";
    case CompressorKind::logarithmic:
      return "logarithmic(scale=" + format_double(spec.scale) +
             ", offset=" + format_double(spec.offset) + ")";
  }
  return "unknown";
}

double log_uniform(SplitMix64& rng, double lo, double hi) {
  return std::exp(std::log(lo) +
                  rng.next_uniform() * (std::log(hi) - std::log(lo)));
}

DiscreteRV random_rv(SplitMix64& rng, int max_support, double lo, double hi) {
  int k = 2 + static_cast<int>(rng.next_u64() %
                               static_cast<std::uint64_t>(max_support - 1));
  DiscreteRV rv;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> values(static_cast<std::size_t>(k));
    for (auto& v : values) v = log_uniform(rng, lo, hi);
    std::sort(values.begin(), values.end());
    bool distinct = true;
    for (int i = 0; i + 1 < k; ++i)
      if (values[static_cast<std::size_t>(i + 1)] <=
          values[static_cast<std::size_t>(i)] * (1.0 + 1e-9))
        distinct = false;
    if (!distinct) continue;
    rv.support =
        Eigen::Map<Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(k));
    break;
  }
  if (rv.support.size() == 0)
    throw std::runtime_error("failed to draw a distinct support");
  rv.probs.resize(k);
  for (int i = 0; i < k; ++i) rv.probs[i] = rng.next_uniform();
  rv.probs /= rv.probs.sum();
  return rv;
}

CompressorSpec random_theorem1_spec(SplitMix64& rng, int index) {
  double g0_db = -6.0 + 12.0 * rng.next_uniform();
  if (index % 10 == 0) return CompressorSpec::linear(g0_db);
  constexpr double ratios[] = {1.0, 2.0, 3.0, 5.0,
                               std::numeric_limits<double>::infinity()};
  double cr = ratios[rng.next_u64() % 5];
  return CompressorSpec::power_law(cr, g0_db);
}

CompressorSpec random_theorem3_spec(SplitMix64& rng) {
  if (rng.next_u64() % 4 == 0)
    return CompressorSpec::logarithmic(0.5 + 3.5 * rng.next_uniform(),
                                       log_uniform(rng, 1e-2, 1e1));
  constexpr double ratios[] = {1.0, 1.5, 2.0, 3.0, 5.0};
  double g0_db = -6.0 + 12.0 * rng.next_uniform();
  return CompressorSpec::power_law(ratios[rng.next_u64() % 5], g0_db);
}

class Timer {
 public:
  double elapsed_s() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

}  // namespace

std::pair<DiscreteRV, DiscreteRV> shrink_instance(
    DiscreteRV v1, DiscreteRV v2,
    const std::function<bool(const DiscreteRV&, const DiscreteRV&)>& fails) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int which = 0; which < 2; ++which) {
      DiscreteRV& rv = which == 0 ? v1 : v2;
      for (Eigen::Index i = 0; i < rv.support.size() && rv.support.size() > 1;) {
        DiscreteRV candidate = drop_support_point(rv, i);
        DiscreteRV& other = which == 0 ? v2 : v1;
        bool still_fails = which == 0 ? fails(candidate, other)
                                      : fails(other, candidate);
        if (still_fails && candidate.support.size() < rv.support.size()) {
          rv = candidate;
          changed = true;
        } else {
          ++i;
        }
      }
    }
    for (int which = 0; which < 2; ++which) {
      DiscreteRV& rv = which == 0 ? v1 : v2;
      DiscreteRV candidate = uniform_weights(rv);
      DiscreteRV& other = which == 0 ? v2 : v1;
      bool still_fails =
          which == 0 ? fails(candidate, other) : fails(other, candidate);
      if (still_fails && (candidate.probs != rv.probs).any()) {
        rv = candidate;
        changed = true;
      }
    }
  }
  return {v1, v2};
}

BatchReport run_lemma2_batch(RngSeed seed, int instances) {
  Timer timer;
  BatchReport report;
  report.name = "lemma2";
  report.instances = instances;
  report.worst_margin = std::numeric_limits<double>::infinity();
  SplitMix64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    DiscreteRV x = random_rv(rng, 6, 1e-2, 1e2);
    const Eigen::Index k = x.support.size();
    // Monotone step functions from cumulative nonnegative increments.
    Eigen::ArrayXd f(k), g(k);
    double acc_f = -5.0 + 10.0 * rng.next_uniform();
    double acc_g = -5.0 + 10.0 * rng.next_uniform();
    for (Eigen::Index j = 0; j < k; ++j) {
      f[j] = acc_f;
      g[j] = acc_g;
      acc_f += 3.0 * rng.next_uniform();
      acc_g -= 3.0 * rng.next_uniform();
    }
    MonotonePair pair = make_monotone_pair(f, g);
    Lemma2Result result = check_lemma2(x, pair);
    report.worst_margin =
        std::min(report.worst_margin, result.rhs - result.lhs);
    if (!result.holds) {
      ++report.failures;
      report.failure_descriptions.push_back(
          "X=" + describe(x) + " lhs=" + format_double(result.lhs) +
          " rhs=" + format_double(result.rhs));
    }
  }
  report.elapsed_s = timer.elapsed_s();
  return report;
}

BatchReport run_theorem1_batch(RngSeed seed, int instances) {
  Timer timer;
  BatchReport report;
  report.name = "theorem1";
  report.instances = instances;
  report.worst_margin = -std::numeric_limits<double>::infinity();
  SplitMix64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    CompressorSpec spec = random_theorem1_spec(rng, i);
    DiscreteRV v1 = random_rv(rng, 6, 1e-2, 1e2);
    DiscreteRV v2 = random_rv(rng, 6, 1e-2, 1e2);
    Theorem1Result result = check_theorem1(spec, v1, v2);
    // For this theorem the margin is the covariance itself; it must stay
    // below the tolerance, and a linear curve must sit at zero both ways.
    report.worst_margin = std::max(report.worst_margin, result.covariance);
    bool ok = result.holds;
    if (spec.kind == CompressorKind::linear)
      ok = ok && std::abs(result.covariance) <= 1e-12;
    if (!ok) {
      ++report.failures;
      auto fails = [&spec](const DiscreteRV& a, const DiscreteRV& b) {
        Theorem1Result r = check_theorem1(spec, a, b);
        return !r.holds;
      };
      auto [s1, s2] = shrink_instance(v1, v2, fails);
      report.failure_descriptions.push_back(
          describe(spec) + " V1=" + describe(s1) + " V2=" + describe(s2) +
          " cov=" + format_double(check_theorem1(spec, s1, s2).covariance));
    }
  }
  report.elapsed_s = timer.elapsed_s();
  return report;
}

BatchReport run_theorem2_batch() {
  Timer timer;
  BatchReport report;
  report.name = "theorem2";
  report.worst_margin = std::numeric_limits<double>::infinity();
  WorkingDomain grid{1e-6, 1e2, 64};
  const std::vector<CompressorSpec> specs = {
      CompressorSpec::linear(0.0),
      CompressorSpec::linear(5.5),
      CompressorSpec::power_law(1.5, -3.0),
      CompressorSpec::power_law(2.0, 0.0),
      CompressorSpec::power_law(3.0, 0.0),
      CompressorSpec::power_law(5.0, 2.0),
      CompressorSpec::power_law(kInfiniteRatio, 0.0),
      CompressorSpec::logarithmic(1.0, 0.1),
      CompressorSpec::logarithmic(2.5, 1.0),
      CompressorSpec::knee(0.0, -30.0, 3.0, 20.0, 0.0),
      CompressorSpec::knee(0.0, -30.0, 3.0, 20.0, 10.0),
  };
  for (const auto& spec : specs) {
    ++report.instances;
    Theorem2Result result = check_theorem2(spec, grid);
    report.worst_margin = std::min(report.worst_margin, result.worst_margin);
    if (!result.holds) {
      ++report.failures;
      report.failure_descriptions.push_back(
          describe(spec) + " worst_margin=" +
          format_double(result.worst_margin) + " equality_gap=" +
          format_double(result.worst_equality_gap));
    }
  }
  report.elapsed_s = timer.elapsed_s();
  return report;
}

BatchReport run_lemma3_batch() {
  Timer timer;
  BatchReport report;
  report.name = "lemma3";
  report.worst_margin = std::numeric_limits<double>::infinity();
  WorkingDomain grid{1e-6, 1e2, 64};
  struct Case {
    CompressorSpec spec;
    bool expect_pass;
  };
  const std::vector<Case> cases = {
      {CompressorSpec::linear(0.0), true},
      {CompressorSpec::power_law(2.0, 0.0), true},
      {CompressorSpec::power_law(3.0, 1.5), true},
      {CompressorSpec::logarithmic(1.0, 0.1), true},
      {CompressorSpec::logarithmic(2.5, 1.0), true},
      // Corner curves are valid compressors but not gain-convex; the check
      // must refuse them rather than assert on them.
      {CompressorSpec::knee(0.0, -30.0, 3.0, 20.0, 0.0), false},
      {CompressorSpec::knee(0.0, -30.0, 3.0, 20.0, 10.0), false},
  };
  for (const auto& c : cases) {
    ++report.instances;
    Lemma3Result result = check_lemma3(c.spec, grid);
    if (c.expect_pass) {
      report.worst_margin =
          std::min({report.worst_margin, result.worst_concavity_margin,
                    result.worst_convexity_margin});
      if (!result.precondition_ok || !result.holds) {
        ++report.failures;
        report.failure_descriptions.push_back(
            describe(c.spec) + " " +
            (result.precondition_ok
                 ? "margins " + format_double(result.worst_concavity_margin) +
                       "/" + format_double(result.worst_convexity_margin)
                 : "unexpected skip: " + result.skip_reason));
      }
    } else {
      if (result.precondition_ok) {
        ++report.failures;
        report.failure_descriptions.push_back(
            describe(c.spec) + " was expected to fail the gain-convexity "
                               "precondition but passed");
      } else {
        ++report.skipped;
      }
    }
  }
  report.elapsed_s = timer.elapsed_s();
  return report;
}

BatchReport run_theorem3_batch(RngSeed seed, int instances) {
  Timer timer;
  BatchReport report;
  report.name = "theorem3";
  report.instances = instances;
  report.worst_margin = std::numeric_limits<double>::infinity();
  SplitMix64 rng(seed);
  for (int i = 0; i < instances; ++i) {
    CompressorSpec spec = random_theorem3_spec(rng);
    DiscreteRV v1 = random_rv(rng, 6, 1e-2, 1e2);
    double v2 = log_uniform(rng, 1e-2, 1e2);
    Theorem3Result result = check_theorem3(spec, v1, v2);
    if (!result.precondition_ok) {
      ++report.skipped;
      continue;
    }
    report.worst_margin =
        std::min(report.worst_margin, result.snr_in - result.snr_out);
    if (!result.holds) {
      ++report.failures;
      auto fails = [&spec, v2](const DiscreteRV& a, const DiscreteRV&) {
        Theorem3Result r = check_theorem3(spec, a, v2);
        return r.precondition_ok && !r.holds;
      };
      auto [s1, s2] = shrink_instance(v1, v1, fails);
      (void)s2;
      Theorem3Result shrunk = check_theorem3(spec, s1, v2);
      report.failure_descriptions.push_back(
          describe(spec) + " V1=" + describe(s1) + " v2=" + format_double(v2) +
          " snr_in=" + format_double(shrunk.snr_in) +
          " snr_out=" + format_double(shrunk.snr_out));
    }
  }
  report.elapsed_s = timer.elapsed_s();
  return report;
}

std::string to_json(const BatchReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["instances"] = report.instances;
  j["failures"] = report.failures;
  j["skipped"] = report.skipped;
  j["worst_margin"] = report.worst_margin;
  j["elapsed_s"] = report.elapsed_s;
  j["failure_instances"] = report.failure_descriptions;
  return j.dump(2);
}

}  // namespace drclab
