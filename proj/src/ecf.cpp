#include "drclab/ecf.hpp"

#include <cmath>
#include <stdexcept>

namespace drclab {

double ecf(const EcfContext& ctx, double v1, double v2) {
  if (!(v1 > 0.0)) throw std::domain_error("ecf needs v1 > 0");
  if (!(v2 >= 0.0)) throw std::domain_error("ecf needs v2 >= 0");
  double vx = v1 + v2;
  return compress_level(ctx.spec, vx) / vx * v1;
}

SlopeResult effective_compression_slope(const EcfContext& ctx, double v1,
                                        double v2) {
  if (!(v1 > 0.0)) throw std::domain_error("ecf needs v1 > 0");
  if (!(v2 >= 0.0)) throw std::domain_error("ecf needs v2 >= 0");
  double vx = v1 + v2;
  SlopeResult base = compression_slope(ctx.spec, vx);
  // d ln ecf / d ln v1 at fixed v2: the mixture slope plus the share of the
  // mixture the other component contributes, CS + (v2/vx) * (1 - CS).
  double share = v2 / vx;
  SlopeResult out = base;
  out.value = base.value + share * (1.0 - base.value);
  out.left = base.left + share * (1.0 - base.left);
  out.right = base.right + share * (1.0 - base.right);
  return out;
}

GainField gain_field(const EcfContext& ctx, const WorkingDomain& v1_domain,
                     const WorkingDomain& v2_domain) {
  GainField field;
  field.v1 = log_grid(v1_domain);
  field.v2 = log_grid(v2_domain);
  field.gain_db.resize(field.v1.size(), field.v2.size());
  for (Eigen::Index i = 0; i < field.v1.size(); ++i) {
    for (Eigen::Index j = 0; j < field.v2.size(); ++j) {
      double vx = field.v1[i] + field.v2[j];
      field.gain_db(i, j) =
          10.0 * std::log10(compress_level(ctx.spec, vx) / vx);
    }
  }

  // Unity-gain fixed point C(v) = v over the combined level range, by scan
  // for a sign change of log-gain and bisection inside it.
  double lo = std::min(v1_domain.v_min, v2_domain.v_min);
  double hi = v1_domain.v_max + v2_domain.v_max;
  auto log_gain = [&](double v) {
    return std::log(compress_level(ctx.spec, v) / v);
  };
  field.equilibrium_level = std::numeric_limits<double>::quiet_NaN();
  const int scan = 256;
  double prev_v = lo, prev_f = log_gain(lo);
  for (int i = 1; i <= scan; ++i) {
    double v = lo * std::pow(hi / lo, static_cast<double>(i) / scan);
    double f = log_gain(v);
    if (prev_f == 0.0) {
      field.equilibrium_level = prev_v;
      break;
    }
    if ((prev_f > 0.0) != (f > 0.0)) {
      double a = prev_v, b = v;
      for (int iter = 0; iter < 200; ++iter) {
        double m = 0.5 * (a + b);
        if ((log_gain(m) > 0.0) == (prev_f > 0.0))
          a = m;
        else
          b = m;
      }
      field.equilibrium_level = 0.5 * (a + b);
      break;
    }
    prev_v = v;
    prev_f = f;
  }
  return field;
}

}  // namespace drclab
