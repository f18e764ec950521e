#pragma once

#include <Eigen/Core>
#include <vector>

#include "drclab/compression.hpp"

namespace drclab {

/// Compression curve of one band for effective-compression analysis.
struct EcfContext {
  CompressorSpec spec;
  int channel = 0;
};

/// Output level of a component at level v1 mixed with a component at level
/// v2, when the gain is driven by the mixture level:
///   C(v1 + v2) / (v1 + v2) * v1.
/// Throws std::domain_error for v1 <= 0; v2 = 0 reduces to C(v1).
double ecf(const EcfContext& ctx, double v1, double v2);

/// Log-log slope of ecf in v1 at fixed v2, evaluated in closed form:
///   CS(vx) + (v2 / vx) * (1 - CS(vx)),  vx = v1 + v2,
/// where CS is the compression slope of the underlying curve. Inherits the
/// non-differentiable flag at knee corners of vx.
SlopeResult effective_compression_slope(const EcfContext& ctx, double v1,
                                        double v2);

/// Mixture gain 10*log10(C(v1+v2)/(v1+v2)) tabulated over a (v1, v2) grid.
/// equilibrium_level is the fixed point C(v) = v (unity gain), found by
/// bisection over the combined domain; NaN when no sign change exists (e.g.
/// linear curves with nonzero gain).
struct GainField {
  Eigen::ArrayXd v1;        // grid values, power units
  Eigen::ArrayXd v2;
  Eigen::ArrayXXd gain_db;  // (v1.size(), v2.size())
  double equilibrium_level = 0.0;
};

GainField gain_field(const EcfContext& ctx, const WorkingDomain& v1_domain,
                     const WorkingDomain& v2_domain);

}  // namespace drclab
