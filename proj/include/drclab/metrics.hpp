#pragma once

#include <Eigen/Core>
#include <vector>

#include "drclab/engine.hpp"

namespace drclab {

/// Per-band statistic with an explicit defined flag per band (undefined on
/// degenerate inputs, e.g. zero-variance envelopes). average covers defined
/// bands only, unweighted.
struct PerBandStat {
  Eigen::ArrayXd values;
  std::vector<bool> defined;
  double average = 0.0;
  int defined_count = 0;
};

/// p-th percentile (0..100) by linear interpolation on sorted samples.
double percentile(const Eigen::ArrayXd& samples, double p);

/// Pearson correlation of the dB-scale envelope samples, per band. A band
/// with zero variance on either side is flagged undefined and excluded from
/// the average.
PerBandStat envelope_correlation(const EnvelopeTrack& a,
                                 const EnvelopeTrack& b);

/// 95th minus 5th percentile of the dB envelope samples, per band.
PerBandStat dynamic_range_db(const EnvelopeTrack& track);

/// Input dynamic range over output dynamic range, per band. Degenerate
/// (zero) output range flags the band undefined with value +inf.
PerBandStat effective_compression_ratio(const EnvelopeTrack& env_in,
                                        const EnvelopeTrack& env_out);

/// 10*log10(mean target envelope / mean interferer envelope), per band.
/// Bands where the interferer never rises above the envelope floor are
/// flagged.
PerBandStat long_term_snr(const EnvelopeTrack& target,
                          const EnvelopeTrack& interferer);

/// Full metric set of a two-or-more-component run: component 0 is the target
/// and the rest form the interferer. Envelope correlations are between the
/// target and the summed interferer components.
struct MetricsReport {
  PerBandStat rho_in;
  PerBandStat rho_out;
  PerBandStat ecr;
  PerBandStat snr_in_db;
  PerBandStat snr_out_db;
  PerBandStat dr_in_db;
  PerBandStat dr_out_db;
};

MetricsReport compute_metrics(const MixtureRun& run);

}  // namespace drclab
