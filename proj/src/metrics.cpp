#include "drclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace drclab {

namespace {

void finalize_average(PerBandStat& stat) {
  double sum = 0.0;
  stat.defined_count = 0;
  for (Eigen::Index b = 0; b < stat.values.size(); ++b) {
    if (stat.defined[static_cast<std::size_t>(b)]) {
      sum += stat.values[b];
      ++stat.defined_count;
    }
  }
  stat.average = stat.defined_count > 0 ? sum / stat.defined_count
                                        : std::numeric_limits<double>::quiet_NaN();
}

Eigen::ArrayXd to_db(const Eigen::ArrayXd& power) {
  return 10.0 * power.log10();
}

void check_aligned(const EnvelopeTrack& a, const EnvelopeTrack& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw std::invalid_argument("envelope tracks are not aligned");
  if (a.values.size() == 0) throw std::invalid_argument("empty envelope track");
}

}  // namespace

double percentile(const Eigen::ArrayXd& samples, double p) {
  if (samples.size() == 0) throw std::invalid_argument("empty sample set");
  if (!(p >= 0.0) || !(p <= 100.0))
    throw std::invalid_argument("percentile must lie in [0, 100]");
  std::vector<double> sorted(samples.data(), samples.data() + samples.size());
  std::sort(sorted.begin(), sorted.end());
  double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
  auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

PerBandStat envelope_correlation(const EnvelopeTrack& a,
                                 const EnvelopeTrack& b) {
  check_aligned(a, b);
  const Eigen::Index bands = a.values.cols();
  PerBandStat stat;
  stat.values.resize(bands);
  stat.defined.assign(static_cast<std::size_t>(bands), false);
  for (Eigen::Index band = 0; band < bands; ++band) {
    Eigen::ArrayXd x = to_db(a.values.col(band).eval());
    Eigen::ArrayXd y = to_db(b.values.col(band).eval());
    Eigen::ArrayXd xc = x - x.mean();
    Eigen::ArrayXd yc = y - y.mean();
    double sxx = (xc * xc).sum();
    double syy = (yc * yc).sum();
    // A constant track must come out undefined even when mean subtraction
    // leaves rounding residue, so test the actual spread as well.
    bool degenerate = x.maxCoeff() == x.minCoeff() || y.maxCoeff() == y.minCoeff();
    if (degenerate || sxx <= 0.0 || syy <= 0.0) {
      stat.values[band] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double rho = (xc * yc).sum() / std::sqrt(sxx * syy);
    stat.values[band] = std::clamp(rho, -1.0, 1.0);
    stat.defined[static_cast<std::size_t>(band)] = true;
  }
  finalize_average(stat);
  return stat;
}

PerBandStat dynamic_range_db(const EnvelopeTrack& track) {
  if (track.values.size() == 0)
    throw std::invalid_argument("empty envelope track");
  const Eigen::Index bands = track.values.cols();
  PerBandStat stat;
  stat.values.resize(bands);
  stat.defined.assign(static_cast<std::size_t>(bands), true);
  for (Eigen::Index band = 0; band < bands; ++band) {
    Eigen::ArrayXd db = to_db(track.values.col(band).eval());
    stat.values[band] = percentile(db, 95.0) - percentile(db, 5.0);
  }
  finalize_average(stat);
  return stat;
}

PerBandStat effective_compression_ratio(const EnvelopeTrack& env_in,
                                        const EnvelopeTrack& env_out) {
  check_aligned(env_in, env_out);
  PerBandStat dr_in = dynamic_range_db(env_in);
  PerBandStat dr_out = dynamic_range_db(env_out);
  const Eigen::Index bands = env_in.values.cols();
  PerBandStat stat;
  stat.values.resize(bands);
  stat.defined.assign(static_cast<std::size_t>(bands), false);
  for (Eigen::Index band = 0; band < bands; ++band) {
    if (dr_out.values[band] <= 0.0) {
      stat.values[band] = std::numeric_limits<double>::infinity();
      continue;
    }
    stat.values[band] = dr_in.values[band] / dr_out.values[band];
    stat.defined[static_cast<std::size_t>(band)] = true;
  }
  finalize_average(stat);
  return stat;
}

PerBandStat long_term_snr(const EnvelopeTrack& target,
                          const EnvelopeTrack& interferer) {
  check_aligned(target, interferer);
  const Eigen::Index bands = target.values.cols();
  PerBandStat stat;
  stat.values.resize(bands);
  stat.defined.assign(static_cast<std::size_t>(bands), false);
  // A band whose interferer never rises above the detector floor has no
  // meaningful SNR; 1e-6 relative headroom separates "at floor" from quiet.
  double floor_cut = interferer.floor_power * (1.0 + 1e-6);
  for (Eigen::Index band = 0; band < bands; ++band) {
    double mt = target.values.col(band).mean();
    double mi = interferer.values.col(band).mean();
    if (mi <= floor_cut) {
      stat.values[band] = std::numeric_limits<double>::infinity();
      continue;
    }
    stat.values[band] = 10.0 * std::log10(mt / mi);
    stat.defined[static_cast<std::size_t>(band)] = true;
  }
  finalize_average(stat);
  return stat;
}

MetricsReport compute_metrics(const MixtureRun& run) {
  if (run.env_in.size() < 2)
    throw std::invalid_argument("metrics need at least two components");
  MetricsReport report;
  report.rho_in = envelope_correlation(run.env_in[0], run.interferer_env_in);
  report.rho_out = envelope_correlation(run.env_out[0], run.interferer_env_out);
  report.ecr = effective_compression_ratio(run.env_in[0], run.env_out[0]);
  report.snr_in_db = long_term_snr(run.env_in[0], run.interferer_env_in);
  report.snr_out_db = long_term_snr(run.env_out[0], run.interferer_env_out);
  report.dr_in_db = dynamic_range_db(run.env_in[0]);
  report.dr_out_db = dynamic_range_db(run.env_out[0]);
  return report;
}

}  // namespace drclab
