#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "drclab/engine.hpp"
#include "drclab/metrics.hpp"
#include "drclab/theory.hpp"

namespace drclab {

/// One signal source: a seeded generator or a WAV file.
struct SourceSpec {
  enum class Kind { white, speechlike, wav };
  Kind kind = Kind::speechlike;
  double level_db = 0.0;
  std::uint64_t seed = 1;
  std::string path;          // wav only
  SpeechlikeParams speech;   // speechlike only
};

struct ExperimentConfig {
  std::string name;
  DrcConfig drc;
  std::vector<SourceSpec> sources;
  std::vector<double> snr_sweep_db;  // interpreted per experiment
  std::vector<double> cr_list;       // compression ratios to sweep
  double duration_s = 10.0;
  // Detector and filter settling time excluded from all statistics. The
  // detector starts from the first power sample; at high compression ratios
  // the release tail of that arbitrary initial state would otherwise
  // dominate long-term envelope means.
  double settle_s = 0.5;
  std::string output_dir = ".";
};

SignalBuffer realize_source(const SourceSpec& src, double duration_s,
                            int sample_rate);

/// Envelope-pair scatter and correlation for a two-source mixture. Writes
/// <out>/<name>_scatter.csv with dB envelope pairs (axes shifted so the mean
/// input envelope of each band sits at 0 dB) and <out>/<name>_rho.csv with
/// per-band and average correlations.
struct Fig5Result {
  PerBandStat rho_in;
  PerBandStat rho_out;
};

Fig5Result run_fig5(const ExperimentConfig& cfg);

/// Measured effective-compression scatter of the target against the
/// closed-form curve at each SNR, plus the effective-compression-ratio
/// table. Writes <name>_measured_<snr>.csv, <name>_theory_<snr>.csv,
/// <name>_ecr.csv.
struct Fig6Result {
  std::vector<double> snr_db;
  std::vector<double> ecr;          // band-averaged, one per SNR
  std::vector<double> median_residual_db;  // measured vs curve at each SNR
};

Fig6Result run_fig6(const ExperimentConfig& cfg);

/// Output SNR against input SNR for each compression ratio. The white-noise
/// interferer is the constant-envelope case: its band envelopes are held at
/// their time averages and the output levels follow the closed-form
/// effective compression of the measured target envelopes, so the curves
/// isolate the compression effect from envelope-estimation noise. Writes
/// <name>_cr<ratio>.csv rows (snr_nominal_db, snr_in_db, snr_out_db).
struct Fig7Result {
  std::vector<double> cr_list;
  std::vector<double> snr_in_db;           // measured, one per sweep point
  Eigen::ArrayXXd snr_out_db;              // (sweep, cr)
};

Fig7Result run_fig7(const ExperimentConfig& cfg);

/// SNR change against input SNR for three interferer types: white noise
/// (constant-envelope treatment as in run_fig7), one competing speechlike
/// talker, and a premixed many-talker babble (both with fully time-varying
/// envelopes). Writes <name>_<type>.csv rows (snr_nominal_db, snr_in_db,
/// snr_out_db, delta_snr_db).
struct Fig8Result {
  std::vector<std::string> noise_types;
  std::vector<double> snr_nominal_db;
  Eigen::ArrayXXd delta_snr_db;            // (sweep, noise_types)
};

Fig8Result run_fig8(const ExperimentConfig& cfg);

/// All inequality checkers at batch scale. Writes theory_report.json.
struct TheorySuiteResult {
  std::vector<BatchReport> batches;
  bool all_hold = false;
};

TheorySuiteResult run_theory_suite(RngSeed seed, int instances,
                                   const std::string& output_dir);

/// Plain processing run: compress the configured sources as one mixture and
/// dump outputs (y.wav, r<i>.wav), gains.csv, envelopes.csv, metrics.csv.
struct ProcessResult {
  MetricsReport metrics;
  double decomposition_error = 0.0;  // max |y - sum r_i|
};

ProcessResult run_process(const ExperimentConfig& cfg);

/// Baseline configs for each experiment name (fig5, fig6, fig7, fig8,
/// process); JSON files override individual fields.
ExperimentConfig default_config(const std::string& experiment);

/// Parses a JSON config file over the defaults for `experiment`.
ExperimentConfig load_config(const std::string& experiment,
                             const std::string& path);

std::string to_json_string(const ExperimentConfig& cfg);

/// Re-seeds every source deterministically from one master seed (source i
/// gets substream i) and redirects output.
void apply_overrides(ExperimentConfig& cfg, std::uint64_t seed,
                     const std::string& out_dir);

/// Writes the fully resolved config JSON into the output directory so every
/// artifact records its provenance.
void write_resolved_config(const ExperimentConfig& cfg);

}  // namespace drclab
