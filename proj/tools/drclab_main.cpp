// Command-line front end: one subcommand per experiment, shared flags for
// config file, master seed, and output directory. Exit code 0 means every
// internal consistency check passed.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "drclab/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "out";
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config, "JSON config overriding defaults")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", opts.seed, "master seed re-seeding every source")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  sub->add_option("--out", opts.out, "output directory");
}

drclab::ExperimentConfig resolve(const std::string& name,
                                 const CommonOpts& opts) {
  drclab::ExperimentConfig cfg = opts.config.empty()
                                     ? drclab::default_config(name)
                                     : drclab::load_config(name, opts.config);
  cfg.output_dir = opts.out;
  if (opts.seed_set) drclab::apply_overrides(cfg, opts.seed, opts.out);
  return cfg;
}

int run(const std::string& name, const CommonOpts& opts) {
  using namespace drclab;
  ExperimentConfig cfg = resolve(name, opts);
  if (name == "fig5") {
    Fig5Result r = run_fig5(cfg);
    std::cout << "rho_in avg " << r.rho_in.average << ", rho_out avg "
              << r.rho_out.average << "\n";
  } else if (name == "fig6") {
    Fig6Result r = run_fig6(cfg);
    for (std::size_t i = 0; i < r.snr_db.size(); ++i)
      std::cout << "snr " << r.snr_db[i] << " dB: ecr " << r.ecr[i]
                << ", median residual " << r.median_residual_db[i] << " dB\n";
  } else if (name == "fig7") {
    Fig7Result r = run_fig7(cfg);
    for (std::size_t c = 0; c < r.cr_list.size(); ++c) {
      std::cout << "cr " << r.cr_list[c] << ":";
      for (Eigen::Index p = 0; p < r.snr_out_db.rows(); ++p)
        std::cout << " " << r.snr_out_db(p, static_cast<Eigen::Index>(c));
      std::cout << "\n";
    }
  } else if (name == "fig8") {
    Fig8Result r = run_fig8(cfg);
    for (std::size_t k = 0; k < r.noise_types.size(); ++k) {
      std::cout << r.noise_types[k] << ":";
      for (Eigen::Index p = 0; p < r.delta_snr_db.rows(); ++p)
        std::cout << " " << r.delta_snr_db(p, static_cast<Eigen::Index>(k));
      std::cout << "\n";
    }
  } else if (name == "process") {
    ProcessResult r = run_process(cfg);
    std::cout << "decomposition error " << r.decomposition_error << "\n";
    if (r.decomposition_error > 1e-12) {
      std::cerr << "decomposition identity violated\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiband dynamic-range-compression laboratory"};
  app.require_subcommand(1);

  CommonOpts opts;
  const char* names[] = {"fig5", "fig6", "fig7", "fig8", "process"};
  const char* descs[] = {
      "two-source envelope correlation scatter",
      "effective-compression scatter and ratio sweep",
      "long-term SNR sweep across compression ratios",
      "SNR change for white, talker, and babble interferers",
      "compress configured sources and dump audio, gains, metrics"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], descs[i]), opts);

  CLI::App* theory = app.add_subcommand(
      "theory", "run every inequality checker batch and write a JSON report");
  std::uint64_t theory_seed = 12345;
  int theory_instances = 1000;
  std::string theory_out = "out";
  std::string theory_config;
  theory->add_option("--config", theory_config,
                     "accepted for flag uniformity; the inequality batches "
                     "take no experiment configuration")
      ->check(CLI::ExistingFile);
  theory->add_option("--seed", theory_seed, "master seed");
  theory->add_option("--instances", theory_instances,
                     "random instances per batch")
      ->check(CLI::PositiveNumber);
  theory->add_option("--out", theory_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (theory->parsed()) {
      drclab::TheorySuiteResult r = drclab::run_theory_suite(
          drclab::RngSeed{theory_seed}, theory_instances, theory_out);
      for (const auto& batch : r.batches)
        std::cout << batch.name << ": " << batch.instances << " instances, "
                  << batch.failures << " failures, " << batch.skipped
                  << " skipped\n";
      return r.all_hold ? 0 : 1;
    }
    for (const char* name : names)
      if (app.get_subcommand(name)->parsed()) return run(name, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
