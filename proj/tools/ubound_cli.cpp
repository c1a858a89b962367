// ubound: parameter derivation, bound sweeps and oracle suites.
//
//   ubound derive [--config PATH] [--convention paper-table] [--key=value ...]
//   ubound sweep  [--trials N] [--workers N] [--seed S] [--out DIR] ...
//   ubound oracle ...
//
// Settings resolve as: command line > UB_<KEY> environment > config file > defaults.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ub/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitOracle = 2;

struct CommonFlags {
  std::string config;
  std::string seed, trials, workers, convention, out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value settings file")->envname("UB_CONFIG");
  cmd->add_option("--seed", f.seed, "master seed (u64)");
  cmd->add_option("--trials", f.trials, "Monte Carlo trials");
  cmd->add_option("--workers", f.workers, "OpenMP threads");
  cmd->add_option("--convention", f.convention, "subcarrier spacing convention: cyclic|paper-table");
  cmd->add_option("--out", f.out, "output directory");
  cmd->allow_extras();
}

// Remaining `--key=value` or `--key value` arguments become overrides.
void apply_extras(const std::vector<std::string>& extras, ub::ConfigLayers& layers) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw ub::ConfigError(arg, "unexpected argument");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      layers.set(arg.substr(2, eq - 2), arg.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      layers.set(arg.substr(2), extras[++i]);
    } else {
      throw ub::ConfigError(arg.substr(2), "missing value");
    }
  }
}

ub::ExperimentConfig resolve(const CommonFlags& f, const std::vector<std::string>& extras) {
  ub::ConfigLayers layers;
  if (!f.config.empty()) layers.load_file(f.config);
  layers.load_env();
  const std::pair<const char*, const std::string*> named[] = {
      {"seed", &f.seed},       {"trials", &f.trials}, {"workers", &f.workers},
      {"convention", &f.convention}, {"out", &f.out}};
  for (const auto& [key, value] : named) {
    if (!value->empty()) layers.set(key, *value);
  }
  apply_extras(extras, layers);
  return ub::ExperimentConfig::from(layers);
}

void echo_config(const ub::ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out);
  std::ofstream(cfg.out / "config.effective.txt") << cfg.to_text();
}

int run_derive(const ub::ExperimentConfig& cfg) {
  const ub::ParameterReport report = ub::derive_parameters(cfg);
  echo_config(cfg);
  ub::write_parameter_report(report, cfg, cfg.out);
  for (const auto& r : report.rows) {
    std::printf("%-20s %-24.10g %s\n", r.name.c_str(), r.value, r.unit.c_str());
  }
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return 0;
}

int run_sweep(const ub::ExperimentConfig& cfg) {
  const ub::SweepResult sweep = ub::run_bound_sweep(cfg);
  echo_config(cfg);
  ub::write_sweep(sweep, cfg, cfg.out);
  std::printf("%10s %14s %14s %14s %10s\n", "N", "L2B", "C_csi", "L2B/C_csi", "seconds");
  for (const auto& r : sweep.rows) {
    std::printf("%10lld %14.8g %14.8g %14.8g %10.3f\n", r.n, r.bounds.l2b.value, r.bounds.c_csi,
                r.bounds.fraction_of_csi.value, r.wall_time_s);
  }
  if (!sweep.fraction_monotone) {
    std::fprintf(stderr, "warning: fraction_of_csi decreased by more than 3 SE between points\n");
  }
  return 0;
}

int run_oracle(const ub::ExperimentConfig& cfg) {
  const auto checks = ub::run_oracle_suite(cfg);
  echo_config(cfg);
  ub::write_oracle_report(checks, cfg.out);
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-4s %-34s measured=%-12.4g tolerance=%g\n", c.passed ? "ok" : "FAIL",
                c.name.c_str(), c.measured, c.tolerance);
    if (!c.passed) {
      ok = false;
      std::fprintf(stderr, "oracle check failed: %s (%s)\n", c.name.c_str(), c.detail.c_str());
    }
  }
  return ok ? 0 : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity lower bounds for underspread WSSUS fading channels"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* derive = app.add_subcommand("derive", "derive channel and grid parameters");
  CLI::App* sweep = app.add_subcommand("sweep", "estimate bounds over a range of subcarrier counts");
  CLI::App* oracle = app.add_subcommand("oracle", "run the validation oracle suites");
  for (CLI::App* cmd : {derive, sweep, oracle}) add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const ub::ExperimentConfig cfg = resolve(flags, cmd->remaining());
    if (cmd == derive) return run_derive(cfg);
    if (cmd == sweep) return run_sweep(cfg);
    return run_oracle(cfg);
  } catch (const ub::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
