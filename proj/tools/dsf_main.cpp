#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsf/complexity.hpp"
#include "dsf/dskf.hpp"
#include "dsf/equivalence.hpp"
#include "dsf/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct Range {
  dsf::Index lo = 1;
  dsf::Index hi = 1;
};

// Inclusive "a..b" range, or a single value "a".
bool parse_range(const std::string& text, Range& out) {
  const std::size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      out.lo = out.hi = std::stoi(text);
    } else {
      out.lo = std::stoi(text.substr(0, dots));
      out.hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    return false;
  }
  return out.lo >= 1 && out.hi >= out.lo;
}

int cmd_equiv(const std::string& n_text, const std::string& m_text, int steps, int trials,
              std::uint64_t seed, double tol) {
  Range n_range, m_range;
  if (!parse_range(n_text, n_range) || !parse_range(m_text, m_range)) {
    std::fprintf(stderr, "equiv: ranges must be 'a..b' with 1 <= a <= b\n");
    return kExitUsage;
  }
  if (steps < 1 || trials < 1) {
    std::fprintf(stderr, "equiv: --steps and --trials must be positive\n");
    return kExitUsage;
  }

  dsf::EquivalenceOptions options;
  options.steps = steps;
  options.trials = trials;
  options.seed = seed;
  options.check_oracle = true;

  const auto cells =
      dsf::equivalence_sweep(n_range.lo, n_range.hi, m_range.lo, m_range.hi, options);

  const double batch_tol = 10.0 * tol;
  std::printf("%3s %3s %7s %8s  %12s %12s %12s %12s %12s %12s\n", "n", "m", "trials", "updates",
              "sc_dskf_mean", "sc_dskf_cov", "oracle_mean", "oracle_cov", "batch_mean",
              "batch_cov");
  bool ok = true;
  for (const auto& cell : cells) {
    std::printf("%3d %3d %7d %8d  %12.3e %12.3e %12.3e %12.3e %12.3e %12.3e\n", cell.n, cell.m,
                cell.trials, cell.updates, cell.max_mean_diff, cell.max_cov_diff,
                cell.max_oracle_mean_diff, cell.max_oracle_cov_diff, cell.max_batch_mean_diff,
                cell.max_batch_cov_diff);
    const bool cell_ok = cell.max_mean_diff <= tol && cell.max_cov_diff <= tol &&
                         cell.max_oracle_mean_diff <= tol && cell.max_oracle_cov_diff <= tol &&
                         cell.max_batch_mean_diff <= batch_tol &&
                         cell.max_batch_cov_diff <= batch_tol;
    if (!cell_ok) {
      std::printf("violation at n=%d m=%d (worst trial seed %llu)\n", cell.n, cell.m,
                  static_cast<unsigned long long>(cell.worst_trial_seed));
      ok = false;
    }
  }
  std::printf("tolerance %.3e (batch %.3e): %s\n", tol, batch_tol, ok ? "all passed" : "FAILED");
  return ok ? kExitOk : kExitViolation;
}

int cmd_bench(const std::string& metric, int n_max, int m_max, const std::string& output,
              bool measured, int trials, std::uint64_t seed) {
  dsf::Metric which;
  if (metric == "flops") {
    which = dsf::Metric::Flops;
  } else if (metric == "memory") {
    which = dsf::Metric::Memory;
  } else {
    std::fprintf(stderr, "bench: unsupported metric '%s' (use flops or memory)\n",
                 metric.c_str());
    return kExitUsage;
  }
  if (n_max < 1 || m_max < 1) {
    std::fprintf(stderr, "bench: --n-max and --m-max must be >= 1\n");
    return kExitUsage;
  }

  const dsf::Matrix grid = dsf::reduction_grid(which, n_max, m_max);

  std::string csv;
  if (!measured) {
    // Grid layout: one row per n, one column per m.
    csv += "n";
    for (int m = 1; m <= m_max; ++m) csv += ",m" + std::to_string(m);
    csv += '\n';
    for (int n = 1; n <= n_max; ++n) {
      csv += std::to_string(n);
      for (int m = 1; m <= m_max; ++m) csv += "," + dsf::format_csv_value(grid(n - 1, m - 1));
      csv += '\n';
    }
  } else {
    csv += "n,m,analytic_reduction_pct,sc_full_mults,sc_full_adds,sc_reduced_mults,"
           "sc_reduced_adds,dskf_mults,dskf_adds,measured_mult_reduction_pct\n";
    dsf::RandomStream rng(seed);
    for (int n = 1; n <= n_max; ++n) {
      for (int m = 1; m <= m_max; ++m) {
        dsf::RandomStream cell_rng = rng.split(static_cast<std::uint64_t>(n) * 1000 + m);
        const auto counts = dsf::measured_comparison(n, m, trials, cell_rng);
        const double measured_pct =
            100.0 *
            (static_cast<double>(counts.sc_full.multiplications) -
             static_cast<double>(counts.dskf.multiplications)) /
            static_cast<double>(counts.sc_full.multiplications);
        csv += std::to_string(n) + "," + std::to_string(m) + "," +
               dsf::format_csv_value(grid(n - 1, m - 1)) + "," +
               std::to_string(counts.sc_full.multiplications) + "," +
               std::to_string(counts.sc_full.additions) + "," +
               std::to_string(counts.sc_reduced.multiplications) + "," +
               std::to_string(counts.sc_reduced.additions) + "," +
               std::to_string(counts.dskf.multiplications) + "," +
               std::to_string(counts.dskf.additions) + "," + dsf::format_csv_value(measured_pct) +
               '\n';
      }
    }
  }

  std::ofstream out(output, std::ios::binary);
  if (!out || !(out << csv)) {
    std::fprintf(stderr, "bench: cannot write output file '%s'\n", output.c_str());
    return kExitUsage;
  }
  std::printf("wrote %s grid (%dx%d%s) to %s\n", metric.c_str(), n_max, m_max,
              measured ? ", with measured counts" : "", output.c_str());
  return kExitOk;
}

int cmd_sim(const std::string& config_path, const std::string& output_override,
            std::uint64_t seed_override, bool has_seed_override) {
  dsf::ScenarioConfig config;
  try {
    config = dsf::load_config(config_path);
  } catch (const dsf::ConfigError& e) {
    std::fprintf(stderr, "sim: %s\n", e.what());
    return kExitUsage;
  }
  if (!output_override.empty()) config.output_path = output_override;
  if (has_seed_override) config.seed = seed_override;

  dsf::RunResult result;
  try {
    result = dsf::run_scenario(config);
    result.write_csv(config.output_path);
  } catch (const dsf::ConfigError& e) {
    std::fprintf(stderr, "sim: %s\n", e.what());
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "sim: %s\n", e.what());
    return kExitViolation;
  }

  std::printf("scenario '%s': %d epochs, %zu measurements, wrote %s\n", config.name.c_str(),
              config.step_count, config.schedule.size(), config.output_path.c_str());
  for (dsf::Backend b : config.backends) {
    std::printf("  %-4s mean NEES %s, final NEES %s\n", dsf::backend_name(b),
                dsf::format_csv_value(result.mean_nees(b)).c_str(),
                dsf::format_csv_value(result.final_nees(b)).c_str());
  }
  if (config.has_backend(dsf::Backend::Sc) && config.has_backend(dsf::Backend::Dskf)) {
    std::printf("  sc/dskf max discrepancy: mean %s, cov %s\n",
                dsf::format_csv_value(result.max_mean_discrepancy).c_str(),
                dsf::format_csv_value(result.max_cov_discrepancy).c_str());
  }
  if (result.transition_warnings > 0) {
    std::printf("  warning: %d update(s) with transition condition estimate above %.0e (max %s)\n",
                result.transition_warnings, dsf::kTransitionConditionWarn,
                dsf::format_csv_value(result.max_transition_condition).c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed-state filtering workbench: equivalence sweeps, cost grids, simulations"};
  app.require_subcommand(1);

  auto* equiv = app.add_subcommand("equiv", "Randomized SC vs DSKF vs oracle equivalence sweep");
  std::string n_text = "1..4", m_text = "1..2";
  int steps = 10, trials = 50;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  equiv->add_option("--n", n_text, "State dimensions, inclusive range a..b")->capture_default_str();
  equiv->add_option("--m", m_text, "Measurement dimensions, inclusive range a..b")
      ->capture_default_str();
  equiv->add_option("--steps", steps, "Epochs per trial")->capture_default_str();
  equiv->add_option("--trials", trials, "Trials per (n, m) cell")->capture_default_str();
  equiv->add_option("--seed", seed, "Master seed")->capture_default_str();
  equiv->add_option("--tol", tol,
                    "Max allowed relative discrepancy (batch oracle uses 10x this)")
      ->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Write DSKF-vs-SC percent-reduction grid CSV");
  std::string metric = "flops", bench_output = "reduction_grid.csv";
  int n_max = 20, m_max = 20, bench_trials = 3;
  std::uint64_t bench_seed = 1;
  bool measured = false;
  bench->add_option("--metric", metric, "flops or memory")->capture_default_str();
  bench->add_option("--n-max", n_max, "Largest state dimension")->capture_default_str();
  bench->add_option("--m-max", m_max, "Largest measurement dimension")->capture_default_str();
  bench->add_option("--output", bench_output, "Output CSV path")->capture_default_str();
  bench->add_flag("--measured", measured,
                  "Emit long-format rows with instrumented per-update counts");
  bench->add_option("--trials", bench_trials, "Trials per cell for --measured")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Seed for --measured inputs")->capture_default_str();

  auto* sim = app.add_subcommand("sim", "Run a scenario config and write its CSV log");
  std::string config_path, sim_output;
  std::uint64_t sim_seed = 0;
  sim->add_option("--config", config_path, "Scenario config file")->required();
  sim->add_option("--output", sim_output, "Override the config's output path");
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Override the config's seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (equiv->parsed()) return cmd_equiv(n_text, m_text, steps, trials, seed, tol);
    if (bench->parsed())
      return cmd_bench(metric, n_max, m_max, bench_output, measured, bench_trials, bench_seed);
    if (sim->parsed())
      return cmd_sim(config_path, sim_output, sim_seed, sim_seed_opt->count() > 0);
  } catch (const dsf::DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitViolation;
  }
  return kExitUsage;
}
