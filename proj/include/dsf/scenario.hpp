#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsf/models.hpp"

namespace dsf {

// Raised on scenario-file parse errors (with line numbers) and on validation
// errors (naming the offending field).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Backend { Kf, Sc, Dskf };

const char* backend_name(Backend b);

// Parsed and validated scenario description. See scenarios/*.cfg and the
// README for the file grammar.
struct ScenarioConfig {
  std::string name;
  std::string units;  // descriptive only; the math layer is unit-agnostic
  Index state_dim = 0;
  Index meas_dim = 0;
  Index step_count = 0;
  std::uint64_t seed = 0;
  std::vector<Backend> backends;
  std::string output_path;

  SystemModel model;
  Matrix control;  // constant per-step control, p x 1
  Belief init;
  Matrix meas_noise;  // m x m
  Index slice_begin = 0;
  std::vector<std::pair<Index, Index>> schedule;  // (anchor j, measurement k)

  bool has_backend(Backend b) const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin);

// One scenario run: the per-epoch result table plus summary statistics.
struct RunResult {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // non-finite cells render as "nan"

  std::vector<Backend> backends;
  Index state_dim = 0;

  double max_mean_discrepancy = 0.0;  // SC vs DSKF over all epochs
  double max_cov_discrepancy = 0.0;

  // DSKF transition conditioning metadata.
  double max_transition_condition = 1.0;
  int transition_warnings = 0;

  double final_nees(Backend b) const;
  double mean_nees(Backend b) const;  // over epochs where NEES is defined
  Belief final_belief(Backend b) const;

  std::string to_csv() const;
  void write_csv(const std::string& path) const;

  // Internal summary storage.
  std::vector<double> final_nees_;
  std::vector<double> mean_nees_;
  std::vector<Belief> final_beliefs_;

 private:
  std::size_t backend_index(Backend b) const;
};

// Simulates the truth, generates scheduled odometry measurements, and runs
// every selected backend. Deterministic for a fixed config.
RunResult run_scenario(const ScenarioConfig& config);

// 17-significant-digit decimal rendering used for every CSV cell.
std::string format_csv_value(double v);

}  // namespace dsf
