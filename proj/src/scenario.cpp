#include "dsf/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dsf/dskf.hpp"
#include "dsf/kf.hpp"
#include "dsf/scfilter.hpp"

namespace dsf {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Kf:
      return "kf";
    case Backend::Sc:
      return "sc";
    case Backend::Dskf:
      return "dskf";
  }
  return "?";
}

bool ScenarioConfig::has_backend(Backend b) const {
  return std::find(backends.begin(), backends.end(), b) != backends.end();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void field_fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

double parse_number(const std::string& token, const std::string& origin, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected a number, got '" + token + "'");
  }
  if (used != token.size()) parse_fail(origin, line, "trailing junk in number '" + token + "'");
  return v;
}

// "[a, b, c]" -> list of numbers; "[[..],[..]]" handled by parse_matrix.
std::vector<double> parse_number_list(const std::string& text, const std::string& origin,
                                      int line) {
  std::vector<double> out;
  std::string token;
  for (char c : text) {
    if (c == ',') {
      out.push_back(parse_number(trim(token), origin, line));
      token.clear();
    } else {
      token += c;
    }
  }
  if (!trim(token).empty()) out.push_back(parse_number(trim(token), origin, line));
  return out;
}

Matrix parse_matrix(const std::string& value, const std::string& origin, int line) {
  const std::string v = trim(value);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    parse_fail(origin, line, "expected a bracketed literal, got '" + v + "'");
  }
  const std::string inner = trim(v.substr(1, v.size() - 2));
  if (inner.empty()) parse_fail(origin, line, "empty matrix literal");

  if (inner.front() != '[') {
    // Flat vector literal: [a, b, c] is a column vector.
    return vec(parse_number_list(inner, origin, line));
  }

  // Row-list literal: [[a, b], [c, d]].
  std::vector<std::vector<double>> rows;
  std::size_t i = 0;
  while (i < inner.size()) {
    if (inner[i] == '[') {
      const std::size_t close = inner.find(']', i);
      if (close == std::string::npos) parse_fail(origin, line, "unterminated row in matrix");
      rows.push_back(parse_number_list(inner.substr(i + 1, close - i - 1), origin, line));
      i = close + 1;
    } else if (inner[i] == ',' || std::isspace(static_cast<unsigned char>(inner[i]))) {
      ++i;
    } else {
      parse_fail(origin, line, std::string("unexpected character '") + inner[i] + "' in matrix");
    }
  }
  if (rows.empty()) parse_fail(origin, line, "empty matrix literal");
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != cols || cols == 0) parse_fail(origin, line, "ragged matrix rows");
  }
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

long long parse_int(const std::string& token, const std::string& origin, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &used);
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected an integer, got '" + token + "'");
  }
  if (used != token.size()) parse_fail(origin, line, "trailing junk in integer '" + token + "'");
  return v;
}

void apply_preset(ScenarioConfig& config, const std::string& preset) {
  if (preset == "random_walk_1d") {
    config.model.phi = Matrix{{1.0}};
    config.model.b = Matrix{{0.0}};
    config.model.g = Matrix{{1.0}};
    config.model.q_cov = Matrix{{0.04}};
    config.control = Matrix{{0.0}};
  } else if (preset == "pv_2d") {
    // 2-D position + velocity, unit time step, acceleration-level noise.
    config.model.phi = Matrix{{1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    config.model.b = Matrix::zeros(4, 1);
    config.model.g = Matrix{{0.5, 0}, {0, 0.5}, {1, 0}, {0, 1}};
    config.model.q_cov = Matrix{{0.01, 0}, {0, 0.01}};
    config.control = Matrix{{0.0}};
  } else {
    field_fail("model.preset", "unknown preset '" + preset + "'");
  }
}

void validate(ScenarioConfig& config) {
  if (config.name.empty()) field_fail("name", "missing");
  if (config.state_dim < 1) field_fail("state_dim", "must be a positive integer");
  if (config.meas_dim < 1) field_fail("meas_dim", "must be a positive integer");
  if (config.step_count < 1) field_fail("steps", "must be a positive integer");

  const Index n = config.state_dim;
  if (config.model.phi.empty()) field_fail("model", "missing phi (or preset)");
  if (config.model.phi.rows() != n || config.model.phi.cols() != n)
    field_fail("model.phi", "must be " + std::to_string(n) + "x" + std::to_string(n));
  if (config.model.b.empty()) config.model.b = Matrix::zeros(n, 1);
  if (config.model.b.rows() != n) field_fail("model.b", "row count must match state_dim");
  if (config.model.g.empty()) field_fail("model", "missing g (or preset)");
  if (config.model.g.rows() != n) field_fail("model.g", "row count must match state_dim");
  if (config.model.q_cov.rows() != config.model.g.cols() ||
      config.model.q_cov.cols() != config.model.g.cols())
    field_fail("model.q", "must be square with dimension matching g's columns");
  if (config.control.empty()) config.control = Matrix::zeros(config.model.b.cols(), 1);
  if (config.control.rows() != config.model.b.cols() || config.control.cols() != 1)
    field_fail("model.u", "must be a column vector matching b's columns");

  if (config.init.mean.empty() || config.init.mean.rows() != n || config.init.mean.cols() != 1)
    field_fail("init.mean", "must be a length-" + std::to_string(n) + " vector");
  if (config.init.cov.rows() != n || config.init.cov.cols() != n)
    field_fail("init.cov", "must be " + std::to_string(n) + "x" + std::to_string(n));

  const Index m = config.meas_dim;
  if (config.meas_noise.rows() != m || config.meas_noise.cols() != m)
    field_fail("measurement.r", "must be " + std::to_string(m) + "x" + std::to_string(m));
  if (config.slice_begin < 0 || config.slice_begin + m > n)
    field_fail("measurement.slice_begin", "position slice exceeds the state dimension");

  Index last_k = 0;
  for (const auto& [j, k] : config.schedule) {
    if (j >= k) field_fail("schedule", "anchor " + std::to_string(j) + " must precede " +
                                           std::to_string(k));
    if (j < last_k)
      field_fail("schedule", "pair (" + std::to_string(j) + ", " + std::to_string(k) +
                                 ") overlaps the previous measurement");
    if (k > config.step_count) field_fail("schedule", "epoch " + std::to_string(k) +
                                                          " exceeds steps");
    last_k = k;
  }

  if (config.backends.empty())
    config.backends = {Backend::Kf, Backend::Sc, Backend::Dskf};
  if (config.output_path.empty()) config.output_path = config.name + ".csv";
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  ScenarioConfig config;
  bool seen_seed = false;
  std::string section;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[' && s.back() == ']') {
      section = trim(s.substr(1, s.size() - 2));
      if (section != "model" && section != "init" && section != "measurement" &&
          section != "schedule") {
        parse_fail(origin, line, "unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) parse_fail(origin, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) parse_fail(origin, line, "empty key or value");

    if (section.empty()) {
      if (key == "name") {
        config.name = value;
      } else if (key == "units") {
        config.units = value;
      } else if (key == "state_dim") {
        config.state_dim = static_cast<Index>(parse_int(value, origin, line));
      } else if (key == "meas_dim") {
        config.meas_dim = static_cast<Index>(parse_int(value, origin, line));
      } else if (key == "steps") {
        config.step_count = static_cast<Index>(parse_int(value, origin, line));
      } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_int(value, origin, line));
        seen_seed = true;
      } else if (key == "backend") {
        if (value == "all") {
          config.backends = {Backend::Kf, Backend::Sc, Backend::Dskf};
        } else if (value == "kf") {
          config.backends = {Backend::Kf};
        } else if (value == "sc") {
          config.backends = {Backend::Sc};
        } else if (value == "dskf") {
          config.backends = {Backend::Dskf};
        } else {
          parse_fail(origin, line, "backend must be kf, sc, dskf, or all");
        }
      } else if (key == "output") {
        config.output_path = value;
      } else {
        parse_fail(origin, line, "unknown key '" + key + "'");
      }
    } else if (section == "model") {
      if (key == "preset") {
        apply_preset(config, value);
      } else if (key == "phi") {
        config.model.phi = parse_matrix(value, origin, line);
      } else if (key == "b") {
        config.model.b = parse_matrix(value, origin, line);
      } else if (key == "g") {
        config.model.g = parse_matrix(value, origin, line);
      } else if (key == "q") {
        config.model.q_cov = parse_matrix(value, origin, line);
      } else if (key == "u") {
        config.control = parse_matrix(value, origin, line);
      } else {
        parse_fail(origin, line, "unknown key '" + key + "' in [model]");
      }
    } else if (section == "init") {
      if (key == "mean") {
        config.init.mean = parse_matrix(value, origin, line);
      } else if (key == "cov") {
        config.init.cov = parse_matrix(value, origin, line);
      } else {
        parse_fail(origin, line, "unknown key '" + key + "' in [init]");
      }
    } else if (section == "measurement") {
      if (key == "r") {
        config.meas_noise = parse_matrix(value, origin, line);
      } else if (key == "slice_begin") {
        config.slice_begin = static_cast<Index>(parse_int(value, origin, line));
      } else {
        parse_fail(origin, line, "unknown key '" + key + "' in [measurement]");
      }
    } else if (section == "schedule") {
      if (key != "pair") parse_fail(origin, line, "only 'pair = j k' entries allowed here");
      std::istringstream pair_in(value);
      long long j = 0, k = 0;
      if (!(pair_in >> j >> k)) parse_fail(origin, line, "pair needs two epochs 'j k'");
      std::string rest;
      if (pair_in >> rest) parse_fail(origin, line, "trailing junk in pair");
      config.schedule.emplace_back(static_cast<Index>(j), static_cast<Index>(k));
    }
  }

  if (!seen_seed) field_fail("seed", "missing (mandatory for reproducibility)");
  validate(config);
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string format_csv_value(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t RunResult::backend_index(Backend b) const {
  for (std::size_t i = 0; i < backends.size(); ++i)
    if (backends[i] == b) return i;
  throw ConfigError(std::string("backend '") + backend_name(b) + "' was not part of this run");
}

double RunResult::final_nees(Backend b) const { return final_nees_[backend_index(b)]; }
double RunResult::mean_nees(Backend b) const { return mean_nees_[backend_index(b)]; }
Belief RunResult::final_belief(Backend b) const { return final_beliefs_[backend_index(b)]; }

std::string RunResult::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_csv_value(row[i]);
    }
    out += '\n';
  }
  return out;
}

void RunResult::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << to_csv();
  if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

namespace {

Matrix sample_or_zero(RandomStream& rng, const Matrix& cov) {
  if (is_zero(cov)) return Matrix::zeros(cov.rows(), 1);
  return gaussian_vector(rng, cov);
}

double nees_of(const Belief& belief, const Matrix& truth) {
  const Matrix err = sub(belief.mean, truth);
  try {
    const Matrix solved = gauss_solve(belief.cov, err);
    double acc = 0.0;
    for (Index i = 0; i < err.rows(); ++i) acc += err(i, 0) * solved(i, 0);
    return acc;
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
  const Index n = config.state_dim;
  const Index steps = config.step_count;

  RandomStream root(config.seed);
  RandomStream init_rng = root.split(1);
  RandomStream process_rng = root.split(2);
  RandomStream meas_rng = root.split(3);

  // Truth trajectory.
  std::vector<Matrix> truth;
  truth.reserve(static_cast<std::size_t>(steps) + 1);
  truth.push_back(add(config.init.mean, sample_or_zero(init_rng, config.init.cov)));
  for (Index t = 0; t < steps; ++t) {
    truth.push_back(simulate_step(truth.back(), config.model, config.control, process_rng));
  }

  // Scheduled odometry measurements.
  struct Scheduled {
    Index anchor, epoch;
    DelayedMeasurement meas;
  };
  std::vector<Scheduled> measurements;
  for (const auto& [j, k] : config.schedule) {
    Matrix delta(config.meas_dim, 1);
    for (Index i = 0; i < config.meas_dim; ++i) {
      delta(i, 0) = truth[static_cast<std::size_t>(k)](config.slice_begin + i, 0) -
                    truth[static_cast<std::size_t>(j)](config.slice_begin + i, 0);
    }
    delta = add(delta, sample_or_zero(meas_rng, config.meas_noise));
    measurements.push_back(
        {j, k, odometry_measurement(delta, config.meas_noise, n, config.slice_begin)});
  }

  RunResult result;
  result.backends = config.backends;
  result.state_dim = n;

  result.header.push_back("epoch");
  for (Index i = 0; i < n; ++i) result.header.push_back("truth_" + std::to_string(i));
  for (Backend b : config.backends) {
    const std::string prefix = backend_name(b);
    for (Index i = 0; i < n; ++i) result.header.push_back(prefix + "_mean_" + std::to_string(i));
    result.header.push_back(prefix + "_covtrace");
    result.header.push_back(prefix + "_nees");
  }
  result.header.push_back("sc_dskf_mean_maxdiff");
  result.header.push_back("sc_dskf_cov_maxdiff");

  // Backend state.
  const bool run_kf = config.has_backend(Backend::Kf);
  const bool run_sc = config.has_backend(Backend::Sc);
  const bool run_dskf = config.has_backend(Backend::Dskf);

  Belief kf_belief = config.init;
  Belief sc_belief = config.init;
  std::optional<AugmentedBelief> sc_aug;
  Belief dskf_belief = config.init;
  EpochTransition trans = EpochTransition::initial(n);

  std::vector<double> nees_sum(config.backends.size(), 0.0);
  std::vector<int> nees_count(config.backends.size(), 0);
  std::vector<double> nees_final(config.backends.size(),
                                 std::numeric_limits<double>::quiet_NaN());
  std::vector<Belief> final_beliefs(config.backends.size());

  std::size_t next_meas = 0;
  auto maybe_clone = [&](Index epoch) {
    if (next_meas < measurements.size() && measurements[next_meas].anchor == epoch) {
      if (run_sc) sc_aug = sc_clone(sc_belief);
      if (run_dskf) trans = EpochTransition::initial(n);
    }
  };

  auto emit_row = [&](Index epoch) {
    std::vector<double> row;
    row.push_back(static_cast<double>(epoch));
    for (Index i = 0; i < n; ++i) row.push_back(truth[static_cast<std::size_t>(epoch)](i, 0));

    Belief sc_now = sc_aug ? sc_aug->current() : sc_belief;
    for (std::size_t bi = 0; bi < config.backends.size(); ++bi) {
      const Backend b = config.backends[bi];
      const Belief& belief = b == Backend::Kf ? kf_belief : (b == Backend::Sc ? sc_now : dskf_belief);
      for (Index i = 0; i < n; ++i) row.push_back(belief.mean(i, 0));
      row.push_back(trace(belief.cov));
      const double nees = nees_of(belief, truth[static_cast<std::size_t>(epoch)]);
      row.push_back(nees);
      if (std::isfinite(nees)) {
        nees_sum[bi] += nees;
        nees_count[bi] += 1;
      }
      nees_final[bi] = nees;
      final_beliefs[bi] = belief;
    }

    double mean_diff = std::numeric_limits<double>::quiet_NaN();
    double cov_diff = std::numeric_limits<double>::quiet_NaN();
    if (run_sc && run_dskf) {
      mean_diff = max_abs(sub(sc_now.mean, dskf_belief.mean));
      cov_diff = max_abs(sub(sc_now.cov, dskf_belief.cov));
      result.max_mean_discrepancy = std::max(result.max_mean_discrepancy, mean_diff);
      result.max_cov_discrepancy = std::max(result.max_cov_discrepancy, cov_diff);
    }
    row.push_back(mean_diff);
    row.push_back(cov_diff);
    result.rows.push_back(std::move(row));
  };

  maybe_clone(0);
  emit_row(0);

  for (Index t = 1; t <= steps; ++t) {
    try {
      if (run_kf) kf_belief = kf_predict(kf_belief, config.model, config.control);
      if (run_sc) {
        if (sc_aug)
          sc_aug = sc_predict(*sc_aug, config.model, config.control);
        else
          sc_belief = kf_predict(sc_belief, config.model, config.control);
      }
      if (run_dskf) {
        dskf_belief = kf_predict(dskf_belief, config.model, config.control);
        trans = accumulate(trans, config.model, config.control);
      }

      if (next_meas < measurements.size() && measurements[next_meas].epoch == t) {
        const DelayedMeasurement& meas = measurements[next_meas].meas;
        // The conventional filter has no valid model for a delayed-state
        // measurement (h_prior != 0); it stays a dead-reckoning baseline.
        if (run_sc) {
          if (!sc_aug) throw NumericError("run_scenario: measurement without a clone");
          sc_belief = sc_update(*sc_aug, meas).current;
          sc_aug.reset();
        }
        if (run_dskf) {
          DskfUpdateInfo info;
          dskf_belief = dskf_update(dskf_belief, trans, meas, nullptr, &info);
          result.max_transition_condition =
              std::max(result.max_transition_condition, info.phi_condition);
          if (info.ill_conditioned) ++result.transition_warnings;
        }
        ++next_meas;
      }
    } catch (const std::runtime_error& e) {
      throw NumericError("run_scenario: epoch " + std::to_string(t) + ": " + e.what());
    }

    maybe_clone(t);
    emit_row(t);
  }

  result.final_nees_ = nees_final;
  result.mean_nees_.resize(config.backends.size());
  for (std::size_t bi = 0; bi < config.backends.size(); ++bi) {
    result.mean_nees_[bi] = nees_count[bi] > 0
                                ? nees_sum[bi] / nees_count[bi]
                                : std::numeric_limits<double>::quiet_NaN();
  }
  result.final_beliefs_ = final_beliefs;
  return result;
}

}  // namespace dsf
