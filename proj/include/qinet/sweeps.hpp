// Copyright 2026 The qinet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment sweeps and their CSV / manifest outputs.
//
// Every dataset is a pure function of its ExperimentConfig. Rows are sorted
// by (mechanism, rho or alpha, lambda / merge size / n) and numbers are
// printed in shortest round-trip form, so equal configs give equal bytes.

#ifndef QINET_SWEEPS_HPP
#define QINET_SWEEPS_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "qinet/adversary.hpp"
#include "qinet/analytics.hpp"
#include "qinet/error.hpp"
#include "qinet/mechanisms.hpp"

namespace qinet {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "QINET_OUTPUT_DIR";

enum class Experiment {
  kSybilRatio,
  kCollusionRatio,
  kBudgetRatio,
  kGcrmSybilAlpha,
  kGcrmCollusionAlpha,
};

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::kSybilRatio: return "sybil_ratio";
    case Experiment::kCollusionRatio: return "collusion_ratio";
    case Experiment::kBudgetRatio: return "budget_ratio";
    case Experiment::kGcrmSybilAlpha: return "gcrm_sybil_alpha";
    case Experiment::kGcrmCollusionAlpha: return "gcrm_collusion_alpha";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& name) {
  for (auto e : {Experiment::kSybilRatio, Experiment::kCollusionRatio,
                 Experiment::kBudgetRatio, Experiment::kGcrmSybilAlpha,
                 Experiment::kGcrmCollusionAlpha}) {
    if (name == to_string(e)) return e;
  }
  throw InputError("unknown experiment \"" + name + "\"");
}

struct ExperimentConfig {
  Experiment experiment = Experiment::kSybilRatio;
  std::vector<double> rho_values{0.2, 0.4, 0.6, 0.8};
  std::vector<double> alpha_values{0.3, 0.4, 0.5, 0.6, 0.7};
  int n_base = 3;
  int position = 1;
  int lambda_max = 10;
  int gamma_max = 10;
  int n_max = 30;
  double budget = 1.0;
  std::uint64_t seed = 0;
  std::string output_path;
};

inline bool uses_rho_grid(Experiment e) {
  return e == Experiment::kSybilRatio || e == Experiment::kCollusionRatio ||
         e == Experiment::kBudgetRatio;
}

inline void validate(const ExperimentConfig& c) {
  if (uses_rho_grid(c.experiment)) {
    detail::require(!c.rho_values.empty(), "rho_values must not be empty");
    for (double rho : c.rho_values) {
      detail::require(rho > 0.0 && rho < 1.0,
                      "rho values must lie in (0, 1), got " + std::to_string(rho));
    }
  } else {
    detail::require(!c.alpha_values.empty(), "alpha_values must not be empty");
    for (double a : c.alpha_values) detail::require_alpha(a);
  }
  detail::require(c.n_base >= 1, "n_base must be at least 1");
  detail::require(c.position >= 1 && c.position <= c.n_base,
                  "position must lie in 1..n_base");
  detail::require(c.lambda_max >= 1, "lambda_max must be at least 1");
  detail::require(c.gamma_max >= 1, "gamma_max must be at least 1");
  detail::require(c.n_max >= 1, "n_max must be at least 1");
  detail::require(c.budget > 0.0, "budget must be positive");
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(ec == std::errc() && end == t.data() + t.size() && !t.empty(),
          "\"" + key + "\" expects a number, got \"" + t + "\"");
  return v;
}

template <typename Int>
Int parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  Int v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(ec == std::errc() && end == t.data() + t.size() && !t.empty(),
          "\"" + key + "\" expects an integer, got \"" + t + "\"");
  return v;
}

inline std::vector<double> parse_reals(const std::string& text,
                                       const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, key));
  return out;
}

}  // namespace detail

// Flat "key = value" lines; '#' starts a comment; lists are comma separated.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool has_experiment = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    detail::require(eq != std::string::npos,
                    "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "experiment") {
      c.experiment = parse_experiment(value);
      has_experiment = true;
    } else if (key == "rho_values") {
      c.rho_values = detail::parse_reals(value, key);
    } else if (key == "alpha_values") {
      c.alpha_values = detail::parse_reals(value, key);
    } else if (key == "n_base") {
      c.n_base = detail::parse_integer<int>(value, key);
    } else if (key == "position") {
      c.position = detail::parse_integer<int>(value, key);
    } else if (key == "lambda_max") {
      c.lambda_max = detail::parse_integer<int>(value, key);
    } else if (key == "gamma_max") {
      c.gamma_max = detail::parse_integer<int>(value, key);
    } else if (key == "n_max") {
      c.n_max = detail::parse_integer<int>(value, key);
    } else if (key == "budget") {
      c.budget = detail::parse_real(value, key);
    } else if (key == "seed") {
      c.seed = detail::parse_integer<std::uint64_t>(value, key);
    } else if (key == "output_path") {
      c.output_path = value;
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown key \"" +
                       key + "\"");
    }
  }
  detail::require(has_experiment, "config must set \"experiment\"");
  validate(c);
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), "cannot read config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"experiment", to_string(c.experiment)},
          {"rho_values", c.rho_values},
          {"alpha_values", c.alpha_values},
          {"n_base", c.n_base},
          {"position", c.position},
          {"lambda_max", c.lambda_max},
          {"gamma_max", c.gamma_max},
          {"n_max", c.n_max},
          {"budget", c.budget},
          {"seed", c.seed},
          {"output_path", c.output_path}};
}

// Shortest decimal that reads back to the same double; never locale dependent.
inline std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

struct SweepRow {
  std::string mechanism;
  double parameter = 0.0;  // rho or alpha
  int index = 0;           // lambda, merge size or n
  double value = 0.0;

  friend bool operator<(const SweepRow& a, const SweepRow& b) {
    return std::tie(a.mechanism, a.parameter, a.index) <
           std::tie(b.mechanism, b.parameter, b.index);
  }
};

struct Dataset {
  std::vector<std::string> header;
  std::vector<SweepRow> rows;

  std::string to_csv() const {
    std::string out;
    for (std::size_t k = 0; k < header.size(); ++k) {
      out += (k ? "," : "") + header[k];
    }
    out += "\n";
    for (const auto& r : rows) {
      out += r.mechanism + "," + format_number(r.parameter) + "," +
             std::to_string(r.index) + "," + format_number(r.value) + "\n";
    }
    return out;
  }
};

namespace detail {

inline Dataset sorted(std::vector<std::string> header,
                      std::vector<SweepRow> rows) {
  std::sort(rows.begin(), rows.end());
  return {std::move(header), std::move(rows)};
}

inline double sybil_ratio(const MechanismSpec& spec, int i, int n, int lambda) {
  return sybil_gain(spec, i, n, lambda).ratio;
}

// x(i, n) over the separate colluders' sum.
inline double collusion_ratio(const MechanismSpec& spec, int i, int n,
                              int gamma) {
  return collusion_gain(spec, i, n, gamma).ratio;
}

}  // namespace detail

// delta-GEOM and GCRM, lambda = 1..lambda_max, honest path n_base.
inline Dataset run_sybil_ratio(const ExperimentConfig& c) {
  validate(c);
  std::vector<SweepRow> rows;
  for (double rho : c.rho_values) {
    const auto m = rho_mechanisms(rho, c.budget);
    for (int lambda = 1; lambda <= c.lambda_max; ++lambda) {
      for (const auto* spec : {&m.delta_geom, &m.gcrm}) {
        rows.push_back({mechanism_name(*spec), rho, lambda,
                        detail::sybil_ratio(*spec, c.position, c.n_base, lambda)});
      }
    }
  }
  return detail::sorted({"mechanism", "rho", "lambda", "ratio"}, std::move(rows));
}

// DGM and GCRM, merge size = gamma + 1 for gamma = 1..gamma_max, merged
// path n_base.
inline Dataset run_collusion_ratio(const ExperimentConfig& c) {
  validate(c);
  std::vector<SweepRow> rows;
  for (double rho : c.rho_values) {
    const auto m = rho_mechanisms(rho, c.budget);
    for (int gamma = 1; gamma <= c.gamma_max; ++gamma) {
      for (const auto* spec : {&m.dgm, &m.gcrm}) {
        rows.push_back(
            {mechanism_name(*spec), rho, gamma + 1,
             detail::collusion_ratio(*spec, c.position, c.n_base, gamma)});
      }
    }
  }
  return detail::sorted({"mechanism", "rho", "merge_size", "ratio"},
                        std::move(rows));
}

inline Dataset run_budget_ratio(const ExperimentConfig& c) {
  validate(c);
  std::vector<SweepRow> rows;
  for (double rho : c.rho_values) {
    const auto m = rho_mechanisms(rho, c.budget);
    for (int n = 1; n <= c.n_max; ++n) {
      for (const auto* spec : {&m.dgm, &m.delta_geom, &m.gcrm}) {
        rows.push_back({mechanism_name(*spec), rho, n,
                        total_reward_sum(n, *spec) / c.budget});
      }
    }
  }
  return detail::sorted({"mechanism", "rho", "n", "ratio"}, std::move(rows));
}

// GCRM Sybil ratio per alpha for lambda = 1..lambda*(alpha).
inline Dataset run_gcrm_sybil_alpha(const ExperimentConfig& c) {
  validate(c);
  std::vector<SweepRow> rows;
  for (double alpha : c.alpha_values) {
    const auto spec = gcrm(alpha, c.budget);
    const int stop = lambda_star(alpha);
    for (int lambda = 1; lambda <= stop; ++lambda) {
      rows.push_back({mechanism_name(spec), alpha, lambda,
                      detail::sybil_ratio(spec, c.position, c.n_base, lambda)});
    }
  }
  return detail::sorted({"mechanism", "alpha", "lambda", "ratio"},
                        std::move(rows));
}

inline Dataset run_gcrm_collusion_alpha(const ExperimentConfig& c) {
  validate(c);
  std::vector<SweepRow> rows;
  for (double alpha : c.alpha_values) {
    const auto spec = gcrm(alpha, c.budget);
    for (int gamma = 1; gamma <= c.gamma_max; ++gamma) {
      rows.push_back(
          {mechanism_name(spec), alpha, gamma + 1,
           detail::collusion_ratio(spec, c.position, c.n_base, gamma)});
    }
  }
  return detail::sorted({"mechanism", "alpha", "merge_size", "ratio"},
                        std::move(rows));
}

// Dispatches on the two alpha-grid experiments.
inline Dataset run_gcrm_alpha_sweeps(const ExperimentConfig& c) {
  detail::require(!uses_rho_grid(c.experiment),
                  "run_gcrm_alpha_sweeps needs an alpha-grid experiment");
  return c.experiment == Experiment::kGcrmSybilAlpha ? run_gcrm_sybil_alpha(c)
                                                     : run_gcrm_collusion_alpha(c);
}

inline Dataset run_experiment(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::kSybilRatio: return run_sybil_ratio(c);
    case Experiment::kCollusionRatio: return run_collusion_ratio(c);
    case Experiment::kBudgetRatio: return run_budget_ratio(c);
    case Experiment::kGcrmSybilAlpha:
    case Experiment::kGcrmCollusionAlpha: return run_gcrm_alpha_sweeps(c);
  }
  throw InputError("unknown experiment");
}

// alpha,lambda,f,lambda_prime,lambda_star,n_prime; n_prime is empty on the
// golden band.
inline std::string analytics_csv(const std::vector<double>& alphas,
                                 int lambda_max) {
  detail::require(!alphas.empty(), "alpha grid must not be empty");
  detail::require(lambda_max >= 1, "lambda_max must be at least 1");
  std::vector<double> sorted_alphas = alphas;
  std::sort(sorted_alphas.begin(), sorted_alphas.end());
  std::string out = "alpha,lambda,f,lambda_prime,lambda_star,n_prime\n";
  for (double alpha : sorted_alphas) {
    const double lp = lambda_prime(alpha);
    const int ls = lambda_star(alpha);
    const auto np = n_prime(alpha);
    for (int lambda = 1; lambda <= lambda_max; ++lambda) {
      out += format_number(alpha) + "," + std::to_string(lambda) + "," +
             format_number(sybil_factor(alpha, lambda)) + "," +
             format_number(lp) + "," + std::to_string(ls) + "," +
             (np ? format_number(*np) : std::string()) + "\n";
    }
  }
  return out;
}

// Relative paths land under $QINET_OUTPUT_DIR when it is set.
inline std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      return std::filesystem::path(dir) / p;
    }
  }
  return p;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline nlohmann::json make_manifest(const ExperimentConfig& c,
                                    const Dataset& d) {
  return {{"artifact", "qinet"},
          {"version", kArtifactVersion},
          {"seed", c.seed},
          {"config", to_json(c)},
          {"columns", d.header},
          {"rows", d.rows.size()}};
}

struct SweepOutput {
  std::filesystem::path csv;
  std::filesystem::path manifest;
};

// Writes <path> and <path>.manifest.json. An empty output_path becomes
// "<experiment>.csv".
inline SweepOutput write_sweep(const ExperimentConfig& c, const Dataset& d) {
  const std::string name = c.output_path.empty()
                               ? std::string(to_string(c.experiment)) + ".csv"
                               : c.output_path;
  SweepOutput out;
  out.csv = resolve_output_path(name);
  out.manifest = out.csv;
  out.manifest += ".manifest.json";
  write_text(out.csv, d.to_csv());
  write_text(out.manifest, make_manifest(c, d).dump(2) + "\n");
  return out;
}

}  // namespace qinet

#endif  // QINET_SWEEPS_HPP
