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

// qinet: reward mechanism laboratory.
//
//   qinet reward    --tree t.json --mechanism dgm --alpha 0.375
//   qinet allocate  --tree t.json --seed 7
//   qinet audit     --mechanism geom --delta 0.6 --property sp
//   qinet attack    --mechanism gcrm --alpha 0.5 --scenario s.json
//   qinet analytics --alpha 0.5
//   qinet sweep     --config sybil.cfg --out sybil.csv
//
// Exit status: 0 success, 1 a property check failed, 2 bad input or usage.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qinet/adversary.hpp"
#include "qinet/analytics.hpp"
#include "qinet/auditor.hpp"
#include "qinet/error.hpp"
#include "qinet/mechanisms.hpp"
#include "qinet/querytree.hpp"
#include "qinet/sweeps.hpp"

namespace {

using nlohmann::json;
using namespace qinet;

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailed = 1;
constexpr int kExitInput = 2;

struct MechanismFlags {
  std::string mechanism;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<double> rho;
  double budget = 1.0;
  std::string spec_file;
};

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_input(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void emit(const Common& common, const std::string& text) {
  if (common.out.empty() || common.out == "-") {
    std::cout << text;
    return;
  }
  write_text(resolve_output_path(common.out), text);
}

void add_mechanism_flags(CLI::App* app, MechanismFlags& m) {
  app->add_option("--mechanism", m.mechanism, "dgm, geom or gcrm")
      ->check(CLI::IsMember({"dgm", "geom", "gcrm"}));
  app->add_option("--alpha", m.alpha,
                  "mechanism alpha (the native DGM parameter for dgm)");
  app->add_option("--delta", m.delta, "delta for geom");
  app->add_option("--rho", m.rho, "pick parameters by split ratio rho");
  app->add_option("--budget", m.budget, "owner budget")->capture_default_str();
  app->add_option("--spec", m.spec_file, "mechanism spec JSON file");
}

MechanismSpec resolve_mechanism(const MechanismFlags& m) {
  if (!m.spec_file.empty()) {
    detail::require(m.mechanism.empty(), "--spec and --mechanism are exclusive");
    return parse_mechanism_spec(read_json(m.spec_file));
  }
  detail::require(!m.mechanism.empty(), "give --mechanism or --spec");
  if (m.rho) {
    detail::require(!m.alpha && !m.delta, "--rho replaces --alpha and --delta");
    const auto all = rho_mechanisms(*m.rho, m.budget);
    if (m.mechanism == "dgm") return all.dgm;
    if (m.mechanism == "geom") return all.delta_geom;
    return all.gcrm;
  }
  if (m.mechanism == "geom") {
    detail::require(m.delta.has_value() != m.alpha.has_value(),
                    "geom needs exactly one of --delta or --alpha");
    return delta_geom(m.delta ? *m.delta : *m.alpha, m.budget);
  }
  detail::require(m.alpha.has_value(), m.mechanism + " needs --alpha or --rho");
  detail::require(!m.delta, "--delta applies to geom only");
  if (m.mechanism == "dgm") return dgm_native(*m.alpha, m.budget);
  return gcrm(*m.alpha, m.budget);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------

int run_reward(const Common& common, const MechanismFlags& mf,
               const std::string& tree_file) {
  const MechanismSpec spec = resolve_mechanism(mf);
  const TreeDocument doc = parse_tree_document(read_json(tree_file));
  const QueryTree reported = derive_reported_tree(doc.tree, doc.profile);
  const auto path = allocate(reported, common.seed);
  json out{{"mechanism", mechanism_name(spec)}, {"spec", to_json(spec)},
           {"seed", common.seed}};
  std::ostringstream text;
  if (!path) {
    out["path"] = nullptr;
    out["rewards"] = json::array();
    out["total"] = 0.0;
    text << "no solver\n";
  } else {
    const RewardVector rv = reward_vector(*path, spec);
    out.update(to_json(*path));
    json rewards = json::array();
    if (common.format == "csv") text << "agent,position,reward\n";
    for (std::size_t k = 0; k < rv.rewards.size(); ++k) {
      const AgentId id = path->agents[k + 1];
      rewards.push_back({{"agent", id.value},
                         {"position", k + 1},
                         {"reward", rv.rewards[k]}});
      if (common.format == "csv") {
        text << id.value << "," << k + 1 << "," << format_number(rv.rewards[k])
             << "\n";
      } else {
        text << "agent " << id.value << "  position " << k + 1 << "  reward "
             << format_number(rv.rewards[k]) << "\n";
      }
    }
    out["rewards"] = rewards;
    out["total"] = rv.total;
    if (common.format == "table") {
      text << "total " << format_number(rv.total) << "\n";
    }
  }
  json expected = json::object();
  for (const auto& [id, value] : expected_rewards(doc.tree, doc.profile, spec)) {
    if (value > 0.0) expected[to_string(id)] = value;
  }
  out["expected_rewards"] = expected;
  emit(common, common.format == "json" ? out.dump(2) + "\n" : text.str());
  return kExitOk;
}

int run_allocate(const Common& common, const std::string& tree_file) {
  const TreeDocument doc = parse_tree_document(read_json(tree_file));
  const QueryTree reported = derive_reported_tree(doc.tree, doc.profile);
  const auto path = allocate(reported, common.seed);
  const auto tied = tied_allocations(reported);
  json out = path ? to_json(*path)
                  : json{{"path", nullptr}, {"n", 0}, {"solver", nullptr}};
  out["tied_solvers"] = tied.size();
  out["seed"] = common.seed;
  std::string text;
  if (common.format == "json") {
    text = out.dump(2) + "\n";
  } else if (!path) {
    text = "no solver\n";
  } else {
    for (std::size_t k = 0; k < path->agents.size(); ++k) {
      text += (k ? (common.format == "csv" ? "," : " -> ") : "") +
              to_string(path->agents[k]);
    }
    text += "\n";
  }
  emit(common, text);
  return kExitOk;
}

struct AuditFlags {
  std::vector<std::string> properties;
  int lambda_max = 20;
  int gamma_max = 20;
  int n_max = 50;
  std::optional<double> split_rho;
  std::string tree_file;
  std::size_t node_cap = 10;
  std::size_t coalition_cap = 8;
  bool include_off_path = false;
};

int run_audit(const Common& common, const MechanismFlags& mf,
              const AuditFlags& af) {
  const MechanismSpec spec = resolve_mechanism(mf);
  std::vector<std::string> props = af.properties;
  if (props.empty()) props = {"po", "bb", "split", "sp", "cp", "monotone"};
  std::optional<QueryTree> tree;
  auto need_tree = [&]() -> const QueryTree& {
    detail::require(!af.tree_file.empty(), "ic and core audits need --tree");
    if (!tree) tree = parse_tree_document(read_json(af.tree_file)).tree;
    return *tree;
  };
  std::vector<PropertyReport> reports;
  for (const auto& p : props) {
    if (p == "po") {
      reports.push_back(check_po(spec, af.n_max));
    } else if (p == "bb") {
      reports.push_back(check_bb(spec, af.n_max));
    } else if (p == "split") {
      const double natural = spec.family == Family::kTdgm
                                 ? spec.alpha
                                 : spec.alpha * (1.0 + spec.alpha);
      reports.push_back(
          check_split(spec, af.split_rho.value_or(std::min(1.0, natural)),
                      std::min(af.n_max, 20)));
    } else if (p == "sp") {
      reports.push_back(check_sp(spec, af.lambda_max, af.n_max));
    } else if (p == "cp") {
      reports.push_back(check_cp(spec, af.gamma_max, af.n_max));
    } else if (p == "monotone") {
      reports.push_back(check_monotone_solver_reward(spec, af.n_max));
    } else if (p == "impossibility") {
      reports.push_back(impossibility_certificate(
          reward_table(spec, std::max(3, std::min(af.n_max, 20))),
          mechanism_name(spec)));
    } else if (p == "ic") {
      reports.push_back(check_ic(need_tree(), spec,
                                 {af.node_cap, af.include_off_path}));
    } else if (p == "core") {
      reports.push_back(check_core(need_tree(), spec, {af.coalition_cap, 0}));
    } else {
      throw InputError("unknown property \"" + p + "\"");
    }
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();

  std::ostringstream text;
  if (common.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    text << arr.dump(2) << "\n";
  } else if (common.format == "csv") {
    text << "property,mechanism,verdict,witness\n";
    for (const auto& r : reports) {
      text << to_string(r.property) << "," << r.mechanism << ","
           << (r.passed() ? "pass" : "fail") << ","
           << csv_quote(r.witness.is_null() ? "" : r.witness.dump()) << "\n";
    }
  } else {
    print_table(text, reports);
  }
  emit(common, text.str());
  return ok ? kExitOk : kExitPropertyFailed;
}

struct AttackFlags {
  std::string scenario_file;
  std::string kind;
  int position = 1;
  int size = 1;
  int n = 1;
};

int run_attack_cmd(const Common& common, const MechanismFlags& mf,
                   const AttackFlags& af) {
  const MechanismSpec spec = resolve_mechanism(mf);
  AttackScenario s;
  if (!af.scenario_file.empty()) {
    detail::require(af.kind.empty(), "--scenario and --kind are exclusive");
    s = parse_attack_scenario(read_json(af.scenario_file));
  } else {
    detail::require(!af.kind.empty(), "give --scenario or --kind");
    s = parse_attack_scenario(
        {{"kind", af.kind}, {"position", af.position}, {"size", af.size},
         {"n", af.n}});
  }
  const AttackOutcome o = run_attack(spec, s);
  json out = to_json(o);
  out["mechanism"] = mechanism_name(spec);
  std::ostringstream text;
  if (common.format == "json") {
    text << out.dump(2) << "\n";
  } else if (common.format == "csv") {
    text << "mechanism,kind,position,size,n,reward_before,reward_after,ratio,"
            "profitable\n"
         << mechanism_name(spec) << "," << to_string(o.kind) << ","
         << o.position << "," << o.size << "," << o.n << ","
         << format_number(o.reward_before) << ","
         << format_number(o.reward_after) << "," << format_number(o.ratio)
         << "," << (o.profitable ? 1 : 0) << "\n";
  } else {
    text << mechanism_name(spec) << " " << to_string(o.kind) << " at position "
         << o.position << ", size " << o.size << ", n " << o.n << ": "
         << format_number(o.reward_before) << " -> "
         << format_number(o.reward_after) << " (ratio "
         << format_number(o.ratio) << ", "
         << (o.profitable ? "profitable" : "not profitable") << ")\n";
  }
  emit(common, text.str());
  return kExitOk;
}

int run_analytics(const Common& common, double alpha, int lambda_max) {
  if (common.format == "csv") {
    emit(common, analytics_csv({alpha}, lambda_max));
    return kExitOk;
  }
  const SybilProfile p = make_sybil_profile(alpha, lambda_max);
  const auto np = n_prime(alpha);
  const int total_argmax = gcrm_total_maximizer(alpha);
  const double total_max =
      total_reward_closed_form(total_argmax, gcrm(alpha, 1.0));
  std::ostringstream text;
  if (common.format == "json") {
    json f = json::object();
    for (const auto& [l, v] : p.f_values) f[std::to_string(l)] = v;
    json out{{"alpha", alpha},
             {"f", f},
             {"lambda_prime", p.lambda_prime},
             {"lambda_prime_rounded", p.rounded_lambda_prime},
             {"lambda_prime_stationary", p.lambda_prime_stationary},
             {"sybil_maximizer", p.maximizer},
             {"max_ratio", p.max_ratio},
             {"lambda_star", p.lambda_star},
             {"n_prime", np ? json(*np) : json(nullptr)},
             {"total_maximizer", total_argmax},
             {"max_total_over_budget", total_max}};
    text << out.dump(2) << "\n";
  } else {
    text << "alpha = " << format_number(alpha) << "\n";
    for (const auto& [l, v] : p.f_values) {
      text << "f(" << l << ") = " << format_number(v) << "\n";
    }
    text << std::setprecision(6);
    text << "lambda' = " << p.lambda_prime << " (rounded "
         << p.rounded_lambda_prime << ")\n"
         << "stationary lambda = " << p.lambda_prime_stationary
         << ", best lambda = " << p.maximizer << " (f = " << p.max_ratio
         << ")\n"
         << "lambda* = " << p.lambda_star << "\n"
         << "n' = " << (np ? std::to_string(*np) : std::string("undefined"))
         << ", best n = " << total_argmax << " (total/budget = " << total_max
         << ")\n";
  }
  emit(common, text.str());
  return kExitOk;
}

int run_sweep(const Common& common, const std::string& config_file,
              bool seed_given) {
  ExperimentConfig c = load_experiment_config(config_file);
  if (!common.out.empty()) c.output_path = common.out;
  if (seed_given) c.seed = common.seed;
  const Dataset d = run_experiment(c);
  if (c.output_path == "-") {
    std::cout << d.to_csv();
    return kExitOk;
  }
  const SweepOutput written = write_sweep(c, d);
  std::cout << json{{"csv", written.csv.string()},
                    {"manifest", written.manifest.string()},
                    {"rows", d.rows.size()}}
                   .dump()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qinet: reward mechanisms on query incentive networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "tie-break / run seed");
    sub->add_option("--out", common.out, "write output here instead of stdout");
    sub->add_option("--format", common.format, "json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
  };

  MechanismFlags mech;
  std::string tree_file;

  auto* reward_cmd = app.add_subcommand("reward", "rewards on a reported tree");
  add_common(reward_cmd);
  add_mechanism_flags(reward_cmd, mech);
  reward_cmd->add_option("--tree", tree_file, "tree JSON ('-' for stdin)")
      ->required();

  auto* allocate_cmd = app.add_subcommand("allocate", "allocation path of a tree");
  add_common(allocate_cmd);
  allocate_cmd->add_option("--tree", tree_file, "tree JSON ('-' for stdin)")
      ->required();

  AuditFlags audit;
  auto* audit_cmd = app.add_subcommand("audit", "property audit");
  add_common(audit_cmd);
  add_mechanism_flags(audit_cmd, mech);
  audit_cmd
      ->add_option("--property", audit.properties,
                   "po bb split sp cp monotone impossibility ic core")
      ->delimiter(',');
  audit_cmd->add_option("--lambda-max", audit.lambda_max)->capture_default_str();
  audit_cmd->add_option("--gamma-max", audit.gamma_max)->capture_default_str();
  audit_cmd->add_option("--n-max", audit.n_max)->capture_default_str();
  audit_cmd->add_option("--split-rho", audit.split_rho,
                        "rho to test for split (default: the mechanism's own)");
  audit_cmd->add_option("--tree", audit.tree_file, "tree JSON for ic / core");
  audit_cmd->add_option("--node-cap", audit.node_cap)->capture_default_str();
  audit_cmd->add_option("--coalition-cap", audit.coalition_cap)
      ->capture_default_str();
  audit_cmd->add_flag("--include-off-path", audit.include_off_path,
                      "let off-path IC gains fail the audit");

  AttackFlags attack;
  auto* attack_cmd = app.add_subcommand("attack", "Sybil or collusion attack");
  add_common(attack_cmd);
  add_mechanism_flags(attack_cmd, mech);
  attack_cmd->add_option("--scenario", attack.scenario_file, "scenario JSON");
  attack_cmd->add_option("--kind", attack.kind, "sybil or collusion");
  attack_cmd->add_option("--position", attack.position);
  attack_cmd->add_option("--size", attack.size,
                         "lambda, or merged agent count for collusion");
  attack_cmd->add_option("--n", attack.n);

  double analytics_alpha = 0.0;
  int analytics_lambda_max = 10;
  auto* analytics_cmd = app.add_subcommand("analytics", "GCRM closed forms");
  add_common(analytics_cmd);
  analytics_cmd->add_option("--alpha", analytics_alpha, "GCRM alpha")->required();
  analytics_cmd->add_option("--lambda-max", analytics_lambda_max)
      ->capture_default_str();

  std::string config_file;
  auto* sweep_cmd = app.add_subcommand("sweep", "experiment sweep to CSV");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--config", config_file, "key = value config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*reward_cmd) return run_reward(common, mech, tree_file);
    if (*allocate_cmd) return run_allocate(common, tree_file);
    if (*audit_cmd) return run_audit(common, mech, audit);
    if (*attack_cmd) return run_attack_cmd(common, mech, attack);
    if (*analytics_cmd) {
      return run_analytics(common, analytics_alpha, analytics_lambda_max);
    }
    if (*sweep_cmd) {
      return run_sweep(common, config_file, sweep_cmd->count("--seed") > 0);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SearchExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
