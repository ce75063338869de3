#pragma once

// Command-line front end. Everything printed on `out` is JSON (one document,
// or JSON lines for streams); diagnostics go to `err`.
//
// Exit codes: 0 all requested checks passed, 1 a check failed, 2 usage or
// input error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrrc/code_core.hpp"
#include "lrrc/connect.hpp"
#include "lrrc/error.hpp"
#include "lrrc/exact6321.hpp"
#include "lrrc/mfhs_model.hpp"
#include "lrrc/simulate.hpp"

namespace lrrc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline std::vector<Node> to_nodes(const std::vector<int>& one_based, int n) {
  std::vector<Node> out;
  for (int v : one_based) {
    if (v < 1 || v > n) throw Error(ErrorCode::OutOfRange, "node " + std::to_string(v) + " outside 1.." + std::to_string(n));
    out.push_back(v - 1);
  }
  return out;
}

inline Node to_node(int one_based, int n) { return to_nodes({one_based}, n).front(); }

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << j.dump(2) << '\n';
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LRRC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "LRRC_SEED is not an unsigned integer");
    }
  }
  return 1;
}

inline FieldConfig parse_field(const std::string& q) {
  try {
    return FieldConfig(std::stoull(q));
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "--q expects 'auto' or a prime");
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::ParseError, "--q out of range");
  }
}

inline FieldConfig resolve_field(const std::string& q, const Params& p, const HSet& hset) {
  return q == "auto" ? auto_field(p, hset) : parse_field(q);
}

inline int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConstructionFailed:
    case ErrorCode::RepairFailed:
    case ErrorCode::InternalContradiction:
    case ErrorCode::InvariantViolation:
    case ErrorCode::RankDeficient:
      return kExitCheckFailed;
    default:
      return kExitUsage;
  }
}

struct ParamArgs {
  int n = 0, k = 0, d = 0, r = 0;
  void add_to(CLI::App* app) {
    app->add_option("n", n, "number of nodes")->required();
    app->add_option("k", k, "nodes needed to reconstruct")->required();
    app->add_option("d", d, "helpers per repair")->required();
    app->add_option("r", r, "unavailable helpers tolerated")->required();
  }
  Params build() const { return params_new(n, k, d, r); }
};

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Locally repairable regenerating codes at the minimum-bandwidth point"};
  app.require_subcommand(1);
  std::function<int()> action;

  // params
  detail::ParamArgs params_args;
  auto* params_cmd = app.add_subcommand("params", "print derived parameters and the family layout");
  params_args.add_to(params_cmd);
  params_cmd->callback([&] {
    action = [&] {
      const Params p = params_args.build();
      const FamilyLayout layout(p);
      nlohmann::json families = nlohmann::json::array();
      for (int f = 0; f < layout.family_count(); ++f) families.push_back(lrrc::detail::one_based(layout.members(f)));
      nlohmann::json j = params_to_json(p);
      j["families"] = families;
      out << j.dump() << '\n';
      return kExitOk;
    };
  });

  // enumerate-h
  detail::ParamArgs enum_args;
  std::string enum_mode = "auto";
  auto* enum_cmd = app.add_subcommand("enumerate-h", "stream the members of H as JSON lines");
  enum_args.add_to(enum_cmd);
  enum_cmd->add_option("--mode", enum_mode, "membership test: auto, canonical or exhaustive")
      ->check(CLI::IsMember({"auto", "canonical", "exhaustive"}));
  enum_cmd->callback([&] {
    action = [&] {
      const Params p = enum_args.build();
      const MembershipMode mode = enum_mode == "canonical"    ? MembershipMode::Canonical
                                  : enum_mode == "exhaustive" ? MembershipMode::Exhaustive
                                                              : MembershipMode::Auto;
      const HSet set = HSet::enumerate(p, mode);
      for (std::size_t i = 0; i < set.size(); ++i) {
        out << nlohmann::json{{"h", set[i]}, {"witness_perm", lrrc::detail::one_based(set.witness(i).order())}}.dump()
            << '\n';
      }
      return kExitOk;
    };
  });

  // construct
  detail::ParamArgs cons_args;
  std::string cons_q = "auto";
  std::optional<std::uint64_t> cons_seed;
  std::size_t cons_w = 1;
  int cons_attempts = kDefaultMaxAttempts;
  std::string cons_out;
  auto* cons_cmd = app.add_subcommand("construct", "randomly construct a code satisfying the invariant");
  cons_args.add_to(cons_cmd);
  cons_cmd->add_option("--q", cons_q, "field size: 'auto' or a prime");
  cons_cmd->add_option("--seed", cons_seed, "RNG seed (falls back to LRRC_SEED, then 1)");
  cons_cmd->add_option("--W", cons_w, "symbols per packet")->check(CLI::PositiveNumber);
  cons_cmd->add_option("--max-attempts", cons_attempts)->check(CLI::PositiveNumber);
  cons_cmd->add_option("--out", cons_out, "write the code state JSON here");
  cons_cmd->callback([&] {
    action = [&] {
      const Params p = cons_args.build();
      const auto hset = cached_hset(p);
      const FieldConfig f = detail::resolve_field(cons_q, p, *hset);
      const Construction c = construct(p, f, *hset, detail::resolve_seed(cons_seed), cons_attempts, cons_w);
      if (c.below_bound) err << "warning: q=" << f.q() << " is below the sufficient bound " << required_field_size(p, *hset) << '\n';
      const bool inv = invariant_check(c.state, *hset);
      const bool rec = reconstruct_check(c.state);
      nlohmann::json j{{"q", f.q()},
                       {"required_q", required_field_size(p, *hset)},
                       {"below_bound", c.below_bound},
                       {"attempts", c.attempts},
                       {"invariant", inv},
                       {"reconstruct", rec}};
      if (cons_out.empty()) {
        j["state"] = state_to_json(c.state);
      } else {
        detail::write_json(cons_out, state_to_json(c.state));
      }
      out << j.dump() << '\n';
      return inv && rec ? kExitOk : kExitCheckFailed;
    };
  });

  // repair
  std::string rep_state;
  int rep_failed = 0;
  std::vector<int> rep_helpers;
  std::optional<std::uint64_t> rep_seed;
  int rep_attempts = kDefaultMaxAttempts;
  std::string rep_out;
  auto* rep_cmd = app.add_subcommand("repair", "repair one node with random coefficients");
  rep_cmd->add_option("--state", rep_state, "code state JSON")->required();
  rep_cmd->add_option("--failed", rep_failed, "failed node (1-based)")->required();
  rep_cmd->add_option("--helpers", rep_helpers, "helper nodes (1-based)")->required()->delimiter(',');
  rep_cmd->add_option("--seed", rep_seed);
  rep_cmd->add_option("--max-attempts", rep_attempts)->check(CLI::PositiveNumber);
  rep_cmd->add_option("--out", rep_out, "write the repaired state here");
  rep_cmd->callback([&] {
    action = [&] {
      const CodeState s = state_from_json(detail::read_json(rep_state));
      const auto hset = cached_hset(s.params);
      const Node failed = detail::to_node(rep_failed, s.params.n);
      const auto helpers = detail::to_nodes(rep_helpers, s.params.n);
      const RepairOutcome o = repair_random(s, failed, helpers, *hset, detail::resolve_seed(rep_seed), rep_attempts);
      const bool inv = invariant_check(o.state, *hset);
      const bool rec = reconstruct_check(o.state);
      nlohmann::json j{{"failed", rep_failed}, {"helpers", rep_helpers}, {"attempts", o.attempts}, {"invariant", inv}, {"reconstruct", rec}};
      if (rep_out.empty()) {
        j["state"] = state_to_json(o.state);
      } else {
        detail::write_json(rep_out, state_to_json(o.state));
      }
      out << j.dump() << '\n';
      return inv && rec ? kExitOk : kExitCheckFailed;
    };
  });

  // verify
  std::string ver_state;
  bool ver_invariant = false;
  bool ver_reconstruct = false;
  std::optional<int> ver_w_failed;
  std::vector<int> ver_w_helpers;
  auto* ver_cmd = app.add_subcommand("verify", "check a stored code state (invariant and reconstruction by default)");
  ver_cmd->add_option("--state", ver_state, "code state JSON")->required();
  ver_cmd->add_flag("--invariant", ver_invariant);
  ver_cmd->add_flag("--reconstruct", ver_reconstruct);
  auto* wf = ver_cmd->add_option("--witness-failed", ver_w_failed, "run the witness sweep for this failed node");
  ver_cmd->add_option("--witness-helpers", ver_w_helpers)->delimiter(',')->needs(wf);
  wf->needs("--witness-helpers");
  ver_cmd->callback([&] {
    action = [&] {
      const CodeState s = state_from_json(detail::read_json(ver_state));
      const auto hset = cached_hset(s.params);
      const bool defaults = !ver_invariant && !ver_reconstruct && !ver_w_failed;
      bool ok = true;
      nlohmann::json j = nlohmann::json::object();
      if (ver_invariant || defaults) {
        const InvariantReport r = invariant_report(s, *hset);
        j["invariant"] = r.ok;
        if (r.first_failure) j["invariant_first_failure"] = *r.first_failure;
        ok = ok && r.ok;
      }
      if (ver_reconstruct || defaults) {
        j["reconstruct"] = reconstruct_check(s);
        ok = ok && j["reconstruct"].get<bool>();
      }
      if (ver_w_failed) {
        const Node failed = detail::to_node(*ver_w_failed, s.params.n);
        const auto helpers = detail::to_nodes(ver_w_helpers, s.params.n);
        std::size_t passed = 0;
        for (const auto& h : hset->members()) passed += witness_repair_check(s, failed, helpers, h, *hset) ? 1 : 0;
        j["witness"] = {{"checked", hset->size()}, {"passed", passed}};
        ok = ok && passed == hset->size();
      }
      j["ok"] = ok;
      out << j.dump() << '\n';
      return ok ? kExitOk : kExitCheckFailed;
    };
  });

  // connect
  detail::ParamArgs conn_args;
  std::vector<int> conn_h;
  int conn_failed = 0;
  std::vector<int> conn_helpers;
  auto* conn_cmd = app.add_subcommand("connect", "run procedure CONNECT and print its trace");
  conn_cmd->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  conn_args.add_to(conn_cmd);
  conn_cmd->add_option("--h", conn_h, "h vector, comma separated")->required()->delimiter(',');
  conn_cmd->add_option("--failed", conn_failed, "failed node (1-based)")->required();
  conn_cmd->add_option("--helpers", conn_helpers, "helper nodes (1-based)")->required()->delimiter(',');
  conn_cmd->callback([&] {
    action = [&] {
      const Params p = conn_args.build();
      const auto result =
          connect_run(p, conn_h, detail::to_nodes(conn_helpers, p.n), detail::to_node(conn_failed, p.n));
      out << connect_to_json(result).dump() << '\n';
      return kExitOk;
    };
  });

  // exact6321
  std::uint64_t ex_q = exact::kMinField;
  bool ex_verify = false;
  std::string ex_emit;
  auto* ex_cmd = app.add_subcommand("exact6321", "build (and optionally verify) the exact-repair (6,3,2,1) code");
  ex_cmd->add_option("--q", ex_q, "prime field size, at least 7");
  ex_cmd->add_flag("--verify", ex_verify, "print the full verification report");
  ex_cmd->add_option("--emit", ex_emit, "write the code JSON here");
  ex_cmd->callback([&] {
    action = [&] {
      if (ex_q < exact::kMinField) throw Error(ErrorCode::FieldTooSmall, "exact (6,3,2,1) code needs q >= 7");
      const FieldConfig f(ex_q);
      const exact::ExactCode code = exact::build_exact_code(f.q());
      const nlohmann::json code_json = exact::code_to_json(code);
      if (!ex_emit.empty()) detail::write_json(ex_emit, code_json);
      if (ex_verify) {
        const exact::ExactReport rep = exact::verify_exact_code(code);
        out << nlohmann::json{{"q", f.q()}, {"report", exact::report_to_json(rep)}}.dump() << '\n';
        return rep.pass ? kExitOk : kExitCheckFailed;
      }
      out << code_json.dump() << '\n';
      return kExitOk;
    };
  });

  // simulate
  std::vector<int> sim_params;
  std::string sim_config;
  std::optional<std::string> sim_q;
  std::optional<std::uint64_t> sim_seed;
  std::optional<int> sim_rounds;
  std::optional<std::string> sim_failure;
  std::optional<std::string> sim_helper;
  std::optional<bool> sim_inv, sim_rec, sim_wit;
  std::optional<int> sim_attempts;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "run a failure/repair simulation and print its report");
  sim_cmd->add_option("params", sim_params, "n k d r (optional when --config is given)")->expected(0, 4);
  sim_cmd->add_option("--config", sim_config, "JSON file with the SimConfig fields");
  sim_cmd->add_option("--q", sim_q, "field size: 'auto' or a prime");
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_option("--rounds", sim_rounds)->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--failure-policy", sim_failure)
      ->check(CLI::IsMember({"round-robin", "uniform-random", "adversarial-sweep"}));
  sim_cmd->add_option("--helper-policy", sim_helper)->check(CLI::IsMember({"uniform-random", "exhaustive-per-failure"}));
  sim_cmd->add_flag("--invariant,!--no-invariant", sim_inv);
  sim_cmd->add_flag("--reconstruction,!--no-reconstruction", sim_rec);
  sim_cmd->add_flag("--witness,!--no-witness", sim_wit);
  sim_cmd->add_option("--max-attempts", sim_attempts)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim_out, "also write the report here");
  sim_cmd->callback([&] {
    action = [&] {
      SimConfig c = sim_config.empty() ? SimConfig{} : config_from_json(detail::read_json(sim_config));
      if (!sim_params.empty()) {
        if (sim_params.size() != 4) throw Error(ErrorCode::ParseError, "simulate expects n k d r");
        c.n = sim_params[0];
        c.k = sim_params[1];
        c.d = sim_params[2];
        c.r = sim_params[3];
      }
      if (sim_q) {
        if (*sim_q == "auto") {
          c.q.reset();
        } else {
          c.q = detail::parse_field(*sim_q).q();
        }
      }
      if (sim_seed) {
        c.seed = *sim_seed;
      } else if (sim_config.empty() || std::getenv("LRRC_SEED")) {
        c.seed = detail::resolve_seed(std::nullopt);
      }
      if (sim_rounds) c.rounds = *sim_rounds;
      if (sim_failure) c.failure_policy = nlohmann::json(*sim_failure).get<FailurePolicy>();
      if (sim_helper) c.helper_policy = nlohmann::json(*sim_helper).get<HelperPolicy>();
      if (sim_inv) c.checks.invariant = *sim_inv;
      if (sim_rec) c.checks.reconstruction = *sim_rec;
      if (sim_wit) c.checks.witness = *sim_wit;
      if (sim_attempts) c.max_attempts = *sim_attempts;
      const SimReport rep = simulate(c);
      const nlohmann::json j = report_to_json(rep);
      if (!sim_out.empty()) detail::write_json(sim_out, j);
      out << j.dump() << '\n';
      return rep.ok ? kExitOk : kExitCheckFailed;
    };
  });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return detail::exit_for(e);
  }
}

}  // namespace lrrc::cli
