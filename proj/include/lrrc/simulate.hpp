#pragma once

// Failure/repair simulation: construct a random code, then run a sequence of
// failures, each repaired from d helpers outside the failed node's family,
// checking the requested properties after every round.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrrc/code_core.hpp"
#include "lrrc/error.hpp"
#include "lrrc/mfhs_model.hpp"
#include "lrrc/rng.hpp"

namespace lrrc {

inline constexpr const char* kVersion = "0.1.0";

enum class FailurePolicy { RoundRobin, UniformRandom, AdversarialSweep };
enum class HelperPolicy { UniformRandom, ExhaustivePerFailure };

NLOHMANN_JSON_SERIALIZE_ENUM(FailurePolicy, {{FailurePolicy::RoundRobin, "round-robin"},
                                             {FailurePolicy::UniformRandom, "uniform-random"},
                                             {FailurePolicy::AdversarialSweep, "adversarial-sweep"}})
NLOHMANN_JSON_SERIALIZE_ENUM(HelperPolicy, {{HelperPolicy::UniformRandom, "uniform-random"},
                                            {HelperPolicy::ExhaustivePerFailure, "exhaustive-per-failure"}})

struct SimChecks {
  bool invariant = true;
  bool reconstruction = true;
  bool witness = false;
};

struct SimConfig {
  int n = 6, k = 4, d = 3, r = 1;
  std::optional<std::uint64_t> q;  // nullopt: smallest prime above the sufficient bound
  std::uint64_t seed = 1;
  int rounds = 100;
  FailurePolicy failure_policy = FailurePolicy::UniformRandom;
  HelperPolicy helper_policy = HelperPolicy::UniformRandom;
  SimChecks checks;
  int max_attempts = kDefaultMaxAttempts;
};

inline nlohmann::json config_to_json(const SimConfig& c) {
  return {{"n", c.n},
          {"k", c.k},
          {"d", c.d},
          {"r", c.r},
          {"q", c.q ? nlohmann::json(*c.q) : nlohmann::json("auto")},
          {"seed", c.seed},
          {"rounds", c.rounds},
          {"failure_policy", c.failure_policy},
          {"helper_policy", c.helper_policy},
          {"checks", {{"invariant", c.checks.invariant}, {"reconstruction", c.checks.reconstruction}, {"witness", c.checks.witness}}},
          {"max_attempts", c.max_attempts}};
}

inline SimConfig config_from_json(const nlohmann::json& j) {
  try {
    SimConfig c;
    c.n = j.value("n", c.n);
    c.k = j.value("k", c.k);
    c.d = j.value("d", c.d);
    c.r = j.value("r", c.r);
    if (j.contains("q") && !(j["q"].is_string() && j["q"] == "auto")) c.q = j["q"].get<std::uint64_t>();
    c.seed = j.value("seed", c.seed);
    c.rounds = j.value("rounds", c.rounds);
    if (j.contains("failure_policy")) {
      c.failure_policy = j["failure_policy"].get<FailurePolicy>();
      if (j["failure_policy"] != nlohmann::json(c.failure_policy)) throw Error(ErrorCode::ParseError, "unknown failure_policy");
    }
    if (j.contains("helper_policy")) {
      c.helper_policy = j["helper_policy"].get<HelperPolicy>();
      if (j["helper_policy"] != nlohmann::json(c.helper_policy)) throw Error(ErrorCode::ParseError, "unknown helper_policy");
    }
    if (j.contains("checks")) {
      const auto& ch = j["checks"];
      c.checks.invariant = ch.value("invariant", c.checks.invariant);
      c.checks.reconstruction = ch.value("reconstruction", c.checks.reconstruction);
      c.checks.witness = ch.value("witness", c.checks.witness);
    }
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    if (c.rounds < 0) throw Error(ErrorCode::ParseError, "rounds must be >= 0");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("simulation config: ") + e.what());
  }
}

struct RoundRecord {
  int round = 0;
  Node failed = 0;
  std::vector<Node> helpers;
  int attempts = 0;
  int sweep_repairs = 0;  // extra repairs tried by sweeping policies
  std::optional<bool> invariant;
  std::optional<bool> reconstruction;
  std::optional<bool> witness;
  bool passed = false;
  std::string error;
  double wall_ms = 0;
};

struct SimReport {
  SimConfig config;
  std::uint64_t q = 0;
  std::uint64_t required_q = 0;
  bool below_bound = false;
  std::size_t h_size = 0;
  int construction_attempts = 0;
  std::optional<bool> construction_invariant;
  std::optional<bool> construction_reconstruction;
  std::string construction_error;
  double construction_wall_ms = 0;
  std::vector<RoundRecord> rounds;
  int rounds_passed = 0;
  std::map<int, int> retry_histogram;  // attempts -> repairs
  long total_attempts = 0;
  long successful_repairs = 0;
  long total_retries = 0;
  bool ok = false;
};

namespace detail {

inline std::vector<std::vector<Node>> helper_sets(const Params& p, Node failed) {
  const auto universe = FamilyLayout(p).helper_universe(failed);
  std::vector<std::vector<Node>> out;
  std::vector<bool> pick(universe.size(), false);
  std::fill(pick.begin(), pick.begin() + p.d, true);
  do {
    std::vector<Node> s;
    for (std::size_t i = 0; i < universe.size(); ++i)
      if (pick[i]) s.push_back(universe[i]);
    out.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline SimReport simulate(const SimConfig& config) {
  SimReport rep;
  rep.config = config;
  const Params p = params_new(config.n, config.k, config.d, config.r);
  const auto hset = cached_hset(p);
  rep.h_size = hset->size();
  rep.required_q = required_field_size(p, *hset);
  const FieldConfig field = config.q ? FieldConfig(*config.q) : auto_field(p, *hset);
  rep.q = field.q();

  auto t0 = std::chrono::steady_clock::now();
  std::optional<CodeState> state;
  try {
    Construction built = construct(p, field, *hset, CounterRng::derive(config.seed, 0), config.max_attempts);
    rep.construction_attempts = built.attempts;
    rep.below_bound = built.below_bound;
    state = std::move(built.state);
  } catch (const Error& e) {
    rep.construction_attempts = config.max_attempts;
    rep.construction_error = e.what();
    rep.construction_wall_ms = detail::ms_since(t0);
    return rep;
  }
  if (config.checks.invariant) rep.construction_invariant = invariant_check(*state, *hset);
  if (config.checks.reconstruction) rep.construction_reconstruction = reconstruct_check(*state);
  rep.construction_wall_ms = detail::ms_since(t0);
  bool healthy = rep.construction_invariant.value_or(true) && rep.construction_reconstruction.value_or(true);

  auto record_repair = [&](int attempts) {
    ++rep.retry_histogram[attempts];
    rep.total_attempts += attempts;
    rep.total_retries += attempts - 1;
    ++rep.successful_repairs;
  };

  for (int round = 1; round <= config.rounds && healthy; ++round) {
    t0 = std::chrono::steady_clock::now();
    const std::uint64_t round_seed = CounterRng::derive(config.seed, static_cast<std::uint64_t>(round));
    CounterRng rng(round_seed);
    RoundRecord rec;
    rec.round = round;
    rec.failed = config.failure_policy == FailurePolicy::UniformRandom
                     ? static_cast<Node>(rng.uniform(static_cast<std::uint64_t>(p.n)))
                     : static_cast<Node>((round - 1) % p.n);
    try {
      // Sweeps: every (failed, helpers) combination the policies cover must
      // admit a repair of the current state; only the chosen one is kept.
      std::vector<Node> sweep_failures{rec.failed};
      if (config.failure_policy == FailurePolicy::AdversarialSweep) {
        sweep_failures.clear();
        for (Node v = 0; v < p.n; ++v) sweep_failures.push_back(v);
      }
      std::uint64_t label = 1;
      auto sweep_repair = [&](Node v, const std::vector<Node>& hs) {
        record_repair(
            repair_random(*state, v, hs, *hset, CounterRng::derive(round_seed, label++), config.max_attempts).attempts);
        ++rec.sweep_repairs;
      };
      for (Node v : sweep_failures) {
        if (v == rec.failed) continue;
        const auto sets = detail::helper_sets(p, v);
        if (config.helper_policy == HelperPolicy::ExhaustivePerFailure) {
          for (const auto& hs : sets) sweep_repair(v, hs);
        } else {
          sweep_repair(v, sets[rng.uniform(sets.size())]);
        }
      }
      const auto sets = detail::helper_sets(p, rec.failed);
      rec.helpers = sets[rng.uniform(sets.size())];
      if (config.helper_policy == HelperPolicy::ExhaustivePerFailure) {
        for (const auto& hs : sets)
          if (hs != rec.helpers) sweep_repair(rec.failed, hs);
      }
      if (config.checks.witness) {
        bool all = true;
        for (const auto& h : hset->members()) all = all && witness_repair_check(*state, rec.failed, rec.helpers, h, *hset);
        rec.witness = all;
      }
      RepairOutcome out = repair_random(*state, rec.failed, rec.helpers, *hset, CounterRng::derive(round_seed, 0),
                                        config.max_attempts);
      rec.attempts = out.attempts;
      record_repair(out.attempts);
      state = std::move(out.state);
      if (config.checks.invariant) rec.invariant = invariant_check(*state, *hset);
      if (config.checks.reconstruction) rec.reconstruction = reconstruct_check(*state);
      rec.passed = rec.invariant.value_or(true) && rec.reconstruction.value_or(true) && rec.witness.value_or(true);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::RepairFailed) {
        rep.total_attempts += config.max_attempts;
      }
      rec.error = e.what();
      rec.passed = false;
    }
    rec.wall_ms = detail::ms_since(t0);
    if (rec.passed) ++rep.rounds_passed;
    healthy = rec.passed;
    rep.rounds.push_back(std::move(rec));
  }
  rep.ok = healthy && rep.rounds_passed == config.rounds;
  return rep;
}

inline double empirical_failure_rate(const SimReport& rep) {
  return rep.total_attempts == 0
             ? 0.0
             : static_cast<double>(rep.total_attempts - rep.successful_repairs) / static_cast<double>(rep.total_attempts);
}

inline nlohmann::json report_to_json(const SimReport& rep) {
  auto opt = [](const std::optional<bool>& b) { return b ? nlohmann::json(*b) : nlohmann::json(nullptr); };
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : rep.rounds) {
    nlohmann::json j{{"round", r.round},
                     {"failed", r.failed + 1},
                     {"helpers", detail::one_based(r.helpers)},
                     {"attempts", r.attempts},
                     {"sweep_repairs", r.sweep_repairs},
                     {"checks", {{"invariant", opt(r.invariant)}, {"reconstruction", opt(r.reconstruction)}, {"witness", opt(r.witness)}}},
                     {"passed", r.passed},
                     {"wall_ms", r.wall_ms}};
    if (!r.error.empty()) j["error"] = r.error;
    rounds.push_back(std::move(j));
  }
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [attempts, count] : rep.retry_histogram) hist[std::to_string(attempts)] = count;
  nlohmann::json construction{{"q", rep.q},
                              {"h_size", rep.h_size},
                              {"required_q", rep.required_q},
                              {"below_bound", rep.below_bound},
                              {"attempts", rep.construction_attempts},
                              {"invariant", opt(rep.construction_invariant)},
                              {"reconstruction", opt(rep.construction_reconstruction)},
                              {"wall_ms", rep.construction_wall_ms}};
  if (!rep.construction_error.empty()) construction["error"] = rep.construction_error;
  return {{"version", kVersion},
          {"config", config_to_json(rep.config)},
          {"construction", construction},
          {"rounds", rounds},
          {"aggregate",
           {{"rounds", rep.config.rounds},
            {"rounds_passed", rep.rounds_passed},
            {"retry_histogram", hist},
            {"total_attempts", rep.total_attempts},
            {"successful_repairs", rep.successful_repairs},
            {"total_retries", rep.total_retries},
            {"empirical_failure_rate", empirical_failure_rate(rep)}}},
          {"ok", rep.ok}};
}

/// Copy of a report with every "wall_ms" field removed, for comparing runs.
inline nlohmann::json strip_timing(nlohmann::json j) {
  if (j.is_object()) {
    j.erase("wall_ms");
    for (auto& [key, value] : j.items()) value = strip_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing(value);
  }
  return j;
}

}  // namespace lrrc
