// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lrrc/lrrc.hpp"

using namespace lrrc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_ms;  // 0: no runtime bound
  std::function<Outcome()> run;
};

template <typename F>
void for_all_perms(int n, F&& f) {
  std::vector<int> o(n);
  std::iota(o.begin(), o.end(), 0);
  do {
    f(Perm(o));
  } while (std::next_permutation(o.begin(), o.end()));
}

std::string join(const std::vector<int>& v, int offset = 0) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + offset);
  return s + ")";
}

bool nonincreasing(const std::vector<int>& v) { return std::is_sorted(v.rbegin(), v.rend()); }

const Params& p6431() {
  static const Params p = params_new(6, 4, 3, 1);
  return p;
}

constexpr std::uint64_t kSeed = 20240601;
constexpr int kConstructions = 20;
constexpr Node kWitnessFailed = 0;
const std::vector<Node> kWitnessHelpers{2, 3, 4};

Outcome file_sizes() {
  const int a = params_new(6, 4, 3, 1).M;
  const int b = params_new(6, 3, 2, 1).M;
  return {a == 7 && b == 4, "M(6,4,3,1)=" + std::to_string(a) + " M(6,3,2,1)=" + std::to_string(b)};
}

Outcome score_vector() {
  const auto s = score_vectors(p6431(), Perm({1, 2, 3, 0, 4, 5}));
  const bool ok = s.b == std::vector<int>{3, 2, 2, 1, 0, 0} && s.c == std::vector<int>{3, 2, 2, 0, 0, 0};
  return {ok, "b=" + join(s.b) + " c=" + join(s.c)};
}

Outcome monotone_sweep() {
  int perms = 0, monotone = 0;
  for_all_perms(6, [&](const Perm& perm) {
    const auto s = score_vectors(p6431(), perm);
    ++perms;
    monotone += nonincreasing(s.b) && nonincreasing(s.c) ? 1 : 0;
  });
  const Params f3 = params_new(6, 3, 2, 1);
  std::optional<std::pair<Perm, std::vector<int>>> control;
  for_all_perms(6, [&](const Perm& perm) {
    if (control) return;
    const auto b = score_vectors(f3, perm).b;
    if (!nonincreasing(b)) control.emplace(perm, b);
  });
  std::string detail = std::to_string(monotone) + "/" + std::to_string(perms) + " monotone at (6,4,3,1)";
  detail += control ? "; (6,3,2,1) pi=" + join(control->first.order(), 1) + " b=" + join(control->second)
                    : "; no non-monotone b at (6,3,2,1)";
  return {perms == 720 && monotone == 720 && control.has_value(), detail};
}

Outcome claim_one() {
  const HSet& hset = *cached_hset(p6431());
  std::size_t pairs = 0, held = 0, perms = 0;
  for (const auto& h : hset.members()) {
    for_each_sorting_perm(h, [&](const Perm& perm) {
      ++perms;
      for (int i = 0; i + 1 < p6431().n; ++i) {
        if (h[perm.at(i)] != h[perm.at(i + 1)]) continue;
        ++pairs;
        held += swap_preserves(p6431(), h, perm, i) ? 1 : 0;
      }
      return true;
    });
  }
  return {pairs > 0 && held == pairs, std::to_string(held) + "/" + std::to_string(pairs) + " swaps over " +
                                          std::to_string(hset.size()) + " members, " + std::to_string(perms) +
                                          " sorting permutations"};
}

Outcome proposition_two() {
  const Params& p = p6431();
  const HSet& hset = *cached_hset(p);
  std::size_t runs = 0, ok = 0, contradictions = 0, other_errors = 0;
  for (const auto& h : hset.members()) {
    for (Node failed = 0; failed < p.n; ++failed) {
      for (const auto& helpers : detail::helper_sets(p, failed)) {
        ++runs;
        try {
          const auto res = connect_run(p, h, helpers, failed);
          bool good = hset.contains(res.h_prime) && res.h_prime[failed] == 0 &&
                      static_cast<int>(res.incremented.size()) == h[failed];
          for (Node x : res.incremented) good = good && std::find(helpers.begin(), helpers.end(), x) != helpers.end();
          ok += good ? 1 : 0;
        } catch (const Error& e) {
          (e.code() == ErrorCode::InternalContradiction ? contradictions : other_errors) += 1;
        }
      }
    }
  }
  return {ok == runs && contradictions == 0 && other_errors == 0,
          std::to_string(ok) + "/" + std::to_string(runs) + " runs meet the postcondition, " +
              std::to_string(contradictions) + " InternalContradiction"};
}

nlohmann::json constructions_report() {
  const Params& p = p6431();
  const HSet& hset = *cached_hset(p);
  const FieldConfig field = auto_field(p, hset);
  nlohmann::json runs = nlohmann::json::array();
  for (int i = 0; i < kConstructions; ++i) {
    const std::uint64_t seed = CounterRng::derive(kSeed, static_cast<std::uint64_t>(i));
    nlohmann::json j{{"seed", seed}};
    try {
      const Construction c = construct(p, field, hset, seed);
      j["attempts"] = c.attempts;
      j["invariant"] = invariant_check(c.state, hset);
      j["reconstruct"] = reconstruct_check(c.state);
    } catch (const Error& e) {
      j["error"] = e.what();
    }
    runs.push_back(j);
  }
  return {{"q", field.q()}, {"required_q", required_field_size(p, hset)}, {"runs", runs}};
}

Outcome random_construction(const nlohmann::json& rep) {
  int first = 0, reconstruct = 0;
  for (const auto& r : rep["runs"]) {
    first += r.value("attempts", 0) == 1 && r.value("invariant", false) ? 1 : 0;
    reconstruct += r.value("reconstruct", false) ? 1 : 0;
  }
  const double rate = static_cast<double>(first) / kConstructions;
  std::ostringstream detail;
  detail << "q=" << rep["q"] << ", first-attempt " << first << "/" << kConstructions << " (" << rate * 100
         << "%), reconstruct " << reconstruct << "/" << kConstructions;
  return {rate >= 0.95 && reconstruct == kConstructions, detail.str()};
}

nlohmann::json endurance_report() {
  SimConfig c;
  c.seed = kSeed;
  c.rounds = 100;
  c.failure_policy = FailurePolicy::UniformRandom;
  c.helper_policy = HelperPolicy::UniformRandom;
  return strip_timing(report_to_json(simulate(c)));
}

Outcome repair_endurance(const nlohmann::json& rep) {
  const auto& agg = rep["aggregate"];
  bool every_round = rep["rounds"].size() == 100;
  for (const auto& r : rep["rounds"])
    every_round = every_round && r["checks"]["invariant"] == true && r["checks"]["reconstruction"] == true;
  const long retries = agg["total_retries"].get<long>();
  return {rep["ok"].get<bool>() && every_round && retries <= 5,
          std::to_string(agg["rounds_passed"].get<int>()) + "/100 rounds with invariant and reconstruction, " +
              std::to_string(retries) + " retries"};
}

nlohmann::json witness_report() {
  const Params& p = p6431();
  const HSet& hset = *cached_hset(p);
  const Construction c = construct(p, auto_field(p, hset), hset, kSeed);
  std::size_t passed = 0;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& h : hset.members()) {
    if (witness_repair_check(c.state, kWitnessFailed, kWitnessHelpers, h, hset)) {
      ++passed;
    } else {
      failures.push_back(h);
    }
  }
  return {{"failed", kWitnessFailed + 1},
          {"helpers", detail::one_based(kWitnessHelpers)},
          {"checked", hset.size()},
          {"passed", passed},
          {"failures", failures}};
}

Outcome witness_mechanics(const nlohmann::json& rep) {
  const bool ok = rep["passed"] == rep["checked"] && rep["checked"].get<std::size_t>() > 0;
  return {ok, std::to_string(rep["passed"].get<std::size_t>()) + "/" + std::to_string(rep["checked"].get<std::size_t>()) +
                  " members with failed=1, helpers=(3,4,5)"};
}

Outcome exact_code() {
  const auto code = exact::build_exact_code(7);
  const auto rep = exact::verify_exact_code(code);
  auto count_ok = [](const auto& v) {
    return static_cast<int>(std::count_if(v.begin(), v.end(), [](const auto& e) { return e.ok; }));
  };
  int exact = 0;
  for (const auto& e : rep.repairs) exact += e.exact;
  const bool ok = rep.pass && rep.mds.size() == 15 && count_ok(rep.mds) == 15 && count_ok(rep.family_pairs) == 6 &&
                  count_ok(rep.reconstruction) == 20 && count_ok(rep.repairs) == 30 && exact == 120;
  std::ostringstream detail;
  detail << "MDS " << count_ok(rep.mds) << "/15, family pairs " << count_ok(rep.family_pairs) << "/6, triples "
         << count_ok(rep.reconstruction) << "/20, repairs " << count_ok(rep.repairs) << "/30, exact regenerations "
         << exact << "/120";
  return {ok, detail.str()};
}

}  // namespace

int main() {
  nlohmann::json rep6, rep7, rep8;
  const std::vector<Criterion> criteria{
      {1, "file-size reproduction", 1000, file_sizes},
      {2, "score-vector reproduction", 1000, score_vector},
      {3, "monotone score sweep with f=3 control", 1000, monotone_sweep},
      {4, "adjacent-swap oracle over H", 5 * 60 * 1000, claim_one},
      {5, "CONNECT postcondition sweep", 10 * 60 * 1000, proposition_two},
      {6, "random construction", 0, [&] { return random_construction(rep6 = constructions_report()); }},
      {7, "repair endurance", 0, [&] { return repair_endurance(rep7 = endurance_report()); }},
      {8, "witness mechanics", 5 * 60 * 1000, [&] { return witness_mechanics(rep8 = witness_report()); }},
      {9, "exact (6,3,2,1) code", 1000, exact_code},
      {10, "determinism of criteria 6-8", 0,
       [&] {
         const bool same6 = constructions_report() == rep6;
         const bool same7 = endurance_report() == rep7;
         const bool same8 = witness_report() == rep8;
         return Outcome{same6 && same7 && same8, std::string("construction ") + (same6 ? "identical" : "differs") +
                                                     ", endurance " + (same7 ? "identical" : "differs") +
                                                     ", witness " + (same8 ? "identical" : "differs")};
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_ms > 0 && ms > c.limit_ms) {
      o.pass = false;
      o.detail += "; runtime over limit";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %2d  %-40s %s [%.1f ms]\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), ms);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
