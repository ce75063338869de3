#pragma once

// Random linear regenerating codes at the minimum-bandwidth point. A code is
// the list of M x d coding matrices Q_1..Q_n; node i stores X^T Q_i. The
// induction invariant asks that for every h in H the column selection
// [Q_1 E_{h_1} | ... | Q_n E_{h_n}] has full column rank.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrrc/connect.hpp"
#include "lrrc/error.hpp"
#include "lrrc/galois.hpp"
#include "lrrc/mfhs_model.hpp"
#include "lrrc/rng.hpp"

namespace lrrc {

inline constexpr int kDefaultMaxAttempts = 16;

struct CodeState {
  Params params;
  FieldConfig field;
  std::size_t packet_width = 1;  // W: field symbols per packet
  std::vector<FieldMatrix> Q;

  CodeState(Params p, FieldConfig f, std::size_t w, std::vector<FieldMatrix> q)
      : params(p), field(f), packet_width(w), Q(std::move(q)) {
    if (static_cast<int>(Q.size()) != params.n) {
      throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(params.n) + " coding matrices");
    }
    for (const auto& m : Q) {
      if (m.field() != field) throw Error(ErrorCode::FieldMismatch, "coding matrix over a different field");
      if (static_cast<int>(m.rows()) != params.M || static_cast<int>(m.cols()) != params.d) {
        throw Error(ErrorCode::DimensionMismatch, "coding matrices must be M x d");
      }
    }
  }

  friend bool operator==(const CodeState&, const CodeState&) = default;
};

struct RepairPlan {
  Node failed = 0;
  std::vector<Node> helpers;  // x_1..x_d
  FieldMatrix combine;        // d x d; column i is b_i, applied to Q_{x_i}
  FieldMatrix mix;            // Z, d x d
};

/// n * d * M * |H| + 1: any prime at least this large keeps the
/// random-construction failure probability below one.
inline std::uint64_t required_field_size(const Params& p, const HSet& hset) {
  return static_cast<std::uint64_t>(p.n) * static_cast<std::uint64_t>(p.d) * static_cast<std::uint64_t>(p.M) *
             hset.size() +
         1;
}

inline FieldConfig auto_field(const Params& p, const HSet& hset) {
  return FieldConfig(next_prime(required_field_size(p, hset)));
}

/// The M x sum(h) matrix [Q_1 E_{h_1} | ... | Q_n E_{h_n}].
inline FieldMatrix column_selection(const CodeState& s, std::span<const int> h) {
  std::vector<FieldMatrix> blocks;
  blocks.reserve(s.Q.size());
  for (std::size_t i = 0; i < s.Q.size(); ++i) blocks.push_back(select_columns(s.Q[i], static_cast<std::size_t>(h[i])));
  return hconcat(s.field, static_cast<std::size_t>(s.params.M), blocks);
}

inline bool full_column_rank(const FieldMatrix& m) { return m.cols() <= m.rows() && mat_rank(m) == m.cols(); }

struct InvariantReport {
  bool ok = true;
  std::size_t checked = 0;
  std::optional<HVector> first_failure;
};

/// Members are visited by descending sum(h) and the scan stops at the first
/// rank-deficient selection.
inline InvariantReport invariant_report(const CodeState& s, const HSet& hset) {
  std::vector<std::size_t> order(hset.size());
  std::iota(order.begin(), order.end(), 0);
  auto weight = [&](std::size_t i) { return std::accumulate(hset[i].begin(), hset[i].end(), 0); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight(a) > weight(b); });
  InvariantReport report;
  for (std::size_t idx : order) {
    ++report.checked;
    if (!full_column_rank(column_selection(s, hset[idx]))) {
      report.ok = false;
      report.first_failure = hset[idx];
      return report;
    }
  }
  return report;
}

inline bool invariant_check(const CodeState& s, const HSet& hset) { return invariant_report(s, hset).ok; }

/// Every k nodes jointly span the whole M-dimensional message space.
inline bool reconstruct_check(const CodeState& s) {
  const int n = s.params.n;
  const int k = s.params.k;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    std::vector<FieldMatrix> blocks;
    for (int i = 0; i < n; ++i)
      if (pick[i]) blocks.push_back(s.Q[i]);
    if (mat_rank(hconcat(s.field, static_cast<std::size_t>(s.params.M), blocks)) !=
        static_cast<std::size_t>(s.params.M)) {
      return false;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return true;
}

namespace detail {

inline FieldMatrix random_matrix(const FieldConfig& f, std::size_t rows, std::size_t cols, CounterRng& rng) {
  FieldMatrix m(f, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(f.q());
  return m;
}

}  // namespace detail

struct Construction {
  CodeState state;
  int attempts = 0;
  bool below_bound = false;  // q smaller than required_field_size; accepted as an override
};

/// Samples every coding matrix uniformly until the invariant holds.
inline Construction construct(const Params& p, const FieldConfig& field, const HSet& hset, std::uint64_t seed,
                              int max_attempts = kDefaultMaxAttempts, std::size_t packet_width = 1) {
  if (max_attempts < 1) throw Error(ErrorCode::OutOfRange, "max_attempts must be positive");
  const bool below = field.q() < required_field_size(p, hset);
  CounterRng rng(seed);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<FieldMatrix> q;
    q.reserve(p.n);
    for (int i = 0; i < p.n; ++i) q.push_back(detail::random_matrix(field, p.M, p.d, rng));
    CodeState s(p, field, packet_width, std::move(q));
    if (invariant_check(s, hset)) return {std::move(s), attempt, below};
  }
  throw Error(ErrorCode::ConstructionFailed, "invariant not met after " + std::to_string(max_attempts) + " attempts");
}

/// Q'_failed = [Q_{x_1} b_1 | ... | Q_{x_d} b_d] Z.
inline FieldMatrix regenerate(const CodeState& s, const RepairPlan& plan) {
  const int d = s.params.d;
  FieldMatrix gathered(s.field, static_cast<std::size_t>(s.params.M), static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    FieldMatrix b(s.field, static_cast<std::size_t>(d), 1);
    for (int r = 0; r < d; ++r) b(r, 0) = plan.combine(r, i);
    const FieldMatrix col = mat_mul(s.Q[plan.helpers[i]], b);
    for (int r = 0; r < s.params.M; ++r) gathered(r, i) = col(r, 0);
  }
  return mat_mul(gathered, plan.mix);
}

inline CodeState apply_plan(const CodeState& s, const RepairPlan& plan) {
  validate_helpers(s.params, plan.failed, plan.helpers);
  CodeState out = s;
  out.Q[plan.failed] = regenerate(s, plan);
  return out;
}

struct RepairOutcome {
  CodeState state;
  RepairPlan plan;
  int attempts = 0;
};

/// Draws b_1..b_d and Z uniformly until the invariant holds on the repaired
/// state. The input state is never modified.
inline RepairOutcome repair_random(const CodeState& s, Node failed, std::span<const Node> helpers, const HSet& hset,
                                   std::uint64_t seed, int max_attempts = kDefaultMaxAttempts) {
  validate_helpers(s.params, failed, helpers);
  if (max_attempts < 1) throw Error(ErrorCode::OutOfRange, "max_attempts must be positive");
  const auto d = static_cast<std::size_t>(s.params.d);
  CounterRng rng(seed);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    RepairPlan plan{failed, std::vector<Node>(helpers.begin(), helpers.end()), detail::random_matrix(s.field, d, d, rng),
                    detail::random_matrix(s.field, d, d, rng)};
    CodeState next = apply_plan(s, plan);
    if (invariant_check(next, hset)) return {std::move(next), std::move(plan), attempt};
  }
  throw Error(ErrorCode::RepairFailed, "invariant not restored after " + std::to_string(max_attempts) + " attempts");
}

/// The deterministic repair used to show the per-h determinant is a nonzero
/// polynomial: helper s_j (the j-th node incremented by CONNECT) contributes
/// its h'_{s_j}-th column, Z is the identity, and the remaining helpers send
/// nothing.
inline RepairPlan witness_plan(const CodeState& s, Node failed, std::span<const Node> helpers, std::span<const int> h) {
  const ConnectResult conn = connect_run(s.params, h, helpers, failed);
  const auto d = static_cast<std::size_t>(s.params.d);
  RepairPlan plan{failed, conn.incremented, FieldMatrix(s.field, d, d), FieldMatrix::identity(s.field, d)};
  for (Node x : helpers)
    if (std::find(conn.incremented.begin(), conn.incremented.end(), x) == conn.incremented.end()) plan.helpers.push_back(x);
  for (std::size_t j = 0; j < conn.incremented.size(); ++j) {
    const Node sj = conn.incremented[j];
    plan.combine(static_cast<std::size_t>(conn.h_prime[sj] - 1), j) = 1;
  }
  return plan;
}

inline bool witness_repair_check(const CodeState& s, Node failed, std::span<const Node> helpers,
                                 std::span<const int> h, const HSet& hset) {
  if (!hset.contains(HVector(h.begin(), h.end()))) throw Error(ErrorCode::HNotMember, "h is not a member of H");
  const CodeState repaired = apply_plan(s, witness_plan(s, failed, helpers, h));
  return full_column_rank(column_selection(repaired, h));
}

/// Node i receives X^T Q_i: W rows, one column per stored packet.
inline std::vector<FieldMatrix> encode(const CodeState& s, const FieldMatrix& file) {
  if (static_cast<int>(file.rows()) != s.params.M) throw Error(ErrorCode::DimensionMismatch, "file must have M rows");
  if (file.field() != s.field) throw Error(ErrorCode::FieldMismatch, "file over a different field");
  const FieldMatrix xt = transpose(file);
  std::vector<FieldMatrix> out;
  out.reserve(s.Q.size());
  for (const auto& q : s.Q) out.push_back(mat_mul(xt, q));
  return out;
}

/// Recovers X from the packets of `nodes` (parallel to `packets`).
inline FieldMatrix decode(const CodeState& s, std::span<const Node> nodes, std::span<const FieldMatrix> packets) {
  if (nodes.size() != packets.size()) throw Error(ErrorCode::LengthMismatch, "one packet block per node");
  std::vector<FieldMatrix> coding;
  std::vector<FieldMatrix> data;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node v = nodes[i];
    if (v < 0 || v >= s.params.n) throw Error(ErrorCode::OutOfRange, "node out of range");
    coding.push_back(s.Q[v]);
    data.push_back(packets[i]);
  }
  const std::size_t w = packets.empty() ? s.packet_width : packets.front().rows();
  const FieldMatrix a = transpose(hconcat(s.field, static_cast<std::size_t>(s.params.M), coding));
  const FieldMatrix b = transpose(hconcat(s.field, w, data));
  if (mat_rank(a) != static_cast<std::size_t>(s.params.M)) {
    throw Error(ErrorCode::RankDeficient, "selected nodes do not span the file");
  }
  return solve(a, b);
}

inline nlohmann::json params_to_json(const Params& p) {
  return {{"n", p.n}, {"k", p.k}, {"d", p.d}, {"r", p.r}, {"M", p.M}, {"alpha", p.alpha}, {"beta", p.beta}};
}

// {"params":{...},"q":Q,"W":w,"Q":[matrix,...]}
inline nlohmann::json state_to_json(const CodeState& s) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& m : s.Q) q.push_back(m);
  return {{"params", params_to_json(s.params)}, {"q", s.field.q()}, {"W", s.packet_width}, {"Q", q}};
}

inline CodeState state_from_json(const nlohmann::json& j) {
  try {
    const auto& pj = j.at("params");
    const Params p = params_new(pj.at("n").get<int>(), pj.at("k").get<int>(), pj.at("d").get<int>(), pj.at("r").get<int>());
    if (pj.contains("M") && pj.at("M").get<int>() != p.M) {
      throw Error(ErrorCode::ParseError, "stored M disagrees with the parameters");
    }
    const FieldConfig f(j.at("q").get<std::uint64_t>());
    std::vector<FieldMatrix> q;
    for (const auto& m : j.at("Q")) q.push_back(matrix_from_json(m));
    return CodeState(p, f, j.value("W", std::size_t{1}), std::move(q));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("code state JSON: ") + e.what());
  }
}

}  // namespace lrrc
