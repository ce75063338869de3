#pragma once

// Explicit exact-repair code for (n,k,d,r) = (6,3,2,1), M = 4, alpha = 2.
//
// Built from a systematic (6,4) MDS generator G = [I_4 | p | p'] with
// p = (a1,a2,b1,b2) and p' = (a'1,a'2,b'1,b'2). Family {1,2,3} stores the
// systematic and parity columns; family {4,5,6} stores split a/b halves of
// p, p' and p + p'. Any single node is regenerated bit-exactly from two
// nodes of the other family, one packet each, while any one of them is
// unavailable.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lrrc/code_core.hpp"
#include "lrrc/error.hpp"
#include "lrrc/galois.hpp"

namespace lrrc::exact {

inline constexpr int kNodes = 6;
inline constexpr int kFileSize = 4;
inline constexpr int kAlpha = 2;
inline constexpr std::uint64_t kMinField = 7;

struct ExactCode {
  FieldConfig field;
  FieldMatrix G;                   // 4 x 6
  std::array<Elem, 2> a, a_bar;    // top halves of the two parity columns
  std::array<Elem, 2> b, b_bar;    // bottom halves
  std::vector<FieldMatrix> Q;      // six 4 x 2 coding matrices
};

/// One repair recipe: each helper sends coeffs[0]*P_1 + coeffs[1]*P_2 of its
/// stored packets, and the newcomer maps the two received packets r through
/// r * combine to get its two packets.
struct RepairRule {
  Node failed = 0;
  Node unavailable = 0;
  std::array<Node, 2> helpers{};
  std::array<std::array<Elem, 2>, 2> sends{};
  FieldMatrix combine;  // 2 x 2
};

inline int family_of(Node v) { return v / 3; }

/// Assembles the six coding matrices from the two parity columns without
/// checking any property.
inline ExactCode from_parity(const FieldConfig& f, const std::array<Elem, 4>& p, const std::array<Elem, 4>& p_bar) {
  FieldMatrix g(f, 4, 6);
  for (int i = 0; i < 4; ++i) {
    g(i, i) = 1;
    g(i, 4) = p[i] % f.q();
    g(i, 5) = p_bar[i] % f.q();
  }
  ExactCode code{f, g, {g(0, 4), g(1, 4)}, {g(0, 5), g(1, 5)}, {g(2, 4), g(3, 4)}, {g(2, 5), g(3, 5)}, {}};
  auto make = [&](std::array<std::array<Elem, 2>, 4> rows) {
    FieldMatrix m(f, 4, 2);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = rows[r][c];
    return m;
  };
  const auto& a = code.a;
  const auto& ab = code.a_bar;
  const auto& b = code.b;
  const auto& bb = code.b_bar;
  code.Q.push_back(make({{{1, 0}, {0, 1}, {0, 0}, {0, 0}}}));
  code.Q.push_back(make({{{0, 0}, {0, 0}, {1, 0}, {0, 1}}}));
  code.Q.push_back(make({{{a[0], ab[0]}, {a[1], ab[1]}, {b[0], bb[0]}, {b[1], bb[1]}}}));
  code.Q.push_back(make({{{a[0], 0}, {a[1], 0}, {0, b[0]}, {0, b[1]}}}));
  code.Q.push_back(make({{{ab[0], 0}, {ab[1], 0}, {0, bb[0]}, {0, bb[1]}}}));
  code.Q.push_back(make({{{f.add(a[0], ab[0]), 0}, {f.add(a[1], ab[1]), 0}, {0, f.add(b[0], bb[0])}, {0, f.add(b[1], bb[1])}}}));
  return code;
}

/// Helpers used when `unavailable` lies in the failed node's own family: the
/// first two nodes of the other family.
inline std::array<Node, 2> helpers_for(Node failed, Node unavailable) {
  const int other = 1 - family_of(failed);
  std::array<Node, 2> out{};
  int n = 0;
  for (Node v = other * 3; v < other * 3 + 3 && n < 2; ++v)
    if (v != unavailable) out[n++] = v;
  return out;
}

namespace detail {

// Coefficients helper `h` applies to its two packets when repairing `failed`.
inline std::array<Elem, 2> send_coefficients(const ExactCode& code, Node failed, Node h) {
  const int pos = failed % 3;  // position inside the failed node's family
  if (family_of(failed) == 0) {
    // Family-2 helpers hold (u,0),(0,v) splits: P_1 carries the a-part, P_2 the b-part.
    if (pos == 0) return {1, 0};
    if (pos == 1) return {0, 1};
    return {1, 1};
  }
  const FieldMatrix& qf = code.Q[failed];
  switch (h) {
    case 0: return {qf(0, 0), qf(1, 0)};  // node 1 holds e1,e2: rebuild the a-column
    case 1: return {qf(2, 1), qf(3, 1)};  // node 2 holds e3,e4: rebuild the b-column
    default:
      if (pos == 0) return {1, 0};
      if (pos == 1) return {0, 1};
      return {1, 1};
  }
}

inline FieldMatrix sent_vectors(const ExactCode& code, const std::array<Node, 2>& helpers,
                                const std::array<std::array<Elem, 2>, 2>& sends) {
  FieldMatrix r(code.field, 4, 2);
  for (int i = 0; i < 2; ++i) {
    const FieldMatrix& q = code.Q[helpers[i]];
    for (int row = 0; row < 4; ++row)
      r(row, i) = code.field.add(code.field.mul(q(row, 0), sends[i][0]), code.field.mul(q(row, 1), sends[i][1]));
  }
  return r;
}

}  // namespace detail

/// Throws InvalidPair for out-of-range or equal nodes, RankDeficient when the
/// two received coding vectors cannot produce the failed node's columns.
inline RepairRule repair_rule(const ExactCode& code, Node failed, Node unavailable) {
  if (failed < 0 || failed >= kNodes || unavailable < 0 || unavailable >= kNodes || failed == unavailable) {
    throw Error(ErrorCode::InvalidPair, "(failed, unavailable) = (" + std::to_string(failed + 1) + ", " +
                                            std::to_string(unavailable + 1) + ")");
  }
  RepairRule rule{failed, unavailable, helpers_for(failed, unavailable), {}, FieldMatrix(code.field, 2, 2)};
  for (int i = 0; i < 2; ++i) rule.sends[i] = detail::send_coefficients(code, failed, rule.helpers[i]);
  rule.combine = solve(detail::sent_vectors(code, rule.helpers, rule.sends), code.Q[failed]);
  return rule;
}

/// Stored packets per node: X^T Q_i, W x 2.
inline std::vector<FieldMatrix> store(const ExactCode& code, const FieldMatrix& file) {
  if (file.rows() != kFileSize) throw Error(ErrorCode::DimensionMismatch, "file must have 4 rows");
  const FieldMatrix xt = transpose(file);
  std::vector<FieldMatrix> out;
  for (const auto& q : code.Q) out.push_back(mat_mul(xt, q));
  return out;
}

/// Regenerates the failed node's two packets from what the helpers send.
inline FieldMatrix exact_repair(const ExactCode& code, const std::vector<FieldMatrix>& stored, Node failed,
                                Node unavailable) {
  const RepairRule rule = repair_rule(code, failed, unavailable);
  const std::size_t w = stored.at(rule.helpers[0]).rows();
  FieldMatrix received(code.field, w, 2);
  for (int i = 0; i < 2; ++i) {
    const FieldMatrix& p = stored.at(rule.helpers[i]);
    for (std::size_t s = 0; s < w; ++s)
      received(s, i) = code.field.add(code.field.mul(p(s, 0), rule.sends[i][0]), code.field.mul(p(s, 1), rule.sends[i][1]));
  }
  return mat_mul(received, rule.combine);
}

struct CheckEntry {
  std::vector<Node> nodes;
  std::size_t rank = 0;
  bool ok = false;
};

struct RepairEntry {
  Node failed = 0;
  Node unavailable = 0;
  std::optional<std::array<Node, 2>> helpers;
  int regenerations = 0;
  int exact = 0;
  bool ok = false;
  std::string error;
};

struct ExactReport {
  std::vector<CheckEntry> mds;             // 15 column 4-subsets of G
  std::vector<CheckEntry> family_pairs;    // within-family node pairs
  std::vector<CheckEntry> independence;    // (a, a_bar) and (b, b_bar)
  std::vector<CheckEntry> reconstruction;  // 20 node triples
  std::vector<RepairEntry> repairs;        // 30 (failed, unavailable) pairs
  bool pass = false;
};

namespace detail {

inline std::vector<std::vector<Node>> subsets(int n, int k) {
  std::vector<std::vector<Node>> out;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    std::vector<Node> s;
    for (int i = 0; i < n; ++i)
      if (pick[i]) s.push_back(i);
    out.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

inline CheckEntry rank_entry(const FieldConfig& f, std::vector<Node> nodes, const std::vector<FieldMatrix>& blocks,
                             std::size_t need) {
  std::vector<FieldMatrix> picked;
  for (Node v : nodes) picked.push_back(blocks[v]);
  const std::size_t rank = mat_rank(hconcat(f, blocks.front().rows(), picked));
  return {std::move(nodes), rank, rank == need};
}

}  // namespace detail

inline ExactReport verify_exact_code(const ExactCode& code) {
  const FieldConfig& f = code.field;
  ExactReport rep;
  std::vector<FieldMatrix> g_cols;
  for (int c = 0; c < kNodes; ++c) {
    FieldMatrix col(f, 4, 1);
    for (int r = 0; r < 4; ++r) col(r, 0) = code.G(r, c);
    g_cols.push_back(std::move(col));
  }
  for (auto& s : detail::subsets(kNodes, 4)) rep.mds.push_back(detail::rank_entry(f, s, g_cols, 4));
  for (int fam = 0; fam < 2; ++fam)
    for (auto& s : detail::subsets(3, 2)) {
      for (Node& v : s) v += fam * 3;
      rep.family_pairs.push_back(detail::rank_entry(f, s, code.Q, 4));
    }
  for (const auto& [u, v] : {std::pair{code.a, code.a_bar}, std::pair{code.b, code.b_bar}}) {
    const FieldMatrix m = FieldMatrix(f, 2, 2, {u[0], v[0], u[1], v[1]});
    const std::size_t rank = mat_rank(m);
    rep.independence.push_back({{}, rank, rank == 2});
  }
  for (auto& s : detail::subsets(kNodes, 3)) rep.reconstruction.push_back(detail::rank_entry(f, s, code.Q, 4));

  for (Node failed = 0; failed < kNodes; ++failed) {
    for (Node unavailable = 0; unavailable < kNodes; ++unavailable) {
      if (failed == unavailable) continue;
      RepairEntry e{failed, unavailable, std::nullopt, 0, 0, false, {}};
      try {
        e.helpers = repair_rule(code, failed, unavailable).helpers;
        for (int basis = 0; basis < kFileSize; ++basis) {
          FieldMatrix file(f, kFileSize, 1);
          file(basis, 0) = 1;
          const auto stored = store(code, file);
          ++e.regenerations;
          if (exact_repair(code, stored, failed, unavailable) == stored[failed]) ++e.exact;
        }
        e.ok = e.exact == kFileSize;
      } catch (const Error& err) {
        e.error = err.what();
      }
      rep.repairs.push_back(std::move(e));
    }
  }
  auto all_ok = [](const auto& v) {
    return std::all_of(v.begin(), v.end(), [](const auto& e) { return e.ok; });
  };
  rep.pass = all_ok(rep.mds) && all_ok(rep.family_pairs) && all_ok(rep.independence) && all_ok(rep.reconstruction) &&
             all_ok(rep.repairs);
  return rep;
}

/// Systematic Reed-Solomon generator over evaluation points 0..5, reduced to
/// [I_4 | p | p'], then fully verified.
inline ExactCode build_exact_code(std::uint64_t q = kMinField) {
  if (q < kMinField) throw Error(ErrorCode::FieldTooSmall, "exact (6,3,2,1) code needs q >= 7");
  const FieldConfig f(q);
  FieldMatrix v(f, 4, 6);
  for (int c = 0; c < kNodes; ++c)
    for (int r = 0; r < 4; ++r) v(r, c) = f.pow(static_cast<Elem>(c), static_cast<std::uint64_t>(r));
  const FieldMatrix g = mat_mul(inverse(select_columns(v, 4)), v);
  ExactCode code = from_parity(f, {g(0, 4), g(1, 4), g(2, 4), g(3, 4)}, {g(0, 5), g(1, 5), g(2, 5), g(3, 5)});
  if (!verify_exact_code(code).pass) {
    throw Error(ErrorCode::InvariantViolation, "generated code failed verification over GF(" + std::to_string(q) + ")");
  }
  return code;
}

inline CodeState to_code_state(const ExactCode& code) {
  return CodeState(params_new(6, 3, 2, 1), code.field, 1, code.Q);
}

inline nlohmann::json rule_to_json(const RepairRule& r) {
  return {{"failed", r.failed + 1},
          {"unavailable", r.unavailable + 1},
          {"helpers", {r.helpers[0] + 1, r.helpers[1] + 1}},
          {"sends", {r.sends[0], r.sends[1]}},
          {"combine", r.combine}};
}

inline nlohmann::json code_to_json(const ExactCode& code) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& m : code.Q) q.push_back(m);
  nlohmann::json rules = nlohmann::json::array();
  for (Node failed = 0; failed < kNodes; ++failed)
    for (Node unavailable = 0; unavailable < kNodes; ++unavailable)
      if (failed != unavailable) rules.push_back(rule_to_json(repair_rule(code, failed, unavailable)));
  return {{"q", code.field.q()}, {"G", code.G}, {"Q", q}, {"rules", rules}};
}

inline nlohmann::json report_to_json(const ExactReport& rep) {
  auto entries = [](const std::vector<CheckEntry>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : v) out.push_back({{"nodes", lrrc::detail::one_based(e.nodes)}, {"rank", e.rank}, {"ok", e.ok}});
    return out;
  };
  nlohmann::json repairs = nlohmann::json::array();
  for (const auto& e : rep.repairs) {
    nlohmann::json j{{"failed", e.failed + 1},
                     {"unavailable", e.unavailable + 1},
                     {"regenerations", e.regenerations},
                     {"exact", e.exact},
                     {"ok", e.ok}};
    if (e.helpers) j["helpers"] = {(*e.helpers)[0] + 1, (*e.helpers)[1] + 1};
    if (!e.error.empty()) j["error"] = e.error;
    repairs.push_back(std::move(j));
  }
  return {{"mds", entries(rep.mds)},
          {"family_pairs", entries(rep.family_pairs)},
          {"independence", entries(rep.independence)},
          {"reconstruction", entries(rep.reconstruction)},
          {"repairs", repairs},
          {"pass", rep.pass}};
}

}  // namespace lrrc::exact
