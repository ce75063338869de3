#pragma once

// Procedure CONNECT: given h in H, a failed node and its d helpers, move the
// failed node's h-value onto helpers one unit at a time, producing h' in H
// with h'_failed = 0. The permutation is maintained alongside so that the
// sortedness and majorization invariants can be checked at every step.

#include <algorithm>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrrc/error.hpp"
#include "lrrc/mfhs_model.hpp"

namespace lrrc {

/// Throws InvalidHelpers unless `helpers` are d distinct nodes outside the
/// failed node's family.
inline void validate_helpers(const Params& p, Node failed, std::span<const Node> helpers) {
  if (failed < 0 || failed >= p.n) throw Error(ErrorCode::InvalidHelpers, "failed node out of range");
  if (static_cast<int>(helpers.size()) != p.d) {
    throw Error(ErrorCode::InvalidHelpers,
                "expected " + std::to_string(p.d) + " helpers, got " + std::to_string(helpers.size()));
  }
  const FamilyLayout layout(p);
  std::set<Node> seen;
  for (Node x : helpers) {
    if (x < 0 || x >= p.n) throw Error(ErrorCode::InvalidHelpers, "helper out of range");
    if (layout.same_family(x, failed)) {
      throw Error(ErrorCode::InvalidHelpers, "helper " + std::to_string(x + 1) + " shares the failed node's family");
    }
    if (!seen.insert(x).second) throw Error(ErrorCode::InvalidHelpers, "duplicate helper");
  }
}

struct ConnectState {
  int t = 0;
  HVector h;
  std::vector<Node> remaining;            // helpers not yet incremented
  Perm perm;
  std::vector<std::vector<Node>> classes;  // classes[g] = nodes with h == g
};

struct ConnectResult {
  HVector h_prime;
  std::vector<Node> incremented;  // in the order they were picked
  std::vector<ConnectState> trace;
};

namespace detail {

inline std::vector<std::vector<Node>> value_classes(const Params& p, std::span<const int> h) {
  std::vector<std::vector<Node>> classes(p.d + 1);
  for (Node v = 0; v < p.n; ++v) classes[h[v]].push_back(v);
  return classes;
}

inline void require_member(const Params& p, std::span<const int> h) {
  if (static_cast<int>(h.size()) != p.n) throw Error(ErrorCode::LengthMismatch, "h length differs from n");
  if (!h_membership(p, h).member) throw Error(ErrorCode::HNotMember, "h is not a member of H");
}

inline bool contains(std::span<const Node> nodes, Node v) { return std::find(nodes.begin(), nodes.end(), v) != nodes.end(); }

}  // namespace detail

/// Nonincreasing in h; helpers ahead of non-helpers inside each value
/// class; ascending node index otherwise.
inline Perm initial_perm(const Params& p, std::span<const int> h, std::span<const Node> helpers, Node failed) {
  detail::require_member(p, h);
  validate_helpers(p, failed, helpers);
  std::vector<Node> order(p.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Node a, Node b) {
    if (h[a] != h[b]) return h[a] > h[b];
    const bool ha = detail::contains(helpers, a);
    const bool hb = detail::contains(helpers, b);
    if (ha != hb) return ha;
    return a < b;
  });
  return Perm(std::move(order));
}

/// Remaining helper with the smallest h value, earliest position among ties.
inline Node step_select(const ConnectState& state) {
  if (state.remaining.empty()) throw Error(ErrorCode::EmptyHelperPool, "no helpers left to increment");
  return *std::min_element(state.remaining.begin(), state.remaining.end(), [&](Node a, Node b) {
    if (state.h[a] != state.h[b]) return state.h[a] < state.h[b];
    return state.perm.position(a) < state.perm.position(b);
  });
}

/// Re-sorts after `x` was incremented and `failed` decremented. Only the
/// failed node may change its place relative to the others: it goes behind
/// every node now sharing its value. Throws InternalContradiction if some
/// other pair would have to swap.
inline Perm step_resort(const Perm& previous, std::span<const int> h_new, Node failed, Node x) {
  std::vector<Node> order = previous.order();
  std::stable_sort(order.begin(), order.end(), [&](Node a, Node b) {
    if (h_new[a] != h_new[b]) return h_new[a] > h_new[b];
    return (a == failed ? 1 : 0) < (b == failed ? 1 : 0);
  });
  Perm next(std::move(order));
  Node last = -1;
  for (Node v : next.order()) {
    if (v == failed) continue;
    if (last != -1 && previous.position(last) > previous.position(v)) {
      throw Error(ErrorCode::InternalContradiction, "re-sort after incrementing node " + std::to_string(x + 1) +
                                                        " reorders nodes " + std::to_string(last + 1) + " and " +
                                                        std::to_string(v + 1));
    }
    last = v;
  }
  return next;
}

inline ConnectResult connect_run(const Params& p, std::span<const int> h, std::span<const Node> helpers, Node failed) {
  ConnectState state;
  state.perm = initial_perm(p, h, helpers, failed);
  state.h.assign(h.begin(), h.end());
  state.remaining.assign(helpers.begin(), helpers.end());
  std::sort(state.remaining.begin(), state.remaining.end());
  state.classes = detail::value_classes(p, state.h);

  auto check_step = [&](const ConnectState& s) {
    for (int v : s.h) {
      if (v < 0 || v > p.d) {
        throw Error(ErrorCode::InternalContradiction, "h value left [0, d] at step " + std::to_string(s.t));
      }
    }
    if (!sorted_along(s.h, s.perm)) {
      throw Error(ErrorCode::InternalContradiction, "h not sorted along permutation at step " + std::to_string(s.t));
    }
    if (!majorizes(score_vectors(p, s.perm).c, s.h)) {
      throw Error(ErrorCode::InternalContradiction, "c(perm) fails to majorize h at step " + std::to_string(s.t));
    }
  };

  ConnectResult result;
  check_step(state);
  result.trace.push_back(state);
  const int rounds = h[failed];
  for (int t = 1; t <= rounds; ++t) {
    const Node x = step_select(state);
    ConnectState next;
    next.t = t;
    next.h = state.h;
    ++next.h[x];
    --next.h[failed];
    next.remaining = state.remaining;
    next.remaining.erase(std::find(next.remaining.begin(), next.remaining.end(), x));
    if (next.h[x] > p.d) {
      throw Error(ErrorCode::InternalContradiction, "helper " + std::to_string(x + 1) + " pushed above d");
    }
    next.perm = step_resort(state.perm, next.h, failed, x);
    next.classes = detail::value_classes(p, next.h);
    check_step(next);
    result.incremented.push_back(x);
    result.trace.push_back(next);
    state = std::move(next);
  }
  result.h_prime = state.h;
  if (!h_membership(p, result.h_prime).member) {
    throw Error(ErrorCode::InternalContradiction, "output h' is not a member of H");
  }
  return result;
}

namespace detail {

inline std::vector<int> one_based(std::span<const Node> nodes) {
  std::vector<int> out(nodes.begin(), nodes.end());
  for (int& v : out) ++v;
  return out;
}

}  // namespace detail

inline nlohmann::json connect_to_json(const ConnectResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& s : r.trace) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : s.classes) classes.push_back(detail::one_based(c));
    trace.push_back({{"t", s.t},
                     {"h", s.h},
                     {"remaining_helpers", detail::one_based(s.remaining)},
                     {"perm", detail::one_based(s.perm.order())},
                     {"classes", classes}});
  }
  return {{"h_prime", r.h_prime}, {"incremented", detail::one_based(r.incremented)}, {"trace", trace}};
}

}  // namespace lrrc
