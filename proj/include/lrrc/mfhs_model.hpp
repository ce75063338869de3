#pragma once

// Combinatorics of family helper selection at the minimum-bandwidth point:
// parameters and file size, the family partition, per-permutation score
// vectors b and c, weak majorization, and the set H of admissible column
// selections.
//
// Nodes are 0-based throughout the library. JSON and CLI surfaces print
// them 1-based.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "lrrc/error.hpp"

namespace lrrc {

using Node = int;
using HVector = std::vector<int>;

struct Params {
  int n = 0;
  int k = 0;
  int d = 0;
  int r = 0;
  int M = 0;      // file size in packets
  int alpha = 0;  // packets stored per node (= d)
  int beta = 1;   // packets sent per helper

  int family_size() const noexcept { return n - d - r; }
  int family_count() const noexcept { return n / family_size(); }

  friend bool operator==(const Params&, const Params&) = default;
};

namespace detail {

inline void validate_scope(int n, int k, int d, int r) {
  if (n < 1 || k < 1 || k > n || d < 1 || r < 0) {
    throw Error(ErrorCode::OutOfScope, "require 1 <= k <= n, d >= 1, r >= 0");
  }
  const int f = n - d - r;
  if (f < 2) throw Error(ErrorCode::OutOfScope, "family size n-d-r = " + std::to_string(f) + " is below 2");
  if (n % f != 0) {
    throw Error(ErrorCode::OutOfScope,
                "n mod (n-d-r) = " + std::to_string(n % f) + "; incomplete families are not supported");
  }
}

// Sum over the first k positions of (d - z_i)^+ for a sequence of family labels.
inline int prefix_score(std::span<const int> families, int k, int d) {
  int total = 0;
  for (int i = 0; i < k; ++i) {
    int same = 0;
    for (int j = 0; j < i; ++j) same += families[j] == families[i] ? 1 : 0;
    total += std::max(0, d - (i - same));
  }
  return total;
}

inline int file_size_exhaustive(int n, int k, int d, int r) {
  const int f = n - d - r;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> fam(n);
  int best = INT32_MAX;
  do {
    for (int i = 0; i < n; ++i) fam[i] = order[i] / f;
    best = std::min(best, prefix_score(fam, k, d));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

// Scores depend only on the family-label sequence of the first k nodes, and
// only up to relabeling of families; enumerate canonical label sequences.
inline int file_size_by_pattern(int n, int k, int d, int r) {
  const int f = n - d - r;
  const int families = n / f;
  std::vector<int> labels(k);
  std::vector<int> used(families, 0);
  int best = INT32_MAX;
  std::function<void(int, int)> extend = [&](int pos, int opened) {
    if (pos == k) {
      best = std::min(best, prefix_score(labels, k, d));
      return;
    }
    const int limit = std::min(families, opened + 1);
    for (int fam = 0; fam < limit; ++fam) {
      if (used[fam] == f) continue;
      labels[pos] = fam;
      ++used[fam];
      extend(pos + 1, std::max(opened, fam + 1));
      --used[fam];
    }
  };
  extend(0, 0);
  return best;
}

}  // namespace detail

/// Minimum over node permutations of sum_{i<=k} (d - z_i)^+, where z_i counts
/// earlier nodes outside the family of the i-th node. Exhaustive for n <= 8.
inline int file_size(const Params& p) {
  return p.n <= 8 ? detail::file_size_exhaustive(p.n, p.k, p.d, p.r) : detail::file_size_by_pattern(p.n, p.k, p.d, p.r);
}

inline Params params_new(int n, int k, int d, int r) {
  detail::validate_scope(n, k, d, r);
  Params p{n, k, d, r, 0, d, 1};
  p.M = file_size(p);
  return p;
}

/// Families are consecutive blocks of f nodes.
class FamilyLayout {
 public:
  explicit FamilyLayout(const Params& p) : n_(p.n), f_(p.family_size()) {}

  int family_of(Node v) const { return v / f_; }
  int family_count() const { return n_ / f_; }

  std::vector<Node> members(int family) const {
    std::vector<Node> out(f_);
    std::iota(out.begin(), out.end(), family * f_);
    return out;
  }

  /// Nodes allowed to help repair `v`: everything outside its family.
  std::vector<Node> helper_universe(Node v) const {
    std::vector<Node> out;
    for (Node u = 0; u < n_; ++u)
      if (family_of(u) != family_of(v)) out.push_back(u);
    return out;
  }

  bool same_family(Node a, Node b) const { return family_of(a) == family_of(b); }

 private:
  int n_;
  int f_;
};

/// A node permutation with its inverse (position) map.
class Perm {
 public:
  Perm() = default;
  explicit Perm(std::vector<Node> order) : order_(std::move(order)), pos_(order_.size(), -1) {
    const int n = static_cast<int>(order_.size());
    for (int i = 0; i < n; ++i) {
      const Node v = order_[i];
      if (v < 0 || v >= n || pos_[v] != -1) throw Error(ErrorCode::PreconditionViolated, "not a permutation");
      pos_[v] = i;
    }
  }

  static Perm identity(int n) {
    std::vector<Node> o(n);
    std::iota(o.begin(), o.end(), 0);
    return Perm(std::move(o));
  }

  int size() const noexcept { return static_cast<int>(order_.size()); }
  Node at(int i) const { return order_[i]; }
  int position(Node v) const { return pos_[v]; }
  const std::vector<Node>& order() const noexcept { return order_; }

  Perm swapped(int i) const {
    auto o = order_;
    std::swap(o[i], o[i + 1]);
    return Perm(std::move(o));
  }

  friend bool operator==(const Perm& a, const Perm& b) { return a.order_ == b.order_; }

 private:
  std::vector<Node> order_;
  std::vector<int> pos_;
};

struct ScoreVector {
  std::vector<int> b;
  std::vector<int> c;
};

inline std::vector<int> b_scores(const Params& p, const Perm& perm) {
  const FamilyLayout layout(p);
  std::vector<int> b(p.n);
  for (int i = 0; i < p.n; ++i) {
    int same = 0;
    for (int j = 0; j < i; ++j) same += layout.same_family(perm.at(j), perm.at(i)) ? 1 : 0;
    b[i] = std::max(0, p.d - (i - same));
  }
  return b;
}

/// Truncates b at the shortest prefix reaching `total` so the result sums to it.
inline std::vector<int> truncate_scores(std::span<const int> b, int total) {
  std::vector<int> c(b.size(), 0);
  int acc = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (acc + b[i] >= total) {
      c[i] = total - acc;
      return c;
    }
    c[i] = b[i];
    acc += b[i];
  }
  return c;
}

inline ScoreVector score_vectors(const Params& p, const Perm& perm) {
  if (perm.size() != p.n) throw Error(ErrorCode::LengthMismatch, "permutation length differs from n");
  ScoreVector s;
  s.b = b_scores(p, perm);
  s.c = truncate_scores(s.b, p.M);
  return s;
}

/// Weak majorization: every prefix sum of the sorted-descending `a` is at
/// least the matching prefix sum of the sorted-descending `b`.
inline bool majorizes(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "majorizes: length mismatch");
  std::vector<int> sa(a.begin(), a.end());
  std::vector<int> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end(), std::greater<>());
  std::sort(sb.begin(), sb.end(), std::greater<>());
  long long pa = 0;
  long long pb = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    pa += sa[i];
    pb += sb[i];
    if (pa < pb) return false;
  }
  return true;
}

inline bool sorted_along(std::span<const int> h, const Perm& perm) {
  for (int i = 0; i + 1 < perm.size(); ++i)
    if (h[perm.at(i)] < h[perm.at(i + 1)]) return false;
  return true;
}

/// Nonincreasing order of h, ties broken by ascending node index.
inline Perm canonical_sorting_perm(std::span<const int> h) {
  std::vector<Node> o(h.size());
  std::iota(o.begin(), o.end(), 0);
  std::stable_sort(o.begin(), o.end(), [&](Node a, Node b) { return h[a] > h[b]; });
  return Perm(std::move(o));
}

/// Calls `visit` for each permutation along which h is nonincreasing. Stops
/// early when `visit` returns false.
inline void for_each_sorting_perm(std::span<const int> h, const std::function<bool(const Perm&)>& visit) {
  const Perm base = canonical_sorting_perm(h);
  std::vector<Node> order = base.order();
  // Equal-value runs in the canonical order; each is permuted independently.
  std::vector<std::pair<int, int>> runs;
  for (int i = 0; i < static_cast<int>(order.size());) {
    int j = i;
    while (j < static_cast<int>(order.size()) && h[order[j]] == h[order[i]]) ++j;
    if (j - i > 1) runs.emplace_back(i, j);
    i = j;
  }
  std::function<bool(std::size_t)> recurse = [&](std::size_t run) -> bool {
    if (run == runs.size()) return visit(Perm(order));
    auto [lo, hi] = runs[run];
    std::sort(order.begin() + lo, order.begin() + hi);
    do {
      if (!recurse(run + 1)) return false;
    } while (std::next_permutation(order.begin() + lo, order.begin() + hi));
    return true;
  };
  recurse(0);
}

enum class MembershipMode {
  Auto,        // canonical ordering when f = 2, exhaustive otherwise
  Canonical,   // only the canonical sorting permutation
  Exhaustive,  // every sorting permutation
};

struct MembershipResult {
  bool member = false;
  std::optional<Perm> witness;
};

inline MembershipResult h_membership(const Params& p, std::span<const int> h,
                                     MembershipMode mode = MembershipMode::Auto) {
  if (static_cast<int>(h.size()) != p.n) throw Error(ErrorCode::LengthMismatch, "h length differs from n");
  for (int v : h)
    if (v < 0 || v > p.d) return {};
  if (mode == MembershipMode::Auto) {
    mode = p.family_size() == 2 ? MembershipMode::Canonical : MembershipMode::Exhaustive;
  }
  MembershipResult out;
  auto try_perm = [&](const Perm& perm) {
    if (majorizes(score_vectors(p, perm).c, h)) {
      out.member = true;
      out.witness = perm;
      return false;
    }
    return true;
  };
  if (mode == MembershipMode::Canonical) {
    try_perm(canonical_sorting_perm(h));
  } else {
    for_each_sorting_perm(h, try_perm);
  }
  return out;
}

/// All members of H for one parameter set, in lexicographic order.
class HSet {
 public:
  static constexpr std::uint64_t kMaxCandidates = 10'000'000;

  static HSet enumerate(const Params& p, MembershipMode mode = MembershipMode::Auto) {
    std::uint64_t candidates = 1;
    for (int i = 0; i < p.n; ++i) {
      candidates *= static_cast<std::uint64_t>(p.d + 1);
      if (candidates > kMaxCandidates) {
        throw Error(ErrorCode::TooLarge, "(d+1)^n exceeds " + std::to_string(kMaxCandidates) + " candidates");
      }
    }
    HSet set;
    set.params_ = p;
    HVector h(p.n, 0);
    for (std::uint64_t c = 0; c < candidates; ++c) {
      auto res = h_membership(p, h, mode);
      if (res.member) {
        set.index_.emplace(h, set.members_.size());
        set.members_.push_back(h);
        set.witnesses_.push_back(*res.witness);
      }
      // odometer, last coordinate fastest
      for (int i = p.n - 1; i >= 0; --i) {
        if (++h[i] <= p.d) break;
        h[i] = 0;
      }
    }
    return set;
  }

  const Params& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<HVector>& members() const noexcept { return members_; }
  const HVector& operator[](std::size_t i) const { return members_[i]; }
  const Perm& witness(std::size_t i) const { return witnesses_[i]; }

  bool contains(const HVector& h) const { return index_.contains(h); }
  std::optional<std::size_t> index_of(const HVector& h) const {
    auto it = index_.find(h);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  Params params_;
  std::vector<HVector> members_;
  std::vector<Perm> witnesses_;
  std::map<HVector, std::size_t> index_;
};

/// Process-wide cache of enumerated sets keyed by (n,k,d,r).
inline std::shared_ptr<const HSet> cached_hset(const Params& p) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const HSet>> cache;
  const auto key = std::make_tuple(p.n, p.k, p.d, p.r);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto set = std::make_shared<const HSet>(HSet::enumerate(p));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(set)).first->second;
}

/// True iff c(perm') majorizes h, where perm' exchanges positions i and i+1
/// (0-based) of `perm`. Requires f = 2, h sorted along perm and equal values
/// at the two swapped positions.
inline bool swap_preserves(const Params& p, std::span<const int> h, const Perm& perm, int i) {
  if (p.family_size() != 2) throw Error(ErrorCode::PreconditionViolated, "swap check requires family size 2");
  if (static_cast<int>(h.size()) != p.n || perm.size() != p.n) {
    throw Error(ErrorCode::LengthMismatch, "h or permutation length differs from n");
  }
  if (i < 0 || i + 1 >= p.n) throw Error(ErrorCode::OutOfRange, "swap position out of range");
  if (!sorted_along(h, perm)) throw Error(ErrorCode::PreconditionViolated, "h is not sorted along the permutation");
  if (h[perm.at(i)] != h[perm.at(i + 1)]) {
    throw Error(ErrorCode::PreconditionViolated, "swapped nodes carry different h values");
  }
  return majorizes(score_vectors(p, perm.swapped(i)).c, h);
}

}  // namespace lrrc
