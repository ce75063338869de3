#pragma once

// Brute-force reference computations used to derive and cross-check expected
// values. Nothing here calls into the library's algorithms; only plain
// integers and vectors.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

inline bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

using IntMatrix = std::vector<std::vector<std::int64_t>>;

inline std::int64_t mod(std::int64_t v, std::int64_t q) { return ((v % q) + q) % q; }

/// Laplace expansion along the first row, reduced mod q.
inline std::int64_t cofactor_det(const IntMatrix& m, std::int64_t q) {
  const std::size_t n = m.size();
  if (n == 0) return 1 % q;
  if (n == 1) return mod(m[0][0], q);
  std::int64_t total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    IntMatrix minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<std::int64_t> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[r][j]);
      minor.push_back(row);
    }
    const std::int64_t term = mod(m[0][c], q) * cofactor_det(minor, q) % q;
    total = mod(total + ((c % 2 == 0) ? term : -term), q);
  }
  return total;
}

/// b_i = max(0, d - #{earlier nodes in a different family}), families are
/// blocks of f consecutive 0-based node ids.
inline std::vector<int> b_vector(const std::vector<int>& perm, int d, int f) {
  std::vector<int> b;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    int outside = 0;
    for (std::size_t j = 0; j < i; ++j) outside += (perm[j] / f != perm[i] / f) ? 1 : 0;
    b.push_back(std::max(0, d - outside));
  }
  return b;
}

inline std::vector<int> c_vector(const std::vector<int>& b, int M) {
  std::vector<int> c(b.size(), 0);
  int remaining = M;
  for (std::size_t i = 0; i < b.size() && remaining > 0; ++i) {
    c[i] = std::min(b[i], remaining);
    remaining -= c[i];
  }
  return c;
}

inline int file_size(int n, int k, int d, int r) {
  const int f = n - d - r;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int best = 1 << 30;
  do {
    const auto b = b_vector(perm, d, f);
    best = std::min(best, std::accumulate(b.begin(), b.begin() + k, 0));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Sorted-prefix-sum dominance.
inline bool majorizes(std::vector<int> a, std::vector<int> b) {
  std::sort(a.rbegin(), a.rend());
  std::sort(b.rbegin(), b.rend());
  int sa = 0;
  int sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (sa < sb) return false;
  }
  return true;
}

/// Membership in H by scanning all n! permutations.
inline bool h_member(int n, int d, int r, int M, const std::vector<int>& h) {
  const int f = n - d - r;
  for (int v : h)
    if (v < 0 || v > d) return false;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool sorted = true;
    for (int i = 0; i + 1 < n && sorted; ++i) sorted = h[perm[i]] >= h[perm[i + 1]];
    if (sorted && majorizes(c_vector(b_vector(perm, d, f), M), h)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

inline std::vector<std::vector<int>> h_set(int n, int d, int r, int M) {
  std::vector<std::vector<int>> out;
  std::vector<int> h(n, 0);
  while (true) {
    if (h_member(n, d, r, M, h)) out.push_back(h);
    int i = n - 1;
    while (i >= 0 && h[i] == d) h[i--] = 0;
    if (i < 0) break;
    ++h[i];
  }
  return out;
}

}  // namespace oracle
