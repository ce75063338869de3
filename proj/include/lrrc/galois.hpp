#pragma once

// Prime-field arithmetic and a small dense-matrix kernel over GF(q).
//
// Elements are canonical residues in [0, q) stored as 64-bit words; products
// go through a 128-bit intermediate so any q <= 2^62 is supported.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lrrc/error.hpp"

namespace lrrc {

using Elem = std::uint64_t;

namespace detail {

inline Elem mulmod(Elem a, Elem b, Elem m) {
  return static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % m);
}

inline Elem powmod(Elem base, Elem exp, Elem m) {
  Elem result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

}  // namespace detail

/// Deterministic Miller-Rabin; the witness set below is exact for all 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    Elem x = detail::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Smallest prime >= n.
inline std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  if (n % 2 == 0) ++n;
  while (!is_prime(n)) n += 2;
  return n;
}

class FieldConfig {
 public:
  static constexpr std::uint64_t kMaxModulus = 1ULL << 62;

  explicit FieldConfig(std::uint64_t q) : q_(q) {
    if (q < 2 || q > kMaxModulus) {
      throw Error(ErrorCode::OutOfRange, "field modulus " + std::to_string(q) + " outside [2, 2^62]");
    }
    if (!is_prime(q)) throw Error(ErrorCode::NotPrime, std::to_string(q) + " is not prime");
  }

  std::uint64_t q() const noexcept { return q_; }

  Elem reduce(std::int64_t v) const {
    const auto m = static_cast<std::int64_t>(q_);
    const std::int64_t r = v % m;
    return static_cast<Elem>(r < 0 ? r + m : r);
  }
  Elem add(Elem a, Elem b) const noexcept { return a >= q_ - b ? a - (q_ - b) : a + b; }
  Elem sub(Elem a, Elem b) const noexcept { return a >= b ? a - b : a + (q_ - b); }
  Elem neg(Elem a) const noexcept { return a == 0 ? 0 : q_ - a; }
  Elem mul(Elem a, Elem b) const noexcept { return detail::mulmod(a, b, q_); }
  Elem pow(Elem a, std::uint64_t e) const noexcept { return detail::powmod(a, e, q_); }
  Elem inv(Elem a) const {
    if (a == 0) throw Error(ErrorCode::OutOfRange, "inverse of zero");
    return pow(a, q_ - 2);
  }

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;

 private:
  std::uint64_t q_;
};

inline FieldConfig field_new(std::uint64_t q) { return FieldConfig(q); }

/// Dense row-major matrix over a prime field.
class FieldMatrix {
 public:
  FieldMatrix(FieldConfig field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

  FieldMatrix(FieldConfig field, std::size_t rows, std::size_t cols, std::vector<Elem> entries)
      : field_(field), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
      throw Error(ErrorCode::DimensionMismatch, "entry count does not match rows x cols");
    }
    for (const Elem e : entries_) {
      if (e >= field_.q()) throw Error(ErrorCode::OutOfRange, "matrix entry not a canonical residue");
    }
  }

  /// Builds from signed integers, reducing each into [0, q).
  static FieldMatrix from_rows(FieldConfig field, const std::vector<std::vector<std::int64_t>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    FieldMatrix m(field, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw Error(ErrorCode::DimensionMismatch, "ragged rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = field.reduce(rows[i][j]);
    }
    return m;
  }

  static FieldMatrix identity(FieldConfig field, std::size_t n) {
    FieldMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  const FieldConfig& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const Elem> entries() const noexcept { return entries_; }

  Elem& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  Elem operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::vector<Elem> column(std::size_t c) const {
    std::vector<Elem> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](Elem e) { return e == 0; });
  }

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

 private:
  FieldConfig field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Elem> entries_;
};

namespace detail {

inline void require_same_field(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.field() != b.field()) throw Error(ErrorCode::FieldMismatch, "operands over different fields");
}

// In-place forward elimination with row swaps. Returns the rank and the
// determinant sign/scale bookkeeping needed by mat_det.
struct Elimination {
  std::size_t rank = 0;
  Elem det = 1;  // product of pivots with sign flips; meaningful for square input
};

inline Elimination forward_eliminate(FieldMatrix& m) {
  const FieldConfig& f = m.field();
  Elimination out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && m(pivot, col) == 0) ++pivot;
    if (pivot == m.rows()) {
      out.det = 0;
      continue;
    }
    if (pivot != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(pivot, c), m(row, c));
      out.det = f.neg(out.det);
    }
    const Elem p = m(row, col);
    out.det = f.mul(out.det, p);
    const Elem p_inv = f.inv(p);
    for (std::size_t r = row + 1; r < m.rows(); ++r) {
      const Elem factor = f.mul(m(r, col), p_inv);
      if (factor == 0) continue;
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) = f.sub(m(r, c), f.mul(factor, m(row, c)));
    }
    ++row;
  }
  out.rank = row;
  if (out.rank < m.rows()) out.det = 0;
  return out;
}

}  // namespace detail

inline FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
  detail::require_same_field(a, b);
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                    "x" + std::to_string(b.cols()));
  }
  const FieldConfig& f = a.field();
  FieldMatrix out(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Elem aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) = f.add(out(i, j), f.mul(aik, b(k, j)));
    }
  }
  return out;
}

inline std::size_t mat_rank(const FieldMatrix& a) {
  FieldMatrix work = a;
  return detail::forward_eliminate(work).rank;
}

inline Elem mat_det(const FieldMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::NotSquare, "determinant of non-square matrix");
  if (a.rows() == 0) return 1;
  FieldMatrix work = a;
  return detail::forward_eliminate(work).det;
}

/// First `x` columns of `a` (the selection a * E_x).
inline FieldMatrix select_columns(const FieldMatrix& a, std::size_t x) {
  if (x > a.cols()) throw Error(ErrorCode::OutOfRange, "selecting more columns than available");
  FieldMatrix out(a.field(), a.rows(), x);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < x; ++c) out(r, c) = a(r, c);
  return out;
}

inline FieldMatrix transpose(const FieldMatrix& a) {
  FieldMatrix out(a.field(), a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  return out;
}

/// Horizontal concatenation; all blocks must share row count and field.
inline FieldMatrix hconcat(FieldConfig field, std::size_t rows, std::span<const FieldMatrix> blocks) {
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.field() != field) throw Error(ErrorCode::FieldMismatch, "hconcat over different fields");
    if (b.rows() != rows) throw Error(ErrorCode::DimensionMismatch, "hconcat row count mismatch");
    cols += b.cols();
  }
  FieldMatrix out(field, rows, cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, offset + c) = b(r, c);
    offset += b.cols();
  }
  return out;
}

/// Solves a * x = b exactly. `a` may be tall; the system must be consistent
/// and `a` must have full column rank, otherwise RankDeficient is thrown.
inline FieldMatrix solve(const FieldMatrix& a, const FieldMatrix& b) {
  detail::require_same_field(a, b);
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "solve: row count mismatch");
  const FieldConfig& f = a.field();
  const std::size_t n = a.cols();
  const std::size_t w = b.cols();
  FieldMatrix aug(f, a.rows(), n + w);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = a(r, c);
    for (std::size_t c = 0; c < w; ++c) aug(r, n + c) = b(r, c);
  }
  // Gauss-Jordan on the coefficient block only.
  std::size_t row = 0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = row;
    while (pivot < aug.rows() && aug(pivot, col) == 0) ++pivot;
    if (pivot == aug.rows()) throw Error(ErrorCode::RankDeficient, "coefficient matrix lacks full column rank");
    if (pivot != row)
      for (std::size_t c = 0; c < aug.cols(); ++c) std::swap(aug(pivot, c), aug(row, c));
    const Elem p_inv = f.inv(aug(row, col));
    for (std::size_t c = 0; c < aug.cols(); ++c) aug(row, c) = f.mul(aug(row, c), p_inv);
    for (std::size_t r = 0; r < aug.rows(); ++r) {
      if (r == row || aug(r, col) == 0) continue;
      const Elem factor = aug(r, col);
      for (std::size_t c = 0; c < aug.cols(); ++c) aug(r, c) = f.sub(aug(r, c), f.mul(factor, aug(row, c)));
    }
    ++row;
  }
  for (std::size_t r = n; r < aug.rows(); ++r)
    for (std::size_t c = 0; c < w; ++c)
      if (aug(r, n + c) != 0) throw Error(ErrorCode::RankDeficient, "inconsistent linear system");
  FieldMatrix x(f, n, w);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < w; ++c) x(r, c) = aug(r, n + c);
  return x;
}

inline FieldMatrix inverse(const FieldMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::NotSquare, "inverse of non-square matrix");
  return solve(a, FieldMatrix::identity(a.field(), a.rows()));
}

// {"rows":R,"cols":C,"q":Q,"entries":[...]}
inline void to_json(nlohmann::json& j, const FieldMatrix& m) {
  j = nlohmann::json{{"rows", m.rows()},
                     {"cols", m.cols()},
                     {"q", m.field().q()},
                     {"entries", std::vector<Elem>(m.entries().begin(), m.entries().end())}};
}

inline FieldMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    return FieldMatrix(FieldConfig(j.at("q").get<std::uint64_t>()), j.at("rows").get<std::size_t>(),
                       j.at("cols").get<std::size_t>(), j.at("entries").get<std::vector<Elem>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("matrix JSON: ") + e.what());
  }
}

}  // namespace lrrc
