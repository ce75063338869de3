#include <gtest/gtest.h>

#include "lrrc/galois.hpp"
#include "lrrc/rng.hpp"
#include "oracles.hpp"

using namespace lrrc;

namespace {

FieldMatrix random_matrix(const FieldConfig& f, std::size_t r, std::size_t c, CounterRng& rng, Elem bound = 0) {
  FieldMatrix m(f, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(bound == 0 ? f.q() : bound);
  return m;
}

}  // namespace

TEST(FieldConfig, AcceptsPrimes) {
  EXPECT_EQ(field_new(7).q(), 7U);
  EXPECT_EQ(field_new(2).q(), 2U);
  // 1'000'003 confirmed prime by trial division below.
  ASSERT_TRUE(oracle::trial_division_prime(1'000'003));
  EXPECT_EQ(field_new(1'000'003).q(), 1'000'003U);
}

TEST(FieldConfig, RejectsComposites) {
  try {
    field_new(6);
    FAIL() << "expected NotPrime";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPrime);
  }
  EXPECT_THROW(field_new(1), Error);
  EXPECT_THROW(field_new(1'000'001), Error);  // 101 * 9901
}

TEST(FieldConfig, PrimalityAgreesWithTrialDivision) {
  for (std::uint64_t n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(n), oracle::trial_division_prime(n)) << n;
  for (std::uint64_t n = 1'000'000'000; n < 1'000'002'000; ++n)
    ASSERT_EQ(is_prime(n), oracle::trial_division_prime(n)) << n;
}

TEST(FieldConfig, NextPrime) {
  EXPECT_EQ(next_prime(142129), 142151U);  // required size for (6,4,3,1); gaps checked by trial division
  for (std::uint64_t v = 142129; v < 142151; ++v) EXPECT_FALSE(oracle::trial_division_prime(v));
  EXPECT_TRUE(oracle::trial_division_prime(142151));
}

TEST(FieldConfig, Arithmetic) {
  const FieldConfig f(7);
  EXPECT_EQ(f.add(5, 4), 2U);
  EXPECT_EQ(f.sub(2, 5), 4U);
  EXPECT_EQ(f.mul(3, 5), 1U);
  EXPECT_EQ(f.inv(3), 5U);
  EXPECT_EQ(f.neg(0), 0U);
  EXPECT_EQ(f.reduce(-1), 6U);
  EXPECT_THROW(f.inv(0), Error);

  const FieldConfig big(FieldConfig::kMaxModulus - 57);  // 2^62 - 57 is prime
  const Elem a = big.q() - 1;
  EXPECT_EQ(big.mul(a, a), 1U);
  EXPECT_EQ(big.add(a, a), big.q() - 2);
}

TEST(MatMul, Examples) {
  const FieldConfig f(7);
  const auto a = FieldMatrix::from_rows(f, {{2, 3}});
  const auto b = FieldMatrix::from_rows(f, {{4}, {5}});
  EXPECT_EQ(mat_mul(a, b), FieldMatrix::from_rows(f, {{2}}));

  CounterRng rng(3);
  const auto m = random_matrix(f, 3, 4, rng);
  EXPECT_EQ(mat_mul(FieldMatrix::identity(f, 3), m), m);
  EXPECT_TRUE(mat_mul(FieldMatrix(f, 2, 3), m).is_zero());
}

TEST(MatMul, Errors) {
  const FieldConfig f7(7), f11(11);
  try {
    mat_mul(FieldMatrix(f7, 2, 3), FieldMatrix(f7, 2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  try {
    mat_mul(FieldMatrix(f7, 2, 2), FieldMatrix(f11, 2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FieldMismatch);
  }
}

TEST(MatMul, AssociativeOnRandomTriples) {
  const FieldConfig f(1'000'003);
  CounterRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + rng.uniform(5), k = 1 + rng.uniform(5), l = 1 + rng.uniform(5), c = 1 + rng.uniform(5);
    const auto a = random_matrix(f, r, k, rng);
    const auto b = random_matrix(f, k, l, rng);
    const auto m = random_matrix(f, l, c, rng);
    EXPECT_EQ(mat_mul(mat_mul(a, b), m), mat_mul(a, mat_mul(b, m)));
  }
}

TEST(MatRank, Examples) {
  const FieldConfig f(7);
  EXPECT_EQ(mat_rank(FieldMatrix::identity(f, 4)), 4U);
  const auto dup = FieldMatrix::from_rows(f, {{1, 2, 3}, {4, 5, 6}, {1, 2, 3}});
  EXPECT_LT(mat_rank(dup), 3U);
  EXPECT_EQ(mat_rank(FieldMatrix(f, 3, 0)), 0U);
  EXPECT_EQ(mat_rank(FieldMatrix(f, 3, 5)), 0U);
}

TEST(MatDet, Examples) {
  const FieldConfig f5(5);
  EXPECT_EQ(mat_det(FieldMatrix::identity(f5, 5)), 1U);
  EXPECT_EQ(mat_det(FieldMatrix::from_rows(f5, {{1, 2}, {2, 4}})), 0U);
  // (1*4 - 2*3) mod 5 = 3, also via the cofactor oracle.
  EXPECT_EQ(oracle::cofactor_det({{1, 2}, {3, 4}}, 5), 3);
  EXPECT_EQ(mat_det(FieldMatrix::from_rows(f5, {{1, 2}, {3, 4}})), 3U);
  try {
    mat_det(FieldMatrix(f5, 2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSquare);
  }
}

TEST(MatDet, AgreesWithCofactorOracle) {
  const FieldConfig f(13);
  CounterRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform(5);
    const auto m = random_matrix(f, n, n, rng, trial % 2 == 0 ? 0 : 2);  // half are sparse 0/1 matrices
    oracle::IntMatrix im(n, std::vector<std::int64_t>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) im[i][j] = static_cast<std::int64_t>(m(i, j));
    EXPECT_EQ(mat_det(m), static_cast<Elem>(oracle::cofactor_det(im, 13)));
  }
}

TEST(MatDet, NonzeroIffFullRank) {
  const FieldConfig f(5);
  CounterRng rng(17);
  int singular = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform(4);
    const auto m = random_matrix(f, n, n, rng, trial % 3 == 0 ? 2 : 0);
    const bool full = mat_rank(m) == n;
    singular += full ? 0 : 1;
    EXPECT_EQ(mat_det(m) != 0, full);
  }
  EXPECT_GT(singular, 0);  // the sample exercises both branches
}

TEST(SelectColumns, Basics) {
  const FieldConfig f(7);
  const auto m = FieldMatrix::from_rows(f, {{1, 2, 3}, {4, 5, 6}});
  const auto none = select_columns(m, 0);
  EXPECT_EQ(none.rows(), 2U);
  EXPECT_EQ(none.cols(), 0U);
  EXPECT_EQ(select_columns(m, 3), m);
  EXPECT_EQ(select_columns(m, 1), FieldMatrix::from_rows(f, {{1}, {4}}));
  try {
    select_columns(m, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(SelectColumns, RankBound) {
  const FieldConfig f(3);
  CounterRng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng.uniform(5), c = 1 + rng.uniform(5);
    const auto m = random_matrix(f, r, c, rng);
    const std::size_t x = rng.uniform(c + 1);
    EXPECT_LE(mat_rank(select_columns(m, x)), std::min(mat_rank(m), x));
  }
}

TEST(Solve, InverseAndInconsistency) {
  const FieldConfig f(101);
  CounterRng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = random_matrix(f, 4, 4, rng);
    if (mat_rank(m) < 4) continue;
    EXPECT_EQ(mat_mul(m, inverse(m)), FieldMatrix::identity(f, 4));
  }
  const auto tall = FieldMatrix::from_rows(f, {{1, 0}, {0, 1}, {0, 0}});
  EXPECT_THROW(solve(tall, FieldMatrix::from_rows(f, {{1}, {1}, {1}})), Error);
  EXPECT_EQ(solve(tall, FieldMatrix::from_rows(f, {{3}, {4}, {0}})), FieldMatrix::from_rows(f, {{3}, {4}}));
}

TEST(MatrixJson, RoundTrip) {
  const FieldConfig f(7);
  const auto m = FieldMatrix::from_rows(f, {{1, 2, 3}, {4, 5, 6}});
  const nlohmann::json j = m;
  EXPECT_EQ(j.dump(), R"({"cols":3,"entries":[1,2,3,4,5,6],"q":7,"rows":2})");
  EXPECT_EQ(matrix_from_json(j), m);
  nlohmann::json bad = j;
  bad["entries"] = {1, 2, 9, 4, 5, 6};
  EXPECT_THROW(matrix_from_json(bad), Error);
}

TEST(CounterRng, DeterministicAndInRange) {
  CounterRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.uniform(13);
    EXPECT_EQ(x, b.uniform(13));
    EXPECT_LT(x, 13U);
  }
  EXPECT_NE(CounterRng::derive(42, 1), CounterRng::derive(42, 2));
}
