#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlosbound/linalg.hpp"

using namespace nlosbound;

namespace {

double reconstruction_error(const SymMat& m, const SymEig& e) {
  const std::size_t n = m.order();
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < n; ++k) v += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      err = std::max(err, std::abs(v - m(i, j)));
    }
  return err;
}

}  // namespace

TEST(SymMat, PackedLayoutAndSymmetry) {
  SymMat m(3, {1, 2, 3, 2, 4, 5, 3, 5, 6});
  EXPECT_EQ(m.packed(), (std::vector<double>{1, 2, 4, 3, 5, 6}));
  EXPECT_EQ(m(0, 2), m(2, 0));
  m(0, 1) = 9.0;
  EXPECT_EQ(m(1, 0), 9.0);
  EXPECT_THROW(SymMat(65), std::invalid_argument);
}

TEST(SymMat, TraceProduct) {
  const SymMat a(2, {1, 2, 2, 3});
  const SymMat b(2, {4, 5, 5, 6});
  EXPECT_DOUBLE_EQ(trace_product(a, b), 1 * 4 + 2 * 5 * 2 + 3 * 6);
}

TEST(Jacobi, Identity) {
  const SymEig e = sym_eig_small(SymMat::identity(4));
  for (double v : e.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Jacobi, DiagonalHasAxisEigenvectors) {
  const SymMat d(2, {3, 0, 0, -1});
  const SymEig e = sym_eig_small(d);
  EXPECT_DOUBLE_EQ(e.values[0], -1.0);
  EXPECT_DOUBLE_EQ(e.values[1], 3.0);
  EXPECT_DOUBLE_EQ(std::abs(e.vectors(1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(e.vectors(0, 1)), 1.0);
}

TEST(Jacobi, RandomReconstructionAndOrthonormality) {
  SplitMix64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 15;
    SymMat m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) m(i, j) = rng.uniform(-1, 1);
    const SymEig e = sym_eig_small(m);
    EXPECT_LE(reconstruction_error(m, e), 1e-10 * std::max(1.0, m.frobenius_norm()));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += e.vectors(i, a) * e.vectors(i, b);
        EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-10);
      }
    for (std::size_t k = 1; k < n; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
  }
}

TEST(Cholesky, SolveAndInverse) {
  const SymMat a(3, {4, 2, 0.6, 2, 5, 1, 0.6, 1, 3});
  const auto l = cholesky(a);
  ASSERT_TRUE(l);
  const std::vector<double> x = cholesky_solve(*l, {1, 2, 3});
  const Matrix f = a.full();
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += f(i, j) * x[j];
    EXPECT_NEAR(s, 1.0 + i, 1e-12);
  }
  const SymMat inv = cholesky_inverse(*l);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += f(i, k) * inv(k, j);
      EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
    }
  EXPECT_FALSE(cholesky(SymMat(2, {1, 2, 2, 1})));
}
