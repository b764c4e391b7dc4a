#include "sparsectl/numlin.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sparsectl/sparsity.hpp"

namespace sparsectl {
namespace {

using C = Complex;

SystemMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return SystemMatrix(m);
}

void expect_vec_near(const ComplexVector& v, std::initializer_list<C> expected, double tol = 1e-12) {
  ASSERT_EQ(v.size(), static_cast<Eigen::Index>(expected.size()));
  Eigen::Index i = 0;
  for (C e : expected) {
    EXPECT_NEAR(std::abs(v[i] - e), 0.0, tol) << "entry " << i;
    ++i;
  }
}

TEST(EigLeft, UpperTriangular) {
  // x^H A = lambda x^H by hand: lambda=1 -> (1,-1), lambda=2 -> (0,1).
  const EigenStructure e = eig_left(mat({{1, 1}, {0, 2}}));
  ASSERT_EQ(e.n(), 2);
  EXPECT_NEAR(std::abs(e.eigenvalues[0] - C(1, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(e.eigenvalues[1] - C(2, 0)), 0.0, 1e-12);
  expect_vec_near(e.x(1), {C(1 / std::sqrt(2.0)), C(-1 / std::sqrt(2.0))});
  expect_vec_near(e.x(2), {C(0), C(1)});
  EXPECT_TRUE(e.distinct);
}

TEST(EigLeft, Diagonal) {
  const EigenStructure e = eig_left(mat({{3, 0}, {0, -1}}));
  EXPECT_NEAR(e.eigenvalues[0].real(), 3.0, 1e-12);
  EXPECT_NEAR(e.eigenvalues[1].real(), -1.0, 1e-12);
  expect_vec_near(e.x(1), {C(1), C(0)});
  expect_vec_near(e.x(2), {C(0), C(1)});
  EXPECT_TRUE(e.distinct);
  EXPECT_NEAR(e.min_gap, 4.0, 1e-12);
}

TEST(EigLeft, RepeatedEigenvalue) {
  const EigenStructure e = eig_left(mat({{1, 0}, {0, 1}}));
  EXPECT_FALSE(e.distinct);
  EXPECT_EQ(e.min_gap, 0.0);
}

TEST(EigLeft, ComplexConjugatePair) {
  const EigenStructure e = eig_left(mat({{0, 1}, {-1, 0}}));
  ASSERT_TRUE(e.distinct);
  ASSERT_EQ(e.conj_pairs.size(), 1u);
  EXPECT_EQ(e.conj_pairs[0], std::make_pair(1, 2));
  EXPECT_GT(e.eigenvalues[0].imag(), 0.0);
  EXPECT_NEAR(std::abs(e.eigenvalues[0] - std::conj(e.eigenvalues[1])), 0.0, 1e-12);
}

TEST(EigLeft, RejectsNonSquare) {
  EXPECT_THROW(SystemMatrix(Eigen::MatrixXd::Zero(2, 3)), Error);
  try {
    SystemMatrix(Eigen::MatrixXd::Zero(2, 3));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionError);
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(SystemMatrix{bad}, Error);
}

TEST(EigLeft, InvariantsOnRandomMatrices) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 9;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    }
    const SystemMatrix a(m);
    const EigenStructure e = eig_left(a);
    for (int i = 1; i <= n; ++i) {
      const ComplexVector& x = e.x(i);
      EXPECT_NEAR(x.norm(), 1.0, kCanonicalTol);
      int lead = -1;
      for (int j = 0; j < n && lead < 0; ++j) {
        if (std::abs(x[j]) > e.support_tol) lead = j;
      }
      ASSERT_GE(lead, 0);
      EXPECT_GT(x[lead].real(), 0.0);
      EXPECT_LE(std::abs(x[lead].imag()), kCanonicalTol);
      EXPECT_LE(left_residual(m, x, e.eigenvalues[i - 1]), kEigResidualFactor * m.norm());
    }
    if (!e.distinct) continue;
    // Conjugate symmetry: conj(lambda) appears with the same support.
    for (int i = 1; i <= n; ++i) {
      bool found = false;
      for (int j = 1; j <= n && !found; ++j) {
        found = std::abs(e.eigenvalues[j - 1] - std::conj(e.eigenvalues[i - 1])) <= e.gap_tol &&
                support(e.x(j), e.support_tol) == support(e.x(i), e.support_tol);
      }
      EXPECT_TRUE(found) << "trial " << trial << " index " << i;
    }
    EXPECT_GT(e.min_gap, e.gap_tol);
  }
}

TEST(Canonicalize, Examples) {
  // conj(-2i)/(2*2) = i/2; (i/2)*(-2i) = 1.
  ComplexVector v(2);
  v << C(0), C(0, -2);
  expect_vec_near(canonicalize(v), {C(0), C(1)});
  v << C(1), C(0);
  expect_vec_near(canonicalize(v), {C(1), C(0)});
  v << C(-3), C(0);
  expect_vec_near(canonicalize(v), {C(1), C(0)});
}

TEST(Canonicalize, ZeroVector) {
  ComplexVector v = ComplexVector::Zero(3);
  try {
    canonicalize(v);
    FAIL() << "expected ZeroVector";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
  v[1] = C(1e-12, 0);
  EXPECT_THROW(canonicalize(v), Error);
}

TEST(Canonicalize, IdempotentAndPhaseInvariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    ComplexVector v(n);
    for (int j = 0; j < n; ++j) v[j] = C(g(rng), g(rng));
    if (n > 1 && trial % 3 == 0) v[0] = 0.0;
    const ComplexVector w = canonicalize(v);
    EXPECT_LE((canonicalize(w) - w).norm(), 1e-12);
    const C alpha(g(rng), g(rng));
    EXPECT_LE((canonicalize(alpha * v) - w).norm(), 1e-12);
  }
}

TEST(NumericalRank, Examples) {
  Eigen::MatrixXd ones(2, 2);
  ones << 1, 1, 1, 1;
  EXPECT_EQ(numerical_rank(ones), 1);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Identity(3, 3)), 3);
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 2;  // det = -1
  EXPECT_EQ(numerical_rank(m), 2);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(3, 2)), 0);
  Eigen::MatrixXcd c(2, 2);
  c << C(0, 1), C(1), C(1), C(0, 1);  // det = -2
  EXPECT_EQ(numerical_rank(c), 2);
  m(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(numerical_rank(m), Error);
}

}  // namespace
}  // namespace sparsectl
