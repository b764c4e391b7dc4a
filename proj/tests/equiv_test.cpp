#include "sparsectl/equiv.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparsectl/gensys.hpp"

namespace sparsectl {
namespace {

SystemMatrix diag123() { return SystemMatrix(Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix()); }

struct Fixture {
  SystemMatrix a;
  EigenStructure eig;
  SupportFamily family;
  explicit Fixture(SystemMatrix m) : a(std::move(m)), eig(eig_left(a)), family(support_family(eig)) {}
};

TEST(VectorToDiagonal, Example) {
  const ConversionResult r = vector_to_diagonal(SparseInput::vector(Eigen::Vector3d(1, 0, 2)));
  EXPECT_EQ(r.output.variant(), InputVariant::kDiagonal);
  EXPECT_EQ(Eigen::MatrixXd(r.output.matrix()),
            Eigen::MatrixXd(Eigen::Vector3d(1, 0, 2).asDiagonal()));
  EXPECT_EQ(r.trace.nnz_in, 2);
  EXPECT_EQ(r.trace.nnz_out, 2);
}

TEST(VectorToFull, PlacesVectorInLastColumn) {
  const ConversionResult r = vector_to_full(SparseInput::vector(Eigen::Vector2d(1, 2)), 3);
  ASSERT_EQ(r.output.p(), 3);
  EXPECT_EQ(r.output.matrix().col(2), Eigen::Vector2d(1, 2));
  EXPECT_EQ(r.output.matrix().leftCols(2), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(r.output.nnz(), 2);
  EXPECT_THROW(vector_to_full(SparseInput::vector(Eigen::Vector2d(1, 2)), 0), Error);
}

TEST(DiagonalToVector, Examples) {
  const Fixture d(diag123());
  const ConversionResult r =
      diagonal_to_vector(d.a, d.eig, d.family, SparseInput::diagonal(Eigen::Vector3d(1, 1, 1)));
  EXPECT_EQ(r.trace.set_b, IndexSet::full(3));
  EXPECT_EQ(r.output.nnz(), 3);
  EXPECT_TRUE(kalman_controllable(d.a, r.output.matrix()).controllable);

  try {
    diagonal_to_vector(d.a, d.eig, d.family, SparseInput::diagonal(Eigen::Vector3d(1, 1, 0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotControllable);
    EXPECT_EQ(e.witness(), 3);
  }
}

TEST(FullToVector, Example) {
  const Fixture d(diag123());
  Eigen::MatrixXd bf(3, 2);
  bf << 1, 0, 1, 0, 0, 1;
  const ConversionResult r = full_to_vector(d.a, d.eig, d.family, SparseInput::full(bf));
  EXPECT_EQ(r.trace.set_b, IndexSet::full(3));
  ASSERT_EQ(r.trace.sets_j_i.size(), 3u);
  EXPECT_EQ(r.trace.sets_j_i[0].members(), (std::vector<int>{1}));
  EXPECT_EQ(r.trace.sets_j_i[2].members(), (std::vector<int>{2}));
  EXPECT_EQ(r.output.nnz(), 3);
  EXPECT_TRUE(kalman_controllable(d.a, r.output.matrix()).controllable);
}

TEST(FullToVector, SkipsColumnsThatReachNothing) {
  // Column 2 is orthogonal to both eigenvectors of diag(1,2), so its rows are unused.
  const Fixture d(SystemMatrix(Eigen::Vector2d(1, 2).asDiagonal().toDenseMatrix()));
  Eigen::MatrixXd bf(2, 2);
  bf << 1, 0, 1, 0;
  const ConversionResult r = full_to_vector(d.a, d.eig, d.family, SparseInput::full(bf));
  EXPECT_EQ(r.trace.set_b, IndexSet::full(2));
}

// Round trips preserve controllability and never increase the nonzero count.
TEST(Conversions, PreserveControllabilityAndSparsity) {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + trial % 9;
    const Fixture f(random_system(n, 0.2 + 0.1 * (trial % 6), 900 + trial));
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (rng() % 4 != 0) diag[j] = testing::generic_value(rng);
    }
    const SparseInput bd = SparseInput::diagonal(diag);
    const bool ctrl = kalman_controllable(f.a, bd.matrix()).controllable;
    if (ctrl) {
      const ConversionResult v = diagonal_to_vector(f.a, f.eig, f.family, bd);
      EXPECT_LE(v.output.nnz(), bd.nnz());
      EXPECT_TRUE(kalman_controllable(f.a, v.output.matrix()).controllable);
      EXPECT_TRUE(v.trace.set_b.subset_of(support(diag)));
      const ConversionResult back = vector_to_diagonal(v.output);
      EXPECT_TRUE(kalman_controllable(f.a, back.output.matrix()).controllable);
      ++checked;
    } else {
      EXPECT_THROW(diagonal_to_vector(f.a, f.eig, f.family, bd), Error);
    }

    const int p = 1 + trial % 3;
    Eigen::MatrixXd bf = Eigen::MatrixXd::Zero(n, p);
    for (Eigen::Index i = 0; i < bf.size(); ++i) {
      if (rng() % 3 == 0) bf(i) = testing::generic_value(rng);
    }
    const SparseInput full = SparseInput::full(bf);
    if (kalman_controllable(f.a, bf).controllable) {
      const ConversionResult v = full_to_vector(f.a, f.eig, f.family, full);
      EXPECT_LE(v.output.nnz(), full.nnz());
      EXPECT_TRUE(kalman_controllable(f.a, v.output.matrix()).controllable);
      const ConversionResult up = vector_to_full(v.output, p);
      EXPECT_TRUE(kalman_controllable(f.a, up.output.matrix()).controllable);
      EXPECT_EQ(up.output.nnz(), v.output.nnz());
    }
  }
  EXPECT_GT(checked, 100);
}

}  // namespace
}  // namespace sparsectl
