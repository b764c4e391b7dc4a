#include "sparsectl/sparsity.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace sparsectl {
namespace {

using testing::brute_force_hitting_set;
using testing::random_test_family;

SystemMatrix mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return SystemMatrix(m);
}

TEST(Support, Examples) {
  Eigen::Vector3d v(1, 0, -2);
  EXPECT_EQ(support(v).members(), (std::vector<int>{1, 3}));
  EXPECT_TRUE(support(Eigen::Vector2d(0, 0)).empty());
  EXPECT_EQ(support(Eigen::Vector2d(1e-12, 1), 1e-9).members(), (std::vector<int>{2}));
}

TEST(IndexSet, RejectsOutOfRange) {
  EXPECT_THROW(IndexSet(3, {0, 1}), Error);
  EXPECT_THROW(IndexSet(3, {4}), Error);
  EXPECT_EQ(IndexSet(3, {3, 1, 3}).members(), (std::vector<int>{1, 3}));
}

TEST(SupportFamily, Examples) {
  Eigen::Matrix3d d = Eigen::Vector3d(1, 2, 3).asDiagonal();
  const SupportFamily diag = support_family(eig_left(SystemMatrix(d)));
  EXPECT_EQ(diag[1].members(), (std::vector<int>{1}));
  EXPECT_EQ(diag[2].members(), (std::vector<int>{2}));
  EXPECT_EQ(diag[3].members(), (std::vector<int>{3}));

  const SupportFamily tri = support_family(eig_left(mat2(1, 1, 0, 2)));
  EXPECT_EQ(tri[1].members(), (std::vector<int>{1, 2}));
  EXPECT_EQ(tri[2].members(), (std::vector<int>{2}));

  const SupportFamily swap = support_family(eig_left(mat2(0, 1, 1, 0)));
  EXPECT_EQ(swap[1].members(), (std::vector<int>{1, 2}));
  EXPECT_EQ(swap[2].members(), (std::vector<int>{1, 2}));
}

TEST(SupportFamily, RepeatedEigenvaluesRejected) {
  try {
    support_family(eig_left(mat2(1, 0, 0, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRepeatedEigenvalues);
  }
}

TEST(SupportFamily, ConjugatePairsShareSupports) {
  Eigen::Matrix3d m;
  m << 0, 1, 0, -1, 0, 0, 1, 1, 3;
  const EigenStructure e = eig_left(SystemMatrix(m));
  const SupportFamily f = support_family(e);
  ASSERT_EQ(f.dedup_map.size(), 1u);
  const auto [i, j] = f.dedup_map[0];
  EXPECT_EQ(f[i], f[j]);
}

TEST(HitsAll, Examples) {
  const SupportFamily f = make_family(2, {{1, 2}, {2}});
  EXPECT_TRUE(hits_all(f, IndexSet(2, {2})).hits);

  const SupportFamily singles = make_family(3, {{1}, {2}, {3}});
  const HitResult miss = hits_all(singles, IndexSet(3, {1, 2}));
  EXPECT_FALSE(miss.hits);
  EXPECT_EQ(miss.witness, 3);
  EXPECT_TRUE(hits_all(singles, IndexSet::full(3)).hits);
  EXPECT_THROW(hits_all(singles, IndexSet(2, {1})), Error);
}

TEST(MinHittingSetExact, Examples) {
  // {1,3} and {2,3} both hit; lexicographic tie-break selects {1,3}.
  EXPECT_EQ(min_hitting_set_exact(make_family(3, {{1, 2}, {2, 3}, {3}})).members(),
            (std::vector<int>{1, 3}));
  EXPECT_EQ(min_hitting_set_exact(make_family(3, {{1}, {2}, {3}})).members(),
            (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(min_hitting_set_exact(make_family(2, {{1, 2}, {2}})).members(),
            (std::vector<int>{2}));
}

TEST(MinHittingSetExact, TooLarge) {
  SupportFamily f;
  f.n = 25;
  for (int i = 1; i <= 25; ++i) f.supports.emplace_back(25, std::vector<int>{i});
  try {
    min_hitting_set_exact(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooLarge);
  }
}

TEST(MinHittingSetExact, HandlesLimitSizedFamilies) {
  // Cycle of adjacent pairs on 24 vertices: a vertex cover needs 12.
  SupportFamily f;
  f.n = 24;
  for (int i = 1; i <= 24; ++i) f.supports.emplace_back(24, std::vector<int>{i, i % 24 + 1});
  const IndexSet s = min_hitting_set_exact(f);
  EXPECT_EQ(s.size(), 12);
  EXPECT_EQ(s.members().front(), 1);
  EXPECT_TRUE(hits_all(f, s).hits);
}

TEST(MinHittingSetGreedy, Examples) {
  EXPECT_EQ(min_hitting_set_greedy(make_family(3, {{1, 2}, {2, 3}, {3}})).members(),
            (std::vector<int>{2, 3}));
  EXPECT_EQ(min_hitting_set_greedy(make_family(2, {{1}, {2}})).members(),
            (std::vector<int>{1, 2}));
  EXPECT_EQ(min_hitting_set_greedy(make_family(3, {{1, 2, 3}})).members(),
            (std::vector<int>{1}));
}

TEST(MinHittingSet, PropertiesOnRandomFamilies) {
  std::mt19937_64 rng(2024);
  int greedy_optimal = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const int n = 1 + trial % 10;
    const double density = 0.1 + 0.1 * (trial % 7);
    const SupportFamily f = random_test_family(n, density, rng);
    const IndexSet exact = min_hitting_set_exact(f);
    const IndexSet greedy = min_hitting_set_greedy(f);

    EXPECT_EQ(exact.members(), brute_force_hitting_set(f)) << "trial " << trial;
    EXPECT_TRUE(hits_all(f, exact).hits);
    EXPECT_TRUE(hits_all(f, greedy).hits);
    EXPECT_LE(exact.size(), greedy.size());
    greedy_optimal += exact.size() == greedy.size();

    for (int drop : exact) {
      std::vector<int> smaller;
      for (int j : exact) {
        if (j != drop) smaller.push_back(j);
      }
      EXPECT_FALSE(hits_all(f, IndexSet(n, smaller)).hits);
    }

    // Duplicated sets are redundant constraints.
    SupportFamily doubled = f;
    for (const auto& s : f.supports) doubled.supports.push_back(s);
    EXPECT_EQ(min_hitting_set_exact(doubled), exact);
  }
  EXPECT_GT(greedy_optimal, 0);
}

}  // namespace
}  // namespace sparsectl
