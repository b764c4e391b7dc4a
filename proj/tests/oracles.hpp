#pragma once

// Test-only reference computations. Nothing here calls into the hitting-set
// search, the eigenvector test or the repair procedure.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sparsectl/gensys.hpp"
#include "sparsectl/numlin.hpp"
#include "sparsectl/pbh.hpp"
#include "sparsectl/sparsity.hpp"

namespace sparsectl::testing {

/// Minimum hitting set by scanning all 2^n subsets; among optima returns the
/// lexicographically smallest sorted member list.
inline std::vector<int> brute_force_hitting_set(const SupportFamily& family) {
  const int n = family.n;
  std::vector<std::uint32_t> masks;
  for (const auto& s : family.supports) masks.push_back(s.mask());
  std::optional<std::vector<int>> best;
  for (std::uint32_t subset = 0; subset < (std::uint32_t{1} << n); ++subset) {
    bool hits = true;
    for (std::uint32_t m : masks) {
      if ((m & subset) == 0) {
        hits = false;
        break;
      }
    }
    if (!hits) continue;
    std::vector<int> members;
    for (int j = 0; j < n; ++j) {
      if (subset & (std::uint32_t{1} << j)) members.push_back(j + 1);
    }
    if (!best || members.size() < best->size() ||
        (members.size() == best->size() && members < *best)) {
      best = members;
    }
  }
  return *best;
}

inline SupportFamily random_test_family(int n, double density, std::mt19937_64& rng) {
  SupportFamily family;
  family.n = n;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(1, n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> members;
    for (int j = 1; j <= n; ++j) {
      if (u(rng) < density) members.push_back(j);
    }
    if (members.empty()) members.push_back(pick(rng));
    family.supports.emplace_back(n, members);
  }
  return family;
}

/// System whose left eigenvectors are +-1 patterns on a random family. The
/// all-ones start then often has exact zero inner products, which forces
/// repair steps. Returns nullopt for singular patterns.
inline std::optional<SystemMatrix> sign_pattern_system(int n, double density,
                                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const SupportFamily family = random_test_family(n, density, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : family.supports[static_cast<std::size_t>(i)]) {
      x(i, j - 1) = (rng() & 1) ? 1.0 : -1.0;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
  if (lu.rank() < n) return std::nullopt;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  if (svd.singularValues()(0) / svd.singularValues()(n - 1) > 1e6) return std::nullopt;
  std::vector<double> lambdas;
  for (int i = 1; i <= n; ++i) lambdas.push_back(i);
  return system_from_left_eigenvectors(x, lambdas, "sign pattern");
}

/// Random values of magnitude [0.5, 1.5] with random sign.
inline double generic_value(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const double v = u(rng);
  return (rng() & 1) ? v : -v;
}

/// Smallest number of nonzeros for which some input of the given shape makes
/// (A, B) rank-controllable, by enumerating row supports R and filling every
/// admissible entry generically: a vector on R, a diagonal on R, or every
/// column of an n x p matrix on the rows R.
///
/// A generic fill is controllable whenever any fill on that pattern is, and
/// any k-sparse input has row support of size <= k. For vector and diagonal
/// shapes the result is therefore the optimum. For the full shape it is a
/// lower bound on the optimum, met by any verified realization with that many
/// nonzeros.
inline int kalman_min_nnz(const SystemMatrix& a, InputVariant variant, int p,
                          std::mt19937_64& rng) {
  const int n = a.n();
  for (int size = 1; size <= n; ++size) {
    std::vector<int> rows(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) rows[static_cast<std::size_t>(i)] = i;
    for (;;) {
      Eigen::MatrixXd b;
      if (variant == InputVariant::kVector) {
        b = Eigen::MatrixXd::Zero(n, 1);
        for (int r : rows) b(r, 0) = generic_value(rng);
      } else if (variant == InputVariant::kDiagonal) {
        b = Eigen::MatrixXd::Zero(n, n);
        for (int r : rows) b(r, r) = generic_value(rng);
      } else {
        b = Eigen::MatrixXd::Zero(n, p);
        for (int r : rows) {
          for (int c = 0; c < p; ++c) b(r, c) = generic_value(rng);
        }
      }
      if (kalman_controllable(a, b).controllable) return size;
      // Next combination of `size` rows out of n.
      int i = size - 1;
      while (i >= 0 && rows[static_cast<std::size_t>(i)] == n - size + i) --i;
      if (i < 0) break;
      ++rows[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) {
        rows[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return n + 1;
}

}  // namespace sparsectl::testing
