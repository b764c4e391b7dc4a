#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sparsectl/errors.hpp"
#include "sparsectl/numlin.hpp"
#include "sparsectl/sparsity.hpp"

namespace sparsectl {

/// Condition number above which a generated eigenvector basis is rejected.
inline constexpr double kMaxBasisCondition = 1e8;

struct GeneratorSpec {
  int n = 0;
  /// Target supports of the left eigenvectors; defaults to singletons {i}.
  std::optional<SupportFamily> family;
  /// Distinct real eigenvalues; defaults to 1..n.
  std::optional<std::vector<double>> eigenvalues;
  std::uint64_t seed = 0;
  int max_retries = 50;
};

namespace detail {

/// Uniform [0, 1) from the top 53 bits; stable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// A = X^{-1} diag(lambda) X, so that row i of X is a left eigenvector for
/// lambda_i.
inline SystemMatrix system_from_left_eigenvectors(const Eigen::MatrixXd& x,
                                                  const std::vector<double>& eigenvalues,
                                                  std::string provenance = "left-eigenvector basis") {
  if (x.rows() != x.cols() || static_cast<std::size_t>(x.rows()) != eigenvalues.size()) {
    throw Error(ErrorCode::kDimensionError, "basis and eigenvalue counts differ");
  }
  const Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(
      eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
  const Eigen::MatrixXd scaled = lambda.asDiagonal() * x;
  return SystemMatrix(x.partialPivLu().solve(scaled), std::move(provenance));
}

/// System whose canonical left-eigenvector supports equal `spec.family`.
/// Nonzero basis entries are drawn from +-[0.5, 1.5]; draws that are badly
/// conditioned or whose supports drift numerically are retried.
inline SystemMatrix system_from_family(const GeneratorSpec& spec, const Tolerances& tol = {}) {
  const int n = spec.n;
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "n must be positive");
  SupportFamily family;
  if (spec.family) {
    family = *spec.family;
  } else {
    for (int i = 1; i <= n; ++i) family.supports.emplace_back(n, std::vector<int>{i});
    family.n = n;
  }
  if (family.n != n || static_cast<int>(family.supports.size()) != n) {
    throw Error(ErrorCode::kInvalidInput, "family must hold n sets over {1..n}");
  }
  for (const auto& s : family.supports) {
    if (s.empty()) throw Error(ErrorCode::kInvalidInput, "family contains an empty set");
  }

  std::vector<double> lambdas;
  if (spec.eigenvalues) {
    lambdas = *spec.eigenvalues;
  } else {
    for (int i = 1; i <= n; ++i) lambdas.push_back(i);
  }
  if (static_cast<int>(lambdas.size()) != n) {
    throw Error(ErrorCode::kInvalidInput, "need exactly n eigenvalues");
  }
  double rho = 0.0;
  for (double l : lambdas) {
    if (!std::isfinite(l)) throw Error(ErrorCode::kInvalidInput, "non-finite eigenvalue");
    rho = std::max(rho, std::abs(l));
  }
  const double gap_tol = tol.gap_factor * std::max(1.0, rho);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(lambdas[i] - lambdas[j]) <= gap_tol) {
        throw Error(ErrorCode::kInvalidInput, "eigenvalues must be distinct");
      }
    }
  }

  std::mt19937_64 rng(spec.seed);
  for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j : family.supports[static_cast<std::size_t>(i)]) {
        const double magnitude = 0.5 + detail::unit_uniform(rng);
        const bool negative = (rng() >> 63) != 0;
        x(i, j - 1) = negative ? -magnitude : magnitude;
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& sv = svd.singularValues();
    if (sv[n - 1] == 0.0 || sv[0] / sv[n - 1] > kMaxBasisCondition) continue;

    SystemMatrix a = system_from_left_eigenvectors(
        x, lambdas, "gensys seed=" + std::to_string(spec.seed));
    EigenStructure eig;
    try {
      eig = eig_left(a, tol);
    } catch (const Error&) {
      continue;
    }
    if (!eig.distinct) continue;

    bool faithful = true;
    for (int i = 0; i < n && faithful; ++i) {
      int nearest = 0;
      for (int m = 1; m < n; ++m) {
        if (std::abs(eig.eigenvalues[m] - lambdas[i]) <
            std::abs(eig.eigenvalues[nearest] - lambdas[i])) {
          nearest = m;
        }
      }
      faithful = support(eig.left_eigenvectors[static_cast<std::size_t>(nearest)], tol.support) ==
                 family.supports[static_cast<std::size_t>(i)];
    }
    if (faithful) return a;
  }
  throw Error(ErrorCode::kGenerationFailed,
              "no faithful system after " + std::to_string(spec.max_retries + 1) + " draws");
}

namespace detail {

inline bool augment(const SupportFamily& family, int row, std::vector<int>& owner,
                    std::vector<bool>& seen) {
  for (int j : family.supports[static_cast<std::size_t>(row)]) {
    if (seen[static_cast<std::size_t>(j)]) continue;
    seen[static_cast<std::size_t>(j)] = true;
    const int prev = owner[static_cast<std::size_t>(j)];
    if (prev < 0 || augment(family, prev, owner, seen)) {
      owner[static_cast<std::size_t>(j)] = row;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// True when some matrix with this row-support pattern is nonsingular, i.e.
/// the rows admit a perfect matching onto distinct columns.
inline bool structurally_nonsingular(const SupportFamily& family) {
  std::vector<int> owner(static_cast<std::size_t>(family.n) + 1, -1);
  for (int row = 0; row < static_cast<int>(family.supports.size()); ++row) {
    std::vector<bool> seen(static_cast<std::size_t>(family.n) + 1, false);
    if (!detail::augment(family, row, owner, seen)) return false;
  }
  return true;
}

/// Each set takes every index with probability `density`, plus one uniform
/// index when it would otherwise be empty. Patterns that force a singular
/// eigenvector basis are redrawn.
inline SupportFamily random_family(int n, double density, std::mt19937_64& rng) {
  for (;;) {
    SupportFamily family;
    family.n = n;
    for (int i = 0; i < n; ++i) {
      std::vector<int> members;
      for (int j = 1; j <= n; ++j) {
        if (detail::unit_uniform(rng) < density) members.push_back(j);
      }
      if (members.empty()) {
        members.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
      }
      family.supports.emplace_back(n, std::move(members));
    }
    if (structurally_nonsingular(family)) return family;
  }
}

/// Random support family and eigenvalues 1..n jittered by less than 0.1.
inline SystemMatrix random_system(int n, double density, std::uint64_t seed,
                                  const Tolerances& tol = {}) {
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "n must be positive");
  if (!(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "density must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  GeneratorSpec spec;
  spec.n = n;
  spec.family = random_family(n, density, rng);
  std::vector<double> lambdas;
  for (int i = 1; i <= n; ++i) lambdas.push_back(i + 0.18 * (detail::unit_uniform(rng) - 0.5));
  spec.eigenvalues = lambdas;
  spec.seed = rng();
  return system_from_family(spec, tol);
}

}  // namespace sparsectl
