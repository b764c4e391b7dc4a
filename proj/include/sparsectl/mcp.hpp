#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsectl/construct.hpp"
#include "sparsectl/equiv.hpp"
#include "sparsectl/errors.hpp"
#include "sparsectl/pbh.hpp"
#include "sparsectl/sparsity.hpp"

namespace sparsectl {

enum class SolveMethod { kExact, kGreedy };

inline std::string_view to_string(SolveMethod m) {
  return m == SolveMethod::kExact ? "exact" : "greedy";
}

struct McpSolution {
  InputVariant variant = InputVariant::kVector;
  SolveMethod method = SolveMethod::kExact;
  int k_star = 0;
  SparseInput realization;
  /// Optimal hitting set (exact) or chosen coordinates (greedy).
  IndexSet support;
  /// Absent when the eigenvalues are repeated (greedy only).
  std::optional<Verdict> pbh;
  Verdict kalman;
  /// Sensor placement: C = realization^T and verdicts are observability verdicts.
  bool observability = false;
  std::optional<Eigen::MatrixXd> output_matrix;
  std::optional<RepairTrace> repair;
  /// Greedy: controllability-matrix rank after each added coordinate.
  std::vector<int> rank_history;

  bool certified() const { return kalman.controllable && (!pbh || pbh->controllable); }
};

/// Raised by greedy_rank when the budget runs out before full rank; carries
/// the best partial solution.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(McpSolution best, const std::string& what)
      : Error(ErrorCode::kBudgetExhausted, what), best_(std::move(best)) {}
  const McpSolution& best() const noexcept { return best_; }

 private:
  McpSolution best_;
};

namespace detail {

inline void certify(const SystemMatrix& a, const EigenStructure& eig, McpSolution& sol,
                    const Tolerances& tol) {
  sol.pbh = pbh_controllable(a, sol.realization, eig, tol);
  sol.kalman = kalman_controllable(a, sol.realization);
  if (!sol.certified()) {
    throw Error(ErrorCode::kOracleDisagreement,
                std::string("constructed input rejected by the ") +
                    (sol.pbh->controllable ? "rank" : "eigenvector") + " test");
  }
}

}  // namespace detail

/// Exact vector MCP: the optimal supports are exactly the minimum hitting sets
/// of {Supp(x_i)}; a controllable vector is then built on the lexicographically
/// smallest one.
inline McpSolution solve_mcp_vector(const SystemMatrix& a, const ConstraintSpec& constraint = {},
                                    std::uint64_t seed = 0, const Tolerances& tol = {},
                                    int exact_limit = kExactLimit) {
  const EigenStructure eig = eig_left(a, tol);
  const SupportFamily family = support_family(eig);
  McpSolution sol;
  sol.variant = InputVariant::kVector;
  sol.method = SolveMethod::kExact;
  sol.support = min_hitting_set_exact(family, exact_limit);
  sol.k_star = sol.support.size();
  ConstructResult built = construct_vector(eig, family, sol.support, constraint, seed, tol);
  sol.realization = SparseInput::vector(built.b, tol.support);
  sol.repair = std::move(built.trace);
  detail::certify(a, eig, sol, tol);
  return sol;
}

inline McpSolution solve_mcp_diagonal(const SystemMatrix& a, const ConstraintSpec& constraint = {},
                                      std::uint64_t seed = 0, const Tolerances& tol = {}) {
  McpSolution sol = solve_mcp_vector(a, constraint, seed, tol);
  sol.variant = InputVariant::kDiagonal;
  sol.realization = vector_to_diagonal(sol.realization).output;
  detail::certify(a, eig_left(a, tol), sol, tol);
  return sol;
}

inline McpSolution solve_mcp_full(const SystemMatrix& a, int p, const ConstraintSpec& constraint = {},
                                  std::uint64_t seed = 0, const Tolerances& tol = {}) {
  if (p < 1) throw Error(ErrorCode::kInvalidInput, "p must be at least 1");
  McpSolution sol = solve_mcp_vector(a, constraint, seed, tol);
  sol.variant = InputVariant::kFull;
  sol.realization = vector_to_full(sol.realization, p).output;
  detail::certify(a, eig_left(a, tol), sol, tol);
  return sol;
}

inline McpSolution solve_mcp(const SystemMatrix& a, InputVariant variant, int p = 1,
                             const ConstraintSpec& constraint = {}, std::uint64_t seed = 0,
                             const Tolerances& tol = {}) {
  switch (variant) {
    case InputVariant::kVector: return solve_mcp_vector(a, constraint, seed, tol);
    case InputVariant::kDiagonal: return solve_mcp_diagonal(a, constraint, seed, tol);
    case InputVariant::kFull: return solve_mcp_full(a, p, constraint, seed, tol);
  }
  throw Error(ErrorCode::kInvalidInput, "unknown variant");
}

/// Sparsest output row C with (A, C) observable, via the vector MCP on A^T.
inline McpSolution solve_min_observability(const SystemMatrix& a,
                                           const ConstraintSpec& constraint = {},
                                           std::uint64_t seed = 0, const Tolerances& tol = {}) {
  McpSolution sol = solve_mcp_vector(a.transposed(), constraint, seed, tol);
  sol.observability = true;
  sol.output_matrix = sol.realization.matrix().transpose();
  sol.pbh = observable(a, *sol.output_matrix, VerdictMethod::kPbh, tol);
  sol.kalman = observable(a, *sol.output_matrix, VerdictMethod::kKalman, tol);
  return sol;
}

/// Greedy rank-increment heuristic: adds the coordinate e_j whose inclusion
/// raises rank [b, Ab, ..., A^{n-1}b] the most (smallest j on ties) until the
/// rank is full. Works for repeated eigenvalues.
inline McpSolution greedy_rank(const SystemMatrix& a, int budget, const Tolerances& tol = {}) {
  const int n = a.n();
  McpSolution sol;
  sol.variant = InputVariant::kVector;
  sol.method = SolveMethod::kGreedy;

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  std::vector<int> chosen;
  int rank = 0;
  auto snapshot = [&]() {
    sol.support = IndexSet(n, chosen);
    sol.k_star = static_cast<int>(chosen.size());
    sol.realization = SparseInput::vector(b, tol.support);
    sol.kalman = kalman_controllable(a, b);
    sol.pbh.reset();
    const EigenStructure eig = eig_left(a, tol);
    if (eig.distinct) sol.pbh = pbh_controllable(a, b, eig, tol);
  };

  // Head of the unbounded step grid used by choose_delta.
  const std::vector<double> values = {1.0, -1.0, 2.0, -2.0};
  while (rank < n) {
    if (static_cast<int>(chosen.size()) >= budget) {
      snapshot();
      throw BudgetExhausted(sol, "budget of " + std::to_string(budget) +
                                     " coordinates reached at rank " + std::to_string(rank));
    }
    int best_j = 0;
    int best_rank = -1;
    double best_value = 0.0;
    for (int j = 1; j <= n; ++j) {
      if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
      int j_rank = -1;
      double j_value = 0.0;
      for (double v : values) {
        Eigen::VectorXd trial = b;
        trial[j - 1] = v;
        const int r = numerical_rank(controllability_matrix(a.matrix(), trial));
        if (r > j_rank) {
          j_rank = r;
          j_value = v;
        }
      }
      if (j_rank > best_rank) {
        best_rank = j_rank;
        best_j = j;
        best_value = j_value;
      }
    }
    if (best_j == 0) break;
    b[best_j - 1] = best_value;
    chosen.push_back(best_j);
    rank = best_rank;
    sol.rank_history.push_back(rank);
  }
  snapshot();
  if (!sol.kalman.controllable) {
    throw BudgetExhausted(sol, "every coordinate used without reaching full rank");
  }
  return sol;
}

}  // namespace sparsectl
