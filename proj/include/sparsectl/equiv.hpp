#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsectl/construct.hpp"
#include "sparsectl/errors.hpp"
#include "sparsectl/pbh.hpp"
#include "sparsectl/sparsity.hpp"

namespace sparsectl {

enum class ConversionDirection { kVectorToDiagonal, kDiagonalToVector, kVectorToFull, kFullToVector };

inline std::string_view to_string(ConversionDirection d) {
  switch (d) {
    case ConversionDirection::kVectorToDiagonal: return "V->D";
    case ConversionDirection::kDiagonalToVector: return "D->V";
    case ConversionDirection::kVectorToFull: return "V->F";
    case ConversionDirection::kFullToVector: return "F->V";
  }
  return "unknown";
}

struct ConversionTrace {
  ConversionDirection direction = ConversionDirection::kVectorToDiagonal;
  /// D->V: per eigen index, {k : x_{i,k} != 0 and B_d(k,k) != 0}.
  std::vector<IndexSet> sets_b_i;
  /// F->V: per eigen index, the columns j with x_i^H b_{f,j} != 0.
  std::vector<IndexSet> sets_j_i;
  /// Support handed to the vector construction.
  IndexSet set_b;
  int nnz_in = 0;
  int nnz_out = 0;
  std::optional<RepairTrace> repair;
};

struct ConversionResult {
  SparseInput output;
  ConversionTrace trace;
};

inline ConversionResult vector_to_diagonal(const SparseInput& bv) {
  if (bv.variant() != InputVariant::kVector) {
    throw Error(ErrorCode::kInvalidInput, "expected a vector input");
  }
  ConversionResult r;
  r.output = SparseInput::diagonal(bv.matrix().col(0), bv.support_tol());
  r.trace.direction = ConversionDirection::kVectorToDiagonal;
  r.trace.set_b = support(bv.matrix().col(0), bv.support_tol());
  r.trace.nnz_in = bv.nnz();
  r.trace.nnz_out = r.output.nnz();
  return r;
}

/// B_f = [0_{n x (p-1)}, b].
inline ConversionResult vector_to_full(const SparseInput& bv, int p) {
  if (bv.variant() != InputVariant::kVector) {
    throw Error(ErrorCode::kInvalidInput, "expected a vector input");
  }
  if (p < 1) throw Error(ErrorCode::kInvalidInput, "p must be at least 1");
  Eigen::MatrixXd bf = Eigen::MatrixXd::Zero(bv.n(), p);
  bf.col(p - 1) = bv.matrix().col(0);
  ConversionResult r;
  r.output = SparseInput::full(bf, bv.support_tol());
  r.trace.direction = ConversionDirection::kVectorToFull;
  r.trace.set_b = support(bv.matrix().col(0), bv.support_tol());
  r.trace.nnz_in = bv.nnz();
  r.trace.nnz_out = r.output.nnz();
  return r;
}

namespace detail {

inline void require_controllable(const SystemMatrix& a, const SparseInput& input,
                                 const EigenStructure& eig, const Tolerances& tol) {
  const Verdict v = pbh_controllable(a, input, eig, tol);
  if (!v.controllable) {
    throw Error(ErrorCode::kNotControllable,
                "input leaves eigenvector " + std::to_string(*v.witness_index) + " unreached",
                v.witness_index);
  }
}

inline ConversionResult realize_vector(const EigenStructure& eig, const SupportFamily& family,
                                       ConversionTrace trace, const ConstraintSpec& constraint,
                                       std::uint64_t seed, const Tolerances& tol,
                                       double support_tol) {
  ConstructResult built = construct_vector(eig, family, trace.set_b, constraint, seed, tol);
  ConversionResult r;
  r.output = SparseInput::vector(built.b, support_tol);
  trace.nnz_out = r.output.nnz();
  trace.repair = std::move(built.trace);
  r.trace = std::move(trace);
  return r;
}

}  // namespace detail

/// Sparsity-preserving D->V conversion: b is constructed on the union of the
/// per-eigenvector hits of diag(B_d).
inline ConversionResult diagonal_to_vector(const SystemMatrix& a, const EigenStructure& eig,
                                           const SupportFamily& family, const SparseInput& bd,
                                           const ConstraintSpec& constraint = {},
                                           std::uint64_t seed = 0, const Tolerances& tol = {}) {
  if (bd.variant() != InputVariant::kDiagonal) {
    throw Error(ErrorCode::kInvalidInput, "expected a diagonal input");
  }
  detail::require_controllable(a, bd, eig, tol);
  ConversionTrace trace;
  trace.direction = ConversionDirection::kDiagonalToVector;
  trace.nnz_in = bd.nnz();
  const IndexSet diag_support = support(bd.matrix().diagonal(), bd.support_tol());
  trace.set_b = IndexSet(eig.n(), std::vector<int>{});
  for (const auto& supp : family.supports) {
    IndexSet bi = supp.intersection(diag_support);
    trace.set_b = trace.set_b.united(bi);
    trace.sets_b_i.push_back(std::move(bi));
  }
  return detail::realize_vector(eig, family, std::move(trace), constraint, seed, tol,
                                bd.support_tol());
}

/// Sparsity-preserving F->V conversion: b is constructed on the union of the
/// supports of every column that reaches some eigenvector.
inline ConversionResult full_to_vector(const SystemMatrix& a, const EigenStructure& eig,
                                       const SupportFamily& family, const SparseInput& bf,
                                       const ConstraintSpec& constraint = {},
                                       std::uint64_t seed = 0, const Tolerances& tol = {}) {
  if (bf.variant() == InputVariant::kDiagonal) {
    throw Error(ErrorCode::kInvalidInput, "expected a full or vector input");
  }
  detail::require_controllable(a, bf, eig, tol);
  ConversionTrace trace;
  trace.direction = ConversionDirection::kFullToVector;
  trace.nnz_in = bf.nnz();
  const double zero_tol = pbh_tolerance(bf.matrix(), tol.pbh_factor);
  const Eigen::MatrixXcd bc = bf.matrix().cast<Complex>();
  std::vector<bool> used_column(static_cast<std::size_t>(bf.p()), false);
  for (int i = 1; i <= eig.n(); ++i) {
    const Eigen::RowVectorXcd row = eig.x(i).adjoint() * bc;
    std::vector<int> cols;
    for (int j = 0; j < bf.p(); ++j) {
      if (std::abs(row[j]) > zero_tol) {
        cols.push_back(j + 1);
        used_column[static_cast<std::size_t>(j)] = true;
      }
    }
    trace.sets_j_i.emplace_back(bf.p(), std::move(cols));
  }
  trace.set_b = IndexSet(eig.n(), std::vector<int>{});
  for (int j = 0; j < bf.p(); ++j) {
    if (used_column[static_cast<std::size_t>(j)]) {
      trace.set_b = trace.set_b.united(support(bf.matrix().col(j), bf.support_tol()));
    }
  }
  return detail::realize_vector(eig, family, std::move(trace), constraint, seed, tol,
                                bf.support_tol());
}

}  // namespace sparsectl
