#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "sparsectl/errors.hpp"
#include "sparsectl/numlin.hpp"

namespace sparsectl {

enum class InputVariant { kVector, kDiagonal, kFull };

inline std::string_view to_string(InputVariant v) {
  switch (v) {
    case InputVariant::kVector: return "vector";
    case InputVariant::kDiagonal: return "diagonal";
    case InputVariant::kFull: return "full";
  }
  return "unknown";
}

/// Input matrix in one of the three shapes: b (n x 1), B_d (n x n diagonal)
/// or B_f (n x p).
class SparseInput {
 public:
  SparseInput() = default;

  static SparseInput vector(const Eigen::VectorXd& b, double support_tol = kDefaultSupportTol) {
    return SparseInput(InputVariant::kVector, b, support_tol);
  }
  static SparseInput diagonal(const Eigen::VectorXd& diag,
                              double support_tol = kDefaultSupportTol) {
    return SparseInput(InputVariant::kDiagonal, diag.asDiagonal().toDenseMatrix(),
                       support_tol);
  }
  static SparseInput full(const Eigen::MatrixXd& b, double support_tol = kDefaultSupportTol) {
    return SparseInput(InputVariant::kFull, b, support_tol);
  }

  /// Validating constructor for entries read from files.
  SparseInput(InputVariant variant, Eigen::MatrixXd entries,
              double support_tol = kDefaultSupportTol)
      : variant_(variant), entries_(std::move(entries)), support_tol_(support_tol) {
    if (entries_.rows() == 0) throw Error(ErrorCode::kDimensionError, "input matrix is empty");
    if (!entries_.allFinite()) {
      throw Error(ErrorCode::kInvalidInput, "input matrix has non-finite entries");
    }
    if (variant_ == InputVariant::kVector && entries_.cols() != 1) {
      throw Error(ErrorCode::kDimensionError, "vector input must have one column");
    }
    if (variant_ == InputVariant::kDiagonal) {
      if (entries_.rows() != entries_.cols()) {
        throw Error(ErrorCode::kDimensionError, "diagonal input must be square");
      }
      Eigen::MatrixXd off = entries_;
      off.diagonal().setZero();
      if (off.cwiseAbs().maxCoeff() != 0.0) {
        throw Error(ErrorCode::kInvalidInput, "diagonal input has off-diagonal entries");
      }
    }
    if (entries_.cols() == 0) throw Error(ErrorCode::kDimensionError, "input has no columns");
  }

  InputVariant variant() const { return variant_; }
  int n() const { return static_cast<int>(entries_.rows()); }
  int p() const { return static_cast<int>(entries_.cols()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double support_tol() const { return support_tol_; }

  int nnz() const {
    return static_cast<int>((entries_.array().abs() > support_tol_).count());
  }

 private:
  InputVariant variant_ = InputVariant::kVector;
  Eigen::MatrixXd entries_;
  double support_tol_ = kDefaultSupportTol;
};

enum class VerdictMethod { kPbh, kKalman };

inline std::string_view to_string(VerdictMethod m) {
  return m == VerdictMethod::kPbh ? "pbh" : "kalman";
}

struct Verdict {
  bool controllable = false;
  VerdictMethod method = VerdictMethod::kPbh;
  /// PBH failure: 1-based eigen index i with x_i^H B numerically zero.
  std::optional<int> witness_index;
  std::optional<Eigen::RowVectorXcd> witness_value;
  /// Kalman route: numerical rank of the controllability matrix.
  std::optional<int> rank;
  /// Zero threshold the verdict was decided with.
  double tolerance = 0.0;
};

inline double pbh_tolerance(const Eigen::MatrixXd& b, double factor = kPbhTolFactor) {
  return factor * std::max(1.0, b.norm());
}

/// Controllability through the n canonical left eigenvectors: controllable iff
/// max_j |x_i^H B_j| > tau_pbh for every i.
inline Verdict pbh_controllable(const SystemMatrix& a, const Eigen::MatrixXd& b,
                                const EigenStructure& eig, const Tolerances& tol = {}) {
  if (!eig.distinct) {
    throw Error(ErrorCode::kRepeatedEigenvalues,
                "the eigenvector test needs distinct eigenvalues");
  }
  if (b.rows() != a.n() || eig.n() != a.n()) {
    throw Error(ErrorCode::kDimensionError, "B rows must equal the state dimension");
  }
  Verdict v;
  v.method = VerdictMethod::kPbh;
  v.tolerance = pbh_tolerance(b, tol.pbh_factor);
  const Eigen::MatrixXcd bc = b.cast<Complex>();
  for (int i = 1; i <= eig.n(); ++i) {
    const Eigen::RowVectorXcd row = eig.x(i).adjoint() * bc;
    if (row.cwiseAbs().maxCoeff() <= v.tolerance) {
      v.controllable = false;
      v.witness_index = i;
      v.witness_value = row;
      return v;
    }
  }
  v.controllable = true;
  return v;
}

inline Verdict pbh_controllable(const SystemMatrix& a, const SparseInput& b,
                                const EigenStructure& eig, const Tolerances& tol = {}) {
  return pbh_controllable(a, b.matrix(), eig, tol);
}

/// Controllability matrix [B, AB, ..., A^{n-1}B] with every block scaled to
/// unit Frobenius norm.
inline Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& a,
                                              const Eigen::MatrixXd& b) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = b.cols();
  Eigen::MatrixXd k(n, n * p);
  Eigen::MatrixXd block = b;
  for (Eigen::Index power = 0; power < n; ++power) {
    if (power > 0) block = a * block;
    const double norm = block.norm();
    if (norm > 0.0) block /= norm;
    k.middleCols(power * p, p) = block;
  }
  return k;
}

/// Rank oracle; independent of the eigendecomposition and valid for repeated
/// eigenvalues.
inline Verdict kalman_controllable(const SystemMatrix& a, const Eigen::MatrixXd& b) {
  if (b.rows() != a.n()) {
    throw Error(ErrorCode::kDimensionError, "B rows must equal the state dimension");
  }
  if (!b.allFinite()) throw Error(ErrorCode::kInvalidInput, "B has non-finite entries");
  const Eigen::MatrixXd k = controllability_matrix(a.matrix(), b);
  Verdict v;
  v.method = VerdictMethod::kKalman;
  v.rank = numerical_rank(k);
  v.controllable = *v.rank == a.n();
  v.tolerance = static_cast<double>(std::max(k.rows(), k.cols())) *
                std::numeric_limits<double>::epsilon();
  return v;
}

inline Verdict kalman_controllable(const SystemMatrix& a, const SparseInput& b) {
  return kalman_controllable(a, b.matrix());
}

/// Observability of (A, C) as controllability of (A^T, C^T).
inline Verdict observable(const SystemMatrix& a, const Eigen::MatrixXd& c,
                          VerdictMethod method = VerdictMethod::kPbh,
                          const Tolerances& tol = {}) {
  if (c.cols() != a.n()) {
    throw Error(ErrorCode::kDimensionError, "C columns must equal the state dimension");
  }
  const SystemMatrix dual = a.transposed();
  if (method == VerdictMethod::kKalman) return kalman_controllable(dual, c.transpose());
  return pbh_controllable(dual, c.transpose(), eig_left(dual, tol), tol);
}

}  // namespace sparsectl
