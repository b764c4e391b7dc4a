#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sparsectl/errors.hpp"

namespace sparsectl {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Absolute zero threshold for entries of unit-norm vectors.
inline constexpr double kDefaultSupportTol = 1e-9;
/// Relative factor for eigenvalue distinctness: gap_tol = factor * max(1, rho(A)).
inline constexpr double kGapTolFactor = 1e-8;
/// Relative factor for PBH zero tests: tau_pbh = factor * max(1, ||B||_F).
inline constexpr double kPbhTolFactor = 1e-9;
/// Left-eigenpair residual bound relative to ||A||_F.
inline constexpr double kEigResidualFactor = 1e-8;
/// Tolerance on the canonical form (unit norm, real-positive lead entry).
inline constexpr double kCanonicalTol = 1e-10;

/// Tolerance knobs shared by every module. Every verdict records the values
/// it was computed with.
struct Tolerances {
  double support = kDefaultSupportTol;
  double gap_factor = kGapTolFactor;
  double pbh_factor = kPbhTolFactor;
};

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

/// Real square state matrix A.
class SystemMatrix {
 public:
  SystemMatrix() = default;

  explicit SystemMatrix(Eigen::MatrixXd entries, std::string provenance = {})
      : entries_(std::move(entries)), provenance_(std::move(provenance)) {
    if (entries_.rows() != entries_.cols()) {
      throw Error(ErrorCode::kDimensionError,
                  "state matrix must be square, got " +
                      std::to_string(entries_.rows()) + "x" +
                      std::to_string(entries_.cols()));
    }
    if (entries_.rows() == 0) {
      throw Error(ErrorCode::kDimensionError, "state matrix is empty");
    }
    if (!entries_.allFinite()) {
      throw Error(ErrorCode::kInvalidInput, "state matrix has non-finite entries");
    }
  }

  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  const std::string& provenance() const { return provenance_; }

  SystemMatrix transposed() const {
    return SystemMatrix(entries_.transpose(),
                        provenance_.empty() ? "transpose" : provenance_ + "^T");
  }

 private:
  Eigen::MatrixXd entries_;
  std::string provenance_;
};

/// Eigenvalues of A with their canonical left eigenvectors x_i (x_i^H A =
/// lambda_i x_i^H).
///
/// Pairs are ordered by the index of the first nonzero entry of x_i, then by
/// decreasing real part, then by decreasing imaginary part of lambda_i.
struct EigenStructure {
  Eigen::VectorXcd eigenvalues;
  std::vector<ComplexVector> left_eigenvectors;
  bool distinct = false;
  double min_gap = std::numeric_limits<double>::infinity();
  double gap_tol = 0.0;
  double support_tol = kDefaultSupportTol;
  /// 1-based index pairs (i, j), i < j, with lambda_i == conj(lambda_j).
  std::vector<std::pair<int, int>> conj_pairs;

  int n() const { return static_cast<int>(eigenvalues.size()); }
  const ComplexVector& x(int i_one_based) const {
    return left_eigenvectors.at(static_cast<std::size_t>(i_one_based - 1));
  }
};

namespace detail {

inline int first_significant(const ComplexVector& v, double tol) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v[j]) > tol) return static_cast<int>(j);
  }
  return -1;
}

}  // namespace detail

/// Scales v by a complex factor so that ||w||_2 = 1 and the first entry with
/// modulus above `support_tol` is real and positive.
inline ComplexVector canonicalize(const ComplexVector& v,
                                  double support_tol = kDefaultSupportTol) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, "vector has non-finite entries");
  }
  if (detail::first_significant(v, support_tol) < 0) {
    throw Error(ErrorCode::kZeroVector,
                "no entry exceeds the support tolerance");
  }
  const double norm = v.norm();
  ComplexVector w = v / norm;
  const int lead = detail::first_significant(w, support_tol);
  if (lead < 0) {
    throw Error(ErrorCode::kZeroVector,
                "no entry of the normalized vector exceeds the support tolerance");
  }
  // conj(x_j) / (|x_j| ||x||) * x, applied after normalization.
  const Complex phase = std::conj(w[lead]) / std::abs(w[lead]);
  w *= phase;
  w[lead] = Complex(std::abs(w[lead]), 0.0);
  return w;
}

/// Count of singular values above max(rows, cols) * eps * sigma_max.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, "matrix has non-finite entries");
  }
  if (m.size() == 0) return 0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.derived());
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? static_cast<double>(sv[0]) : 0.0;
  const double tol = static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon() * sigma_max;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (static_cast<double>(sv[i]) > tol) ++rank;
  }
  return rank;
}

/// Residual ||x^H A - lambda x^H||_2.
inline double left_residual(const Eigen::MatrixXd& a, const ComplexVector& x,
                            Complex lambda) {
  const Eigen::RowVectorXcd xh = x.adjoint();
  return (xh * a.cast<Complex>() - lambda * xh).norm();
}

/// Left eigendecomposition with canonical eigenvectors and a distinctness
/// certificate. Computed from the right eigenvectors of A^T, conjugated.
inline EigenStructure eig_left(const SystemMatrix& system,
                               const Tolerances& tol = {}) {
  const Eigen::MatrixXd& a = system.matrix();
  const int n = system.n();

  Eigen::EigenSolver<Eigen::MatrixXd> solver(a.transpose(), true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonConvergence, "eigenvalue iteration did not converge");
  }
  const Eigen::VectorXcd lambdas = solver.eigenvalues();
  const Eigen::MatrixXcd right = solver.eigenvectors();

  struct Pair {
    Complex lambda;
    ComplexVector x;
    int lead;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ComplexVector x = canonicalize(right.col(i).conjugate(), tol.support);
    const int lead = detail::first_significant(x, tol.support);
    pairs.push_back({lambdas[i], std::move(x), lead});
  }

  double rho = 0.0;
  for (const auto& p : pairs) rho = std::max(rho, std::abs(p.lambda));
  const double gap_tol = tol.gap_factor * std::max(1.0, rho);

  std::stable_sort(pairs.begin(), pairs.end(), [gap_tol](const Pair& l, const Pair& r) {
    if (l.lead != r.lead) return l.lead < r.lead;
    if (std::abs(l.lambda.real() - r.lambda.real()) > gap_tol) {
      return l.lambda.real() > r.lambda.real();
    }
    return l.lambda.imag() > r.lambda.imag();
  });

  EigenStructure out;
  out.eigenvalues.resize(n);
  out.left_eigenvectors.reserve(static_cast<std::size_t>(n));
  out.gap_tol = gap_tol;
  out.support_tol = tol.support;
  const double a_norm = a.norm();
  for (int i = 0; i < n; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    if (left_residual(a, p.x, p.lambda) > kEigResidualFactor * std::max(a_norm, 1e-300)) {
      throw Error(ErrorCode::kNonConvergence,
                  "left eigenpair " + std::to_string(i + 1) +
                      " fails the residual check");
    }
    out.eigenvalues[i] = p.lambda;
    out.left_eigenvectors.push_back(p.x);
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gap = std::abs(out.eigenvalues[i] - out.eigenvalues[j]);
      out.min_gap = std::min(out.min_gap, gap);
      const bool complex_i = std::abs(out.eigenvalues[i].imag()) > gap_tol;
      if (complex_i &&
          std::abs(out.eigenvalues[i] - std::conj(out.eigenvalues[j])) <= gap_tol) {
        out.conj_pairs.emplace_back(i + 1, j + 1);
      }
    }
  }
  out.distinct = n == 1 || out.min_gap > gap_tol;
  return out;
}

}  // namespace sparsectl
