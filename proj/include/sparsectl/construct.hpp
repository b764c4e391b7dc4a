#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsectl/errors.hpp"
#include "sparsectl/numlin.hpp"
#include "sparsectl/pbh.hpp"
#include "sparsectl/sparsity.hpp"

namespace sparsectl {

/// Candidates whose changed inner products all reach this fraction of
/// ||b_hat||_2 are accepted on first sight while scanning the grid.
inline constexpr double kMarginFloor = 1e-3;
/// Relative exclusion radius: eps_excl = factor * (1 + max |exclusion|).
inline constexpr double kExclusionFactor = 1e-6;
/// Imaginary parts below this (relative) make an exclusion value real.
inline constexpr double kRealExclusionTol = 1e-9;

struct ConstraintSpec {
  enum class Kind { kUnconstrained, kElementBound, kFrobeniusBound };

  Kind kind = Kind::kUnconstrained;
  double bound = 0.0;

  static ConstraintSpec unconstrained() { return {}; }
  static ConstraintSpec element_bound(double h) { return make(Kind::kElementBound, h); }
  static ConstraintSpec frobenius_bound(double r) { return make(Kind::kFrobeniusBound, r); }

 private:
  static ConstraintSpec make(Kind kind, double bound) {
    if (!(bound > 0.0) || !std::isfinite(bound)) {
      throw Error(ErrorCode::kInvalidInput, "constraint bound must be positive and finite");
    }
    ConstraintSpec c;
    c.kind = kind;
    c.bound = bound;
    return c;
  }
};

inline std::string_view to_string(ConstraintSpec::Kind k) {
  switch (k) {
    case ConstraintSpec::Kind::kUnconstrained: return "unconstrained";
    case ConstraintSpec::Kind::kElementBound: return "element_bound";
    case ConstraintSpec::Kind::kFrobeniusBound: return "frobenius_bound";
  }
  return "unknown";
}

struct FeasibilityReport {
  bool feasible = false;
  /// 1-based eigen index whose support misses S_v.
  std::optional<int> witness;
  /// Per eigen index: smallest member of S_v meeting Supp(x_i), 0 if none.
  std::vector<int> chosen_hits;
};

/// b together with the inner products x_i^H b and the zero set Z_b.
struct RepairState {
  Eigen::VectorXd b;
  Eigen::VectorXcd inner_products;
  IndexSet zero_set;
  double tolerance = 0.0;
};

struct RepairStep {
  int i = 0;
  int k = 0;
  /// Eigen indices s_j != i whose support contains k, with gamma_j = x_{s_j}^H b.
  std::vector<int> gamma_indices;
  std::vector<Complex> gammas;
  /// Excluded values of delta: 0 and the real members of
  /// beta_j = -gamma_j / conj(x_{s_j, k}).
  std::vector<double> exclusions;
  double delta = 0.0;
  /// min |x_m^H b_hat| / ||b_hat|| over the inner products delta changed.
  double margin = 0.0;
  int zb_before = 0;
  int zb_after = 0;
};

struct RepairTrace {
  Eigen::VectorXd initial_b;
  std::vector<RepairStep> steps;
  int iterations = 0;
  std::vector<int> feasibility_witness;
};

struct ConstructResult {
  Eigen::VectorXd b;
  RepairTrace trace;
};

inline FeasibilityReport feasible_support(const EigenStructure& eig, const SupportFamily& family,
                                          const IndexSet& sv) {
  if (!eig.distinct) {
    throw Error(ErrorCode::kRepeatedEigenvalues, "feasibility test needs distinct eigenvalues");
  }
  FeasibilityReport report;
  const HitResult hit = hits_all(family, sv);
  report.feasible = hit.hits;
  report.witness = hit.witness;
  for (const auto& supp : family.supports) {
    const IndexSet common = supp.intersection(sv);
    report.chosen_hits.push_back(common.empty() ? 0 : common.members().front());
  }
  return report;
}

inline RepairState make_repair_state(const EigenStructure& eig, Eigen::VectorXd b,
                                     const Tolerances& tol = {}) {
  RepairState state;
  state.tolerance = pbh_tolerance(b, tol.pbh_factor);
  state.inner_products.resize(eig.n());
  std::vector<int> zeros;
  const Eigen::VectorXcd bc = b.cast<Complex>();
  for (int i = 1; i <= eig.n(); ++i) {
    const Complex ip = eig.x(i).dot(bc);  // x_i^H b
    state.inner_products[i - 1] = ip;
    if (std::abs(ip) <= state.tolerance) zeros.push_back(i);
  }
  state.zero_set = IndexSet(eig.n(), std::move(zeros));
  state.b = std::move(b);
  return state;
}

struct DeltaChoice {
  double delta = 0.0;
  double margin = 0.0;
};

namespace detail {

/// Candidate step sizes in scan order. Bounded: +-f*H for f = 1/4, 1/2, 3/4,
/// then the odd eighths, sixteenths, ... Unbounded: +-s, +-2s, ..., +-8s, then
/// odd halves, quarters, ... of s.
inline std::vector<double> delta_grid(std::optional<double> half_width, double scale) {
  std::vector<double> grid;
  auto push = [&grid](double v) {
    grid.push_back(v);
    grid.push_back(-v);
  };
  if (half_width) {
    const double h = *half_width;
    push(0.25 * h);
    push(0.5 * h);
    push(0.75 * h);
    for (int depth = 3; depth <= 12; ++depth) {
      const double denom = std::ldexp(1.0, depth);
      for (int num = 1; num < (1 << depth); num += 2) push(h * num / denom);
    }
  } else {
    for (int j = 1; j <= 8; ++j) push(scale * j);
    for (int depth = 1; depth <= 8; ++depth) {
      const double denom = std::ldexp(1.0, depth);
      for (int num = 1; num < 8 * (1 << depth); num += 2) push(scale * num / denom);
    }
  }
  return grid;
}

}  // namespace detail

/// Picks a step delta for coordinate k away from every exclusion.
///
/// Scans a fixed grid; returns the first admissible candidate whose margin
/// reaches `margin_floor`, otherwise the admissible candidate with the largest
/// positive margin. Under a bound H every candidate keeps |b_k + delta| < H.
inline DeltaChoice choose_delta(const std::vector<double>& exclusions,
                                std::optional<double> half_width, double current_b_k,
                                double scale, const std::function<double(double)>& margin_fn,
                                double margin_floor = kMarginFloor) {
  double max_excl = 0.0;
  for (double e : exclusions) max_excl = std::max(max_excl, std::abs(e));
  const double eps = kExclusionFactor * (1.0 + max_excl);

  std::optional<DeltaChoice> best;
  for (double delta : detail::delta_grid(half_width, scale)) {
    if (half_width && !(std::abs(current_b_k + delta) < *half_width)) continue;
    if (std::abs(delta) <= eps) continue;
    const bool clear = std::all_of(exclusions.begin(), exclusions.end(),
                                   [&](double e) { return std::abs(delta - e) > eps; });
    if (!clear) continue;
    const double margin = margin_fn(delta);
    if (margin >= margin_floor) return {delta, margin};
    if (margin > 0.0 && (!best || margin > best->margin)) best = DeltaChoice{delta, margin};
  }
  if (best) return *best;
  throw Error(ErrorCode::kNoCandidate, "no grid value clears the excluded step sizes");
}

namespace detail {

inline std::optional<double> half_width_for(const ConstraintSpec& c, const Eigen::VectorXd& b,
                                            int k) {
  switch (c.kind) {
    case ConstraintSpec::Kind::kUnconstrained:
      return std::nullopt;
    case ConstraintSpec::Kind::kElementBound:
      return c.bound;
    case ConstraintSpec::Kind::kFrobeniusBound: {
      // Spend at most half of the remaining squared-norm budget per step.
      const double bk = b[k - 1];
      const double residual = std::max(0.0, c.bound * c.bound - b.squaredNorm());
      return std::sqrt(bk * bk + 0.5 * residual);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// One repair move: clears the smallest zero index i of Z_b by perturbing the
/// smallest coordinate k in S_v ∩ Supp(x_i), without creating new zeros.
inline std::pair<RepairState, RepairStep> repair_step(const EigenStructure& eig,
                                                      const SupportFamily& family,
                                                      const IndexSet& sv,
                                                      const RepairState& state,
                                                      const ConstraintSpec& constraint,
                                                      const Tolerances& tol = {}) {
  if (state.zero_set.empty()) {
    throw Error(ErrorCode::kInvalidInput, "repair step called with an empty zero set");
  }
  RepairStep step;
  step.i = state.zero_set.members().front();
  step.zb_before = state.zero_set.size();

  const IndexSet candidates = family[step.i].intersection(sv);
  if (candidates.empty()) {
    throw Error(ErrorCode::kInfeasible,
                "support of eigenvector " + std::to_string(step.i) + " misses S_v", step.i);
  }
  step.k = candidates.members().front();
  const int k = step.k;

  std::vector<int> affected;
  for (int m = 1; m <= eig.n(); ++m) {
    if (std::abs(eig.x(m)[k - 1]) > eig.support_tol) affected.push_back(m);
  }

  step.exclusions.push_back(0.0);
  for (int s : affected) {
    if (s == step.i) continue;
    const Complex gamma = state.inner_products[s - 1];
    const Complex beta = -gamma / std::conj(eig.x(s)[k - 1]);
    step.gamma_indices.push_back(s);
    step.gammas.push_back(gamma);
    if (std::abs(beta.imag()) <= kRealExclusionTol * (1.0 + std::abs(beta))) {
      step.exclusions.push_back(beta.real());
    }
  }

  auto is_affected = [&affected](int m) {
    return std::binary_search(affected.begin(), affected.end(), m);
  };
  const auto margin_fn = [&](double delta) {
    Eigen::VectorXd b_hat = state.b;
    b_hat[k - 1] += delta;
    const double norm = b_hat.norm();
    if (norm == 0.0) return 0.0;
    const double zero_tol = pbh_tolerance(b_hat, tol.pbh_factor);
    double margin = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= eig.n(); ++m) {
      const Complex ip = state.inner_products[m - 1] + std::conj(eig.x(m)[k - 1]) * delta;
      if (is_affected(m)) {
        if (std::abs(ip) <= zero_tol) return 0.0;
        margin = std::min(margin, std::abs(ip) / norm);
      } else if (!state.zero_set.contains(m) && std::abs(ip) <= zero_tol) {
        return 0.0;
      }
    }
    return margin;
  };

  const double scale = std::max(1.0, state.b.cwiseAbs().maxCoeff());
  const DeltaChoice choice = choose_delta(step.exclusions, detail::half_width_for(constraint, state.b, k),
                                          state.b[k - 1], scale, margin_fn);
  step.delta = choice.delta;
  step.margin = choice.margin;

  Eigen::VectorXd b_hat = state.b;
  b_hat[k - 1] += step.delta;
  RepairState next = make_repair_state(eig, std::move(b_hat), tol);
  step.zb_after = next.zero_set.size();
  if (step.zb_after >= step.zb_before) {
    throw Error(ErrorCode::kNoProgress,
                "zero set did not shrink at i=" + std::to_string(step.i) +
                    ", k=" + std::to_string(k) + " (tau_pbh=" +
                    std::to_string(next.tolerance) + ")");
  }
  return {std::move(next), std::move(step)};
}

/// Starting vector supported on S_v: all ones (seed 0) or uniform (0, 1]
/// entries, scaled to h/2 per entry or to Frobenius norm r/2 when bounded.
inline Eigen::VectorXd initial_vector(int n, const IndexSet& sv, const ConstraintSpec& constraint,
                                      std::uint64_t seed) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  std::mt19937_64 rng(seed);
  for (int j : sv) {
    // (0, 1] from the top 53 bits.
    b[j - 1] = seed == 0 ? 1.0 : static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
  }
  switch (constraint.kind) {
    case ConstraintSpec::Kind::kUnconstrained:
      break;
    case ConstraintSpec::Kind::kElementBound:
      b *= 0.5 * constraint.bound;
      break;
    case ConstraintSpec::Kind::kFrobeniusBound:
      if (b.norm() > 0.0) b *= 0.5 * constraint.bound / b.norm();
      break;
  }
  return b;
}

/// Real vector supported inside S_v making (A, b) controllable, built by
/// repeated repair steps from `initial_vector`. At most n steps are taken.
inline ConstructResult construct_vector(const EigenStructure& eig, const SupportFamily& family,
                                        const IndexSet& sv, const ConstraintSpec& constraint,
                                        std::uint64_t seed = 0, const Tolerances& tol = {}) {
  if (sv.n() != eig.n()) {
    throw Error(ErrorCode::kDimensionError, "S_v dimension differs from the state dimension");
  }
  const FeasibilityReport report = feasible_support(eig, family, sv);
  if (!report.feasible) {
    throw Error(ErrorCode::kInfeasible,
                "support of eigenvector " + std::to_string(*report.witness) + " misses S_v",
                report.witness);
  }
  ConstructResult result;
  result.trace.feasibility_witness = report.chosen_hits;
  RepairState state = make_repair_state(eig, initial_vector(eig.n(), sv, constraint, seed), tol);
  result.trace.initial_b = state.b;
  while (!state.zero_set.empty()) {
    auto [next, step] = repair_step(eig, family, sv, state, constraint, tol);
    result.trace.steps.push_back(std::move(step));
    state = std::move(next);
  }
  result.trace.iterations = static_cast<int>(result.trace.steps.size());
  result.b = std::move(state.b);
  return result;
}

inline ConstructResult construct_vector(const SystemMatrix& a, const IndexSet& sv,
                                        const ConstraintSpec& constraint,
                                        std::uint64_t seed = 0, const Tolerances& tol = {}) {
  const EigenStructure eig = eig_left(a, tol);
  if (!eig.distinct) {
    throw Error(ErrorCode::kRepeatedEigenvalues, "construction needs distinct eigenvalues");
  }
  return construct_vector(eig, support_family(eig), sv, constraint, seed, tol);
}

}  // namespace sparsectl
