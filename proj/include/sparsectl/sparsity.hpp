#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsectl/errors.hpp"
#include "sparsectl/numlin.hpp"

namespace sparsectl {

/// Largest ambient dimension accepted by the exact hitting-set search.
inline constexpr int kExactLimit = 24;

/// Sorted, duplicate-free subset of {1..n}. Members are 1-based.
class IndexSet {
 public:
  IndexSet() = default;

  IndexSet(int n, std::vector<int> members) : n_(n), members_(std::move(members)) {
    if (n < 0) throw Error(ErrorCode::kInvalidInput, "negative ambient dimension");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && (members_.front() < 1 || members_.back() > n_)) {
      throw Error(ErrorCode::kInvalidInput,
                  "index out of range 1.." + std::to_string(n_));
    }
  }

  IndexSet(int n, std::initializer_list<int> members)
      : IndexSet(n, std::vector<int>(members)) {}

  static IndexSet full(int n) {
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    return IndexSet(n, std::move(all));
  }

  int n() const { return n_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  const std::vector<int>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool contains(int j) const {
    return std::binary_search(members_.begin(), members_.end(), j);
  }

  bool intersects(const IndexSet& other) const {
    auto a = members_.begin();
    auto b = other.members_.begin();
    while (a != members_.end() && b != other.members_.end()) {
      if (*a == *b) return true;
      if (*a < *b) ++a; else ++b;
    }
    return false;
  }

  IndexSet intersection(const IndexSet& other) const {
    std::vector<int> out;
    std::set_intersection(members_.begin(), members_.end(), other.members_.begin(),
                          other.members_.end(), std::back_inserter(out));
    return IndexSet(n_, std::move(out));
  }

  IndexSet united(const IndexSet& other) const {
    std::vector<int> out;
    std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                   other.members_.end(), std::back_inserter(out));
    return IndexSet(std::max(n_, other.n_), std::move(out));
  }

  bool subset_of(const IndexSet& other) const {
    return std::includes(other.members_.begin(), other.members_.end(),
                         members_.begin(), members_.end());
  }

  std::uint32_t mask() const {
    std::uint32_t m = 0;
    for (int j : members_) m |= std::uint32_t{1} << (j - 1);
    return m;
  }

  friend bool operator==(const IndexSet& l, const IndexSet& r) {
    return l.n_ == r.n_ && l.members_ == r.members_;
  }

 private:
  int n_ = 0;
  std::vector<int> members_;
};

/// Supp(x_i) for every canonical left eigenvector, in eigen order.
struct SupportFamily {
  int n = 0;
  std::vector<IndexSet> supports;
  double support_tol = kDefaultSupportTol;
  /// Conjugate eigenvector pairs; their supports coincide.
  std::vector<std::pair<int, int>> dedup_map;

  const IndexSet& operator[](int i_one_based) const {
    return supports.at(static_cast<std::size_t>(i_one_based - 1));
  }
};

/// {j : |v_j| > tol}.
template <typename Derived>
IndexSet support(const Eigen::MatrixBase<Derived>& v, double tol = kDefaultSupportTol) {
  std::vector<int> members;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) > tol) members.push_back(static_cast<int>(j) + 1);
  }
  return IndexSet(static_cast<int>(v.size()), std::move(members));
}

inline SupportFamily support_family(const EigenStructure& eig) {
  if (!eig.distinct) {
    throw Error(ErrorCode::kRepeatedEigenvalues,
                "support family needs distinct eigenvalues");
  }
  SupportFamily family;
  family.n = eig.n();
  family.support_tol = eig.support_tol;
  family.dedup_map = eig.conj_pairs;
  family.supports.reserve(eig.left_eigenvectors.size());
  for (const auto& x : eig.left_eigenvectors) {
    family.supports.push_back(support(x, eig.support_tol));
  }
  return family;
}

/// Build a family directly from 1-based member lists.
inline SupportFamily make_family(int n, const std::vector<std::vector<int>>& sets) {
  SupportFamily family;
  family.n = n;
  for (const auto& s : sets) family.supports.emplace_back(n, s);
  return family;
}

struct HitResult {
  bool hits = false;
  /// Smallest 1-based family index whose support misses S.
  std::optional<int> witness;
};

inline HitResult hits_all(const SupportFamily& family, const IndexSet& s) {
  if (s.n() != family.n) {
    throw Error(ErrorCode::kDimensionError, "index set and family dimensions differ");
  }
  for (std::size_t i = 0; i < family.supports.size(); ++i) {
    if (!family.supports[i].intersects(s)) {
      return {false, static_cast<int>(i) + 1};
    }
  }
  return {true, std::nullopt};
}

namespace detail {

/// Distinct, inclusion-minimal set masks. A superset of another member is
/// implied by it and never constrains the optimum.
inline std::vector<std::uint32_t> reduced_masks(const SupportFamily& family) {
  std::vector<std::uint32_t> masks;
  for (const auto& s : family.supports) masks.push_back(s.mask());
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  std::vector<std::uint32_t> kept;
  for (std::uint32_t m : masks) {
    bool dominated = false;
    for (std::uint32_t o : masks) {
      if (o != m && (o & m) == o) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(m);
  }
  return kept;
}

class HittingSearch {
 public:
  HittingSearch(std::vector<std::uint32_t> sets, int n) : sets_(std::move(sets)), n_(n) {}

  /// Lexicographically smallest hitting set of exactly `size` elements that
  /// is reachable without hitting everything earlier; false if none.
  bool search(int size, std::vector<int>& chosen) {
    chosen.clear();
    return dfs(1, 0, size, chosen);
  }

 private:
  bool dfs(int start, std::uint32_t picked, int remaining, std::vector<int>& chosen) {
    std::vector<std::uint32_t> uncovered;
    for (std::uint32_t s : sets_) {
      if ((s & picked) == 0) uncovered.push_back(s);
    }
    if (uncovered.empty()) return true;
    if (remaining == 0) return false;

    const std::uint32_t allowed = start > n_ ? 0u : (~std::uint32_t{0} << (start - 1));
    // Lower bound: greedy packing of pairwise disjoint uncovered sets.
    std::uint32_t used = 0;
    int disjoint = 0;
    for (std::uint32_t s : uncovered) {
      const std::uint32_t live = s & allowed;
      if (live == 0) return false;
      if ((live & used) == 0) {
        used |= live;
        ++disjoint;
      }
    }
    if (disjoint > remaining) return false;

    const std::uint32_t first_uncovered = uncovered.front() & allowed;
    // Every hitting set must contain a member of first_uncovered; the smallest
    // chosen element is bounded by its largest member.
    const int last = 32 - __builtin_clz(first_uncovered);
    for (int j = start; j <= n_; ++j) {
      if (j > last) break;
      chosen.push_back(j);
      if (dfs(j + 1, picked | (std::uint32_t{1} << (j - 1)), remaining - 1, chosen)) {
        return true;
      }
      chosen.pop_back();
    }
    return false;
  }

  std::vector<std::uint32_t> sets_;
  int n_;
};

}  // namespace detail

/// Minimum-cardinality hitting set, lexicographically smallest among optima.
///
/// Iterative deepening over the cardinality with depth-first enumeration in
/// lexicographic order, pruned by a disjoint-set packing bound.
inline IndexSet min_hitting_set_exact(const SupportFamily& family,
                                      int exact_limit = kExactLimit) {
  if (family.n > exact_limit || family.n > 31) {
    throw Error(ErrorCode::kTooLarge,
                "exact hitting set limited to n <= " + std::to_string(exact_limit));
  }
  for (const auto& s : family.supports) {
    if (s.empty()) {
      throw Error(ErrorCode::kInvalidInput, "family contains an empty set");
    }
  }
  detail::HittingSearch search(detail::reduced_masks(family), family.n);
  std::vector<int> chosen;
  for (int size = 0; size <= family.n; ++size) {
    if (search.search(size, chosen)) return IndexSet(family.n, chosen);
  }
  throw Error(ErrorCode::kInvalidInput, "family admits no hitting set");
}

/// Frequency-greedy hitting set: repeatedly takes the index meeting the most
/// unhit supports, smallest index on ties.
inline IndexSet min_hitting_set_greedy(const SupportFamily& family) {
  std::vector<bool> hit(family.supports.size(), false);
  std::vector<int> chosen;
  std::size_t open = family.supports.size();
  for (const auto& s : family.supports) {
    if (s.empty()) throw Error(ErrorCode::kInvalidInput, "family contains an empty set");
  }
  while (open > 0) {
    int best = 0;
    int best_count = 0;
    for (int j = 1; j <= family.n; ++j) {
      int count = 0;
      for (std::size_t i = 0; i < family.supports.size(); ++i) {
        if (!hit[i] && family.supports[i].contains(j)) ++count;
      }
      if (count > best_count) {
        best = j;
        best_count = count;
      }
    }
    chosen.push_back(best);
    for (std::size_t i = 0; i < family.supports.size(); ++i) {
      if (!hit[i] && family.supports[i].contains(best)) {
        hit[i] = true;
        --open;
      }
    }
  }
  return IndexSet(family.n, std::move(chosen));
}

}  // namespace sparsectl
