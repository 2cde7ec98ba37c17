#pragma once

// Brute-force reference computations shared by the unit and acceptance tests. None of
// these reuse library code paths.

#include "weak/rational.hpp"
#include "weak/rk_trees.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace oracle {

/// E[prod_i Y_i^powers[i]] by summing over every perfect matching of the multiset of
/// variable labels (Isserlis / Wick).
inline weak::Rational isserlis(const std::vector<std::vector<weak::Rational>>& R, const std::vector<int>& powers) {
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    for (int k = 0; k < powers[i]; ++k) items.push_back(i);
  }
  if (items.size() % 2) return weak::Rational(0);
  std::vector<bool> used(items.size(), false);
  std::function<weak::Rational()> rec = [&]() -> weak::Rational {
    std::size_t first = 0;
    while (first < items.size() && used[first]) ++first;
    if (first == items.size()) return weak::Rational(1);
    used[first] = true;
    weak::Rational total(0);
    for (std::size_t j = first + 1; j < items.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      total += R[items[first]][items[j]] * rec();
      used[j] = false;
    }
    used[first] = false;
    return total;
  };
  return rec();
}

/// Number of distinct labelled trees obtained by labelling the vertices of t with
/// 1..r(t) increasing away from the root. Every permutation is tried and the results
/// are deduplicated by their label -> parent-label map.
inline std::uint64_t monotone_labellings(const weak::Tree& t) {
  std::vector<int> parent;  // preorder; parent[0] = -1
  std::function<void(const weak::Tree&, int)> flatten = [&](const weak::Tree& node, int p) {
    const int me = static_cast<int>(parent.size());
    parent.push_back(p);
    for (const auto& c : node.children()) flatten(c, me);
  };
  flatten(t, -1);
  std::vector<int> label(parent.size());
  for (std::size_t i = 0; i < label.size(); ++i) label[i] = static_cast<int>(i);
  std::set<std::vector<int>> seen;
  do {
    bool ok = true;
    for (std::size_t v = 1; v < parent.size() && ok; ++v) ok = label[static_cast<std::size_t>(parent[v])] < label[v];
    if (!ok) continue;
    std::vector<int> parent_of_label(parent.size(), -1);
    for (std::size_t v = 1; v < parent.size(); ++v) {
      parent_of_label[static_cast<std::size_t>(label[v])] = label[static_cast<std::size_t>(parent[v])];
    }
    seen.insert(std::move(parent_of_label));
  } while (std::next_permutation(label.begin(), label.end()));
  return seen.size();
}

/// Number of rooted unlabelled trees with n vertices (OEIS A000081) by the Euler
/// transform recurrence.
inline std::vector<std::uint64_t> rooted_tree_counts(int max_n) {
  std::vector<std::uint64_t> a(static_cast<std::size_t>(max_n) + 1, 0);
  if (max_n >= 1) a[1] = 1;
  for (int n = 1; n < max_n; ++n) {
    std::uint64_t sum = 0;
    for (int k = 1; k <= n; ++k) {
      std::uint64_t d_sum = 0;
      for (int d = 1; d <= k; ++d) {
        if (k % d == 0) d_sum += static_cast<std::uint64_t>(d) * a[static_cast<std::size_t>(d)];
      }
      sum += d_sum * a[static_cast<std::size_t>(n - k + 1)];
    }
    a[static_cast<std::size_t>(n) + 1] = sum / static_cast<std::uint64_t>(n);
  }
  return a;
}

/// Recursive trees (increasing labellings of labelled rooted trees) on n vertices: (n-1)!.
inline std::uint64_t recursive_tree_count(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k < n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

/// Standard normal quantile by bisection on the erfc-based distribution function.
inline double normal_quantile_bisection(double u) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Least-squares slope of log(err) against log(1/n): err ~ C n^-slope.
inline double convergence_slope(const std::vector<double>& n, const std::vector<double>& err) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    mx += std::log(n[i]);
    my += std::log(err[i]);
  }
  mx /= static_cast<double>(n.size());
  my /= static_cast<double>(n.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sxy += (std::log(n[i]) - mx) * (std::log(err[i]) - my);
    sxx += (std::log(n[i]) - mx) * (std::log(n[i]) - mx);
  }
  return -sxy / sxx;
}

/// Deterministic random rationals p/q with |p| <= span, 1 <= q <= max_den.
class RationalGen {
 public:
  explicit RationalGen(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  weak::Rational rational(long span, long max_den) {
    const long p = static_cast<long>(next() % static_cast<std::uint64_t>(2 * span + 1)) - span;
    const long q = 1 + static_cast<long>(next() % static_cast<std::uint64_t>(max_den));
    weak::Rational r(p, q);
    r.canonicalize();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace oracle
