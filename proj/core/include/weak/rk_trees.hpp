#pragma once

// Rooted trees and exact Runge-Kutta order conditions.

#include "weak/rational.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace weak {

/// A non-labelled rooted tree in canonical form: children are kept sorted, so two
/// Trees compare equal exactly when they are isomorphic.
class Tree {
 public:
  /// The single-vertex tree.
  static Tree leaf();
  /// [t1 ... tn]; the order of `children` is irrelevant.
  static Tree graft(std::vector<Tree> children);

  int order() const noexcept { return order_; }
  const std::vector<Tree>& children() const noexcept { return children_; }
  bool is_leaf() const noexcept { return children_.empty(); }

  /// "t" for the leaf, "[t[t]]" style otherwise.
  std::string to_string() const;

  /// Ordered by (order, children lexicographically).
  friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);
  friend bool operator==(const Tree& a, const Tree& b) { return (a <=> b) == 0; }

 private:
  Tree() = default;

  std::vector<Tree> children_;
  int order_ = 1;
};

/// trees[k] holds one representative of every tree with k vertices (trees[0] is empty),
/// sorted canonically.
std::vector<std::vector<Tree>> enumerate_trees(int max_order);

/// Symmetry factor: 1 for the leaf, prod m_i! sigma(t_i)^m_i for [t_1^m_1 ... t_l^m_l].
std::uint64_t sigma(const Tree& t);
/// Density: 1 for the leaf, r(t) * prod gamma(child).
std::uint64_t gamma(const Tree& t);
/// Number of monotone labellings, r(t)! / (sigma(t) gamma(t)).
std::uint64_t alpha(const Tree& t);

/// An explicit Runge-Kutta coefficient pair (A, b) with exact entries.
struct ButcherTableau {
  std::string name;
  std::size_t stages = 0;
  std::vector<std::vector<Rational>> A;  // stages x stages
  std::vector<Rational> b;
  int declared_order = 0;

  /// Row sums of A.
  std::vector<Rational> nodes() const;
  /// Throws ConfigurationError on shape errors or a nonzero a_ij with i <= j.
  void validate_explicit() const;
};

/// zeta_i(t; A) for i = 1..K.
std::vector<Rational> elementary_weight(const Tree& t, const ButcherTableau& tableau);

struct OrderConditionRow {
  Tree tree;
  Rational lhs;  // alpha(t) / r(t)!
  Rational rhs;  // sum_i b_i prod_k zeta_i(t_k) / sigma(t)
  bool pass = false;
};

struct OrderReport {
  int order = 0;
  std::vector<OrderConditionRow> rows;
  bool all_pass() const;
  std::size_t failures() const;
};

/// Checks every tree with at most m vertices, exactly.
OrderReport check_order(const ButcherTableau& tableau, int m);

}  // namespace weak
