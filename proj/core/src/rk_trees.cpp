#include "weak/rk_trees.hpp"

#include "weak/errors.hpp"

#include <algorithm>
#include <functional>

namespace weak {

Tree Tree::leaf() { return Tree(); }

Tree Tree::graft(std::vector<Tree> children) {
  Tree t;
  std::sort(children.begin(), children.end());
  t.order_ = 1;
  for (const Tree& c : children) t.order_ += c.order_;
  t.children_ = std::move(children);
  return t;
}

std::string Tree::to_string() const {
  if (is_leaf()) return "t";
  std::string out = "[";
  for (const Tree& c : children_) out += c.to_string();
  return out + "]";
}

std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
  if (auto c = a.order_ <=> b.order_; c != 0) return c;
  const std::size_t n = std::min(a.children_.size(), b.children_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.children_[i] <=> b.children_[i]; c != 0) return c;
  }
  return a.children_.size() <=> b.children_.size();
}

std::vector<std::vector<Tree>> enumerate_trees(int max_order) {
  if (max_order < 1) throw ConfigurationError("enumerate_trees: max_order must be at least 1");
  std::vector<std::vector<Tree>> by_order(static_cast<std::size_t>(max_order) + 1);
  by_order[1].push_back(Tree::leaf());
  std::vector<Tree> smaller{Tree::leaf()};  // all trees of order < n, canonical order

  for (int n = 2; n <= max_order; ++n) {
    // Children form a multiset of smaller trees with total order n - 1; choose them
    // as non-increasing index sequences into `smaller` so each multiset appears once.
    std::vector<Tree> found;
    std::vector<Tree> chosen;
    std::function<void(std::size_t, int)> rec = [&](std::size_t max_index, int remaining) {
      if (remaining == 0) {
        found.push_back(Tree::graft(chosen));
        return;
      }
      for (std::size_t i = max_index + 1; i-- > 0;) {
        if (smaller[i].order() > remaining) continue;
        chosen.push_back(smaller[i]);
        rec(i, remaining - smaller[i].order());
        chosen.pop_back();
      }
    };
    rec(smaller.size() - 1, n - 1);
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    by_order[static_cast<std::size_t>(n)] = found;
    smaller.insert(smaller.end(), found.begin(), found.end());
    std::sort(smaller.begin(), smaller.end());
  }
  return by_order;
}

std::uint64_t sigma(const Tree& t) {
  std::uint64_t out = 1;
  const auto& ch = t.children();
  for (std::size_t i = 0; i < ch.size();) {
    std::size_t j = i;
    while (j < ch.size() && ch[j] == ch[i]) ++j;
    const std::uint64_t multiplicity = j - i;
    const std::uint64_t s = sigma(ch[i]);
    for (std::uint64_t k = 2; k <= multiplicity; ++k) out *= k;
    for (std::uint64_t k = 0; k < multiplicity; ++k) out *= s;
    i = j;
  }
  return out;
}

std::uint64_t gamma(const Tree& t) {
  std::uint64_t out = static_cast<std::uint64_t>(t.order());
  for (const Tree& c : t.children()) out *= gamma(c);
  return out;
}

std::uint64_t alpha(const Tree& t) {
  std::uint64_t factorial = 1;
  for (int k = 2; k <= t.order(); ++k) factorial *= static_cast<std::uint64_t>(k);
  return factorial / (sigma(t) * gamma(t));
}

std::vector<Rational> ButcherTableau::nodes() const {
  std::vector<Rational> c(stages, Rational(0));
  for (std::size_t i = 0; i < stages; ++i) {
    for (const Rational& a : A[i]) c[i] += a;
  }
  return c;
}

void ButcherTableau::validate_explicit() const {
  if (stages == 0) throw ConfigurationError("tableau '" + name + "' has no stages");
  if (A.size() != stages || b.size() != stages) {
    throw ConfigurationError("tableau '" + name + "' has inconsistent dimensions");
  }
  for (std::size_t i = 0; i < stages; ++i) {
    if (A[i].size() != stages) throw ConfigurationError("tableau '" + name + "' has a ragged A");
    for (std::size_t j = i; j < stages; ++j) {
      if (!is_zero(A[i][j])) {
        throw ConfigurationError("tableau '" + name + "' is not explicit: a_" + std::to_string(i + 1) +
                                 std::to_string(j + 1) + " != 0");
      }
    }
  }
}

std::vector<Rational> elementary_weight(const Tree& t, const ButcherTableau& tableau) {
  const std::size_t K = tableau.stages;
  // Product over children of zeta_j(child), per stage j; empty product for the leaf.
  std::vector<Rational> inner(K, Rational(1));
  for (const Tree& child : t.children()) {
    const std::vector<Rational> z = elementary_weight(child, tableau);
    for (std::size_t j = 0; j < K; ++j) inner[j] *= z[j];
  }
  std::vector<Rational> out(K, Rational(0));
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      if (!is_zero(tableau.A[i][j])) out[i] += tableau.A[i][j] * inner[j];
    }
  }
  return out;
}

bool OrderReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const OrderConditionRow& r) { return r.pass; });
}

std::size_t OrderReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const OrderConditionRow& r) { return !r.pass; }));
}

OrderReport check_order(const ButcherTableau& tableau, int m) {
  tableau.validate_explicit();
  OrderReport report;
  report.order = m;
  const auto trees = enumerate_trees(m);
  for (int n = 1; n <= m; ++n) {
    for (const Tree& t : trees[static_cast<std::size_t>(n)]) {
      std::vector<Rational> product(tableau.stages, Rational(1));
      for (const Tree& child : t.children()) {
        const std::vector<Rational> z = elementary_weight(child, tableau);
        for (std::size_t i = 0; i < tableau.stages; ++i) product[i] *= z[i];
      }
      Rational weighted(0);
      for (std::size_t i = 0; i < tableau.stages; ++i) weighted += tableau.b[i] * product[i];

      mpz_class factorial;
      mpz_fac_ui(factorial.get_mpz_t(), static_cast<unsigned long>(t.order()));
      OrderConditionRow row{t, Rational(mpz_class(alpha(t)), factorial),
                            Rational(weighted / Rational(mpz_class(sigma(t)))), false};
      row.lhs.canonicalize();
      row.rhs.canonicalize();
      row.pass = row.lhs == row.rhs;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace weak
