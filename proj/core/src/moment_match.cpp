#include "weak/moment_match.hpp"

#include "weak/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>

namespace weak {

Branch parse_branch(const std::string& text) {
  if (text == "upper") return Branch::upper;
  if (text == "lower") return Branch::lower;
  throw ConfigurationError("branch must be 'upper' or 'lower', got '" + text + "'");
}

std::string to_string(Branch b) { return b == Branch::upper ? "upper" : "lower"; }

namespace {

template <class Scalar>
Scalar factorial(int n);

template <>
Rational factorial<Rational>(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(f);
}

template <>
double factorial<double>(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

template <class Scalar>
Scalar power(const Scalar& x, int e) {
  Scalar out(1);
  for (int k = 0; k < e; ++k) out *= x;
  return out;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }
bool same(const Rational& a, const Rational& b) { return a == b; }
bool same(double a, double b) { return near(a, b); }

template <class Scalar>
bool non_negative(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x >= -1e-12;
  } else {
    return sgn(x) >= 0;
  }
}

template <class Scalar>
Scalar determinant(std::vector<Scalar> a, std::size_t n) {
  // Gaussian elimination with row swaps; exact for Rational.
  Scalar det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    if constexpr (std::is_same_v<Scalar, double>) {
      for (std::size_t r = col + 1; r < n; ++r) {
        if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
      }
    } else {
      while (pivot < n && is_zero(a[pivot * n + col])) ++pivot;
    }
    if (pivot == n || is_zero(a[pivot * n + col])) return Scalar(0);
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[pivot * n + k], a[col * n + k]);
      det = Scalar(-det);
    }
    det *= a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      Scalar f = a[r * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
    }
  }
  return det;
}

/// Compositions of `total` into `parts` non-negative integers, in lexicographic order.
void for_each_composition(int total, std::size_t parts, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> k(parts, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int remaining) {
    if (idx + 1 == parts) {
      k[idx] = remaining;
      f(k);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[idx] = v;
      rec(idx + 1, remaining - v);
    }
  };
  if (parts == 0) return;
  rec(0, total);
}

// Polynomials in the Gaussian variables S^i_j with scalar coefficients. Used only as
// the coefficient ring of the brute-force symbolic expansion.
template <class Scalar>
class GaussPoly {
 public:
  using Exponents = std::vector<std::uint8_t>;
  using Terms = std::map<Exponents, Scalar>;

  GaussPoly() = default;
  GaussPoly(int k) {  // NOLINT(google-explicit-constructor): scalar literals 0 and 1
    if (k != 0) terms_[{}] = Scalar(k);
  }
  static GaussPoly constant(const Scalar& c) {
    GaussPoly p;
    if (!is_zero(c)) p.terms_[{}] = c;
    return p;
  }
  static GaussPoly variable(std::size_t index) {
    GaussPoly p;
    Exponents e(index + 1, 0);
    e[index] = 1;
    p.terms_[e] = Scalar(1);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  GaussPoly& operator+=(const GaussPoly& o) {
    for (const auto& [e, c] : o.terms_) add(e, c);
    return *this;
  }
  GaussPoly& operator*=(const GaussPoly& o) {
    *this = *this * o;
    return *this;
  }
  friend GaussPoly operator*(const GaussPoly& a, const GaussPoly& b) {
    GaussPoly out;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(std::max(ea.size(), eb.size()), 0);
        for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
        for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
        out.add(e, Scalar(ca * cb));
      }
    }
    return out;
  }
  friend GaussPoly operator-(const GaussPoly& a) {
    GaussPoly out;
    for (const auto& [e, c] : a.terms_) out.terms_[e] = Scalar(-c);
    return out;
  }
  friend GaussPoly operator-(const GaussPoly& a, const GaussPoly& b) { return GaussPoly(a) += -b; }
  friend bool operator==(const GaussPoly& a, const GaussPoly& b) { return a.terms_ == b.terms_; }

  GaussPoly divided_by(long k) const {
    GaussPoly out;
    for (const auto& [e, c] : terms_) out.terms_[e] = divide_by_integer(c, k);
    return out;
  }

 private:
  void add(Exponents e, const Scalar& c) {
    while (!e.empty() && e.back() == 0) e.pop_back();
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second)) terms_.erase(it);
    } else if (is_zero(c)) {
      terms_.erase(it);
    }
  }

  Terms terms_;
};

template <class Scalar>
bool is_zero(const GaussPoly<Scalar>& p) { return p.empty(); }

template <class Scalar>
GaussPoly<Scalar> divide_by_integer(const GaussPoly<Scalar>& p, long k) { return p.divided_by(k); }

}  // namespace

template <>
SchemeParams<double> solution_params<double>(const double& u, Branch branch) {
  if (!(u >= 0.5)) throw DomainError("solution_params: u must be at least 1/2");
  const double root = std::sqrt(2.0 * (2.0 * u - 1.0));
  const double sign = branch == Branch::upper ? 1.0 : -1.0;
  SchemeParams<double> p;
  p.u = u;
  p.branch = branch;
  p.c1 = -sign * root / 2.0;
  p.c2 = 1.0 + sign * root / 2.0;
  p.R11 = u;
  p.R22 = 1.0 + u + sign * root;
  p.R12 = -u - sign * root / 2.0;
  return p;
}

template <>
SchemeParams<Rational> solution_params<Rational>(const Rational& u, Branch branch) {
  if (u < Rational(1, 2)) throw DomainError("solution_params: u must be at least 1/2");
  const Rational radicand = 2 * (2 * u - 1);
  const auto root = exact_sqrt(radicand);
  if (!root) {
    throw DomainError("solution_params: sqrt(2(2u-1)) is irrational for u = " + to_string(u) +
                      "; use floating-point parameters");
  }
  const Rational sign = branch == Branch::upper ? Rational(1) : Rational(-1);
  SchemeParams<Rational> p;
  p.u = u;
  p.branch = branch;
  p.c1 = -sign * *root / 2;
  p.c2 = 1 + sign * *root / 2;
  p.R11 = u;
  p.R22 = 1 + u + sign * *root;
  p.R12 = -u - sign * *root / 2;
  return p;
}

template <class Scalar>
GaussianSpec<Scalar>::GaussianSpec(std::size_t dim, std::vector<Scalar> cov) : M(dim), covariance(std::move(cov)) {
  if (covariance.size() != M * M) throw ConfigurationError("covariance must be M x M");
}

template <class Scalar>
bool GaussianSpec<Scalar>::is_positive_semidefinite() const {
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i + 1; j < M; ++j) {
      if (!same(at(i, j), at(j, i))) return false;
    }
  }
  // Every principal minor must be non-negative.
  for (std::uint32_t mask = 1; mask < (1u << M); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < M; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    std::vector<Scalar> sub;
    for (auto r : idx) {
      for (auto c : idx) sub.push_back(at(r, c));
    }
    if (!non_negative(determinant(sub, idx.size()))) return false;
  }
  return true;
}

template <class Scalar>
void GaussianFamily<Scalar>::validate() const {
  if (R.M != c.size()) throw ConfigurationError("family: c and R dimensions differ");
  Scalar sum(0);
  for (const auto& cj : c) sum += cj;
  if (!same(sum, Scalar(1))) throw ConfigurationError("family: c_1 + ... + c_M must equal 1");
  if (!R.is_positive_semidefinite()) throw ConfigurationError("family: covariance is not positive semidefinite");
}

template <class Scalar>
GaussianFamily<Scalar> SchemeParams<Scalar>::family() const {
  GaussianFamily<Scalar> f;
  f.c = {c1, c2};
  f.R = GaussianSpec<Scalar>(2, {R11, R12, R12, R22});
  return f;
}

template <class Scalar>
void SchemeParams<Scalar>::validate() const {
  family().validate();
  const SchemeParams<Scalar> expected = solution_params(u, branch);
  if (!same(c1, expected.c1) || !same(c2, expected.c2) || !same(R11, expected.R11) ||
      !same(R12, expected.R12) || !same(R22, expected.R22)) {
    throw ConfigurationError("scheme parameters do not lie on the solution family for u");
  }
}

template <class Scalar>
Scalar gaussian_moment(const GaussianSpec<Scalar>& spec, const std::vector<int>& powers) {
  const std::size_t M = spec.M;
  if (powers.size() != M) throw ConfigurationError("gaussian_moment: one power per variable expected");
  int total = 0;
  for (int p : powers) {
    if (p < 0) throw ConfigurationError("gaussian_moment: negative power");
    total += p;
  }
  if (total % 2 != 0) return Scalar(0);
  if (total == 0) return Scalar(1);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i + 1; j < M; ++j) pairs.emplace_back(i, j);
  }

  Scalar numerator(1);
  for (int p : powers) numerator *= factorial<Scalar>(p);

  std::vector<int> remaining = powers;
  std::vector<int> offdiag(pairs.size(), 0);
  Scalar sum(0);

  std::function<void(std::size_t)> rec = [&](std::size_t p) {
    if (p == pairs.size()) {
      Scalar term = numerator;
      for (std::size_t i = 0; i < M; ++i) {
        if (remaining[i] % 2 != 0) return;
      }
      for (std::size_t i = 0; i < M; ++i) {
        const int dii = remaining[i] / 2;
        term /= factorial<Scalar>(dii);
        term /= power(Scalar(2), dii);
        term *= power(spec.at(i, i), dii);
      }
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        term /= factorial<Scalar>(offdiag[q]);
        term *= power(spec.at(pairs[q].first, pairs[q].second), offdiag[q]);
      }
      sum += term;
      return;
    }
    const auto [i, j] = pairs[p];
    const int cap = std::min(remaining[i], remaining[j]);
    for (int v = 0; v <= cap; ++v) {
      offdiag[p] = v;
      remaining[i] -= v;
      remaining[j] -= v;
      rec(p + 1);
      remaining[i] += v;
      remaining[j] += v;
    }
    offdiag[p] = 0;
  };
  rec(0);
  return sum;
}

bool has_even_brownian_parity(const Word& w) {
  std::map<Letter, int> counts;
  for (Letter l : w.letters()) {
    if (l != 0) ++counts[l];
  }
  return std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second % 2 == 0; });
}

template <class Scalar>
Scalar scheme_coefficient(const GaussianFamily<Scalar>& family, const Word& w, int d) {
  const std::size_t M = family.M();
  if (M == 0 || family.R.M != M) throw ConfigurationError("scheme_coefficient: malformed family");
  for (Letter l : w.letters()) {
    if (l > d) throw ConfigurationError("scheme_coefficient: word uses a letter beyond v_d");
  }
  if (!has_even_brownian_parity(w)) return Scalar(0);

  const int length = static_cast<int>(w.size());
  Scalar total(0);
  for_each_composition(length, M, [&](const std::vector<int>& k) {
    // N^w(i, j, k): occurrences of letter i inside block j.
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(d) + 1, std::vector<int>(M, 0));
    std::size_t pos = 0;
    Scalar term(1);
    for (std::size_t j = 0; j < M; ++j) {
      for (int r = 0; r < k[j]; ++r) ++counts[w[pos++]][j];
      term /= factorial<Scalar>(k[j]);
      term *= power(family.c[j], counts[0][j]);
    }
    for (int p = 1; p <= d && !is_zero(term); ++p) {
      term *= gaussian_moment(family.R, counts[static_cast<std::size_t>(p)]);
    }
    total += term;
  });
  return total;
}

template <class Scalar>
TruncatedSeries<Scalar> symbolic_expectation(const GaussianFamily<Scalar>& family, int m, int d) {
  using Poly = GaussPoly<Scalar>;
  const std::size_t M = family.M();
  auto var_index = [M](int i, std::size_t j) { return static_cast<std::size_t>(i - 1) * M + j; };

  TruncatedSeries<Poly> product = TruncatedSeries<Poly>::one(m);
  for (std::size_t j = 0; j < M; ++j) {
    TruncatedSeries<Poly> z = TruncatedSeries<Poly>::letter(0, m, Poly::constant(family.c[j]));
    for (int i = 1; i <= d; ++i) z += TruncatedSeries<Poly>::letter(i, m, Poly::variable(var_index(i, j)));
    product = product * exp(z);
  }

  TruncatedSeries<Scalar> result(m);
  for (const auto& [w, poly] : product.terms()) {
    Scalar value(0);
    for (const auto& [exponents, coefficient] : poly.terms()) {
      Scalar term = coefficient;
      for (int i = 1; i <= d && !is_zero(term); ++i) {
        std::vector<int> powers(M, 0);
        for (std::size_t j = 0; j < M; ++j) {
          const std::size_t idx = var_index(i, j);
          powers[j] = idx < exponents.size() ? exponents[idx] : 0;
        }
        term *= gaussian_moment(family.R, powers);
      }
      value += term;
    }
    result.add_to(w, value);
  }
  return result;
}

Rational target_coefficient(const Word& w) {
  // Factorisation into blocks from {v0, v1v1, ..., vdvd} is unique when it exists.
  std::size_t pos = 0;
  long blocks = 0;
  while (pos < w.size()) {
    if (w[pos] == 0) {
      ++pos;
    } else if (pos + 1 < w.size() && w[pos + 1] == w[pos]) {
      pos += 2;
    } else {
      return Rational(0);
    }
    ++blocks;
  }
  const long doubled = static_cast<long>(w.size()) - blocks;
  mpz_class denominator;
  mpz_fac_ui(denominator.get_mpz_t(), static_cast<unsigned long>(blocks));
  denominator <<= static_cast<mp_bitcnt_t>(doubled);
  return Rational(mpz_class(1), denominator);
}

TruncatedSeries<Rational> target_series(int m, int d) {
  TruncatedSeries<Rational> out(m);
  for (const Word& w : enumerate_words(d, m)) out.add_to(w, target_coefficient(w));
  return out;
}

template <class Scalar>
ResidualMap<Scalar> moment_residuals(const GaussianFamily<Scalar>& family, int m, int d) {
  ResidualMap<Scalar> out;
  for (const Word& w : enumerate_words(d, m)) {
    if (!has_even_brownian_parity(w)) continue;
    out.emplace(w, Scalar(scheme_coefficient(family, w, d) - scalar_cast<Scalar>(target_coefficient(w))));
  }
  return out;
}

template <class Scalar>
std::vector<ResidualRow<Scalar>> residual_table(const GaussianFamily<Scalar>& family, int m, int d) {
  std::vector<ResidualRow<Scalar>> rows;
  for (const Word& w : enumerate_words(d, m)) {
    if (!has_even_brownian_parity(w)) continue;
    ResidualRow<Scalar> row{w, scheme_coefficient(family, w, d), target_coefficient(w), Scalar(0)};
    row.residual = row.coefficient - scalar_cast<Scalar>(row.target);
    rows.push_back(std::move(row));
  }
  return rows;
}

SchemeParams<Rational> default_scheme_params() {
  return solution_params<Rational>(Rational(3, 4), Branch::lower);
}

#define WEAK_INSTANTIATE_MOMENT_MATCH(S)                                                              \
  template struct GaussianSpec<S>;                                                                    \
  template struct GaussianFamily<S>;                                                                  \
  template struct SchemeParams<S>;                                                                    \
  template S gaussian_moment<S>(const GaussianSpec<S>&, const std::vector<int>&);                     \
  template S scheme_coefficient<S>(const GaussianFamily<S>&, const Word&, int);                       \
  template TruncatedSeries<S> symbolic_expectation<S>(const GaussianFamily<S>&, int, int);            \
  template ResidualMap<S> moment_residuals<S>(const GaussianFamily<S>&, int, int);                    \
  template std::vector<ResidualRow<S>> residual_table<S>(const GaussianFamily<S>&, int, int);

WEAK_INSTANTIATE_MOMENT_MATCH(Rational)
WEAK_INSTANTIATE_MOMENT_MATCH(double)

#undef WEAK_INSTANTIATE_MOMENT_MATCH

}  // namespace weak
