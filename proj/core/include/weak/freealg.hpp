#pragma once

// Truncated non-commutative power series over the alphabet {v0, v1, ..., vd}.
//
// The grading used throughout is the scaled degree ||w|| = |w| + #(v0 letters):
// v0 plays the role of the time direction and counts twice, Brownian letters
// count once. A TruncatedSeries of degree m never stores a word with ||w|| > m.

#include "weak/errors.hpp"
#include "weak/rational.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace weak {

using Letter = std::uint8_t;

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word of(std::initializer_list<int> letters);
  static Word letter(int index) { return Word(std::vector<Letter>{static_cast<Letter>(index)}); }

  /// |w|
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  /// ||w||
  int scaled_degree() const noexcept;
  /// Number of occurrences of `letter`.
  int count(Letter letter) const noexcept;

  const std::vector<Letter>& letters() const noexcept { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  Word concat(const Word& tail) const;
  /// Letters [first, first + count).
  Word slice(std::size_t first, std::size_t count) const;

  /// "1" for the empty word, otherwise "v0.v1.v1".
  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

/// Parses "1", "v1" or "v0.v1.v1".
Word parse_word(const std::string& text);

inline int word_scaled_degree(const Word& w) { return w.scaled_degree(); }

/// Total order by (||w||, |w|, letters lexicographically).
struct CanonicalWordOrder {
  bool operator()(const Word& a, const Word& b) const noexcept;
};

/// Every word over {v0..vd} with ||w|| <= max_scaled_degree, in canonical order.
std::vector<Word> enumerate_words(int d, int max_scaled_degree);

// Scalar hooks. Rational and double overloads live in rational.hpp; other scalar
// rings (e.g. polynomial coefficients) provide their own through ADL.
inline Rational divide_by_integer(const Rational& q, long k) { return Rational(q / Rational(k)); }
inline double divide_by_integer(double x, long k) { return x / static_cast<double>(k); }

inline std::string scalar_to_string(const Rational& q) { return to_string(q); }
inline std::string scalar_to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline double sqrt_scalar(double x) {
  if (x < 0) throw DomainError("square root of a negative scale");
  return std::sqrt(x);
}
inline Rational sqrt_scalar(const Rational& q) {
  auto root = exact_sqrt(q);
  if (!root) throw DomainError("rational rescaling needs a perfect-square scale, got " + to_string(q));
  return *root;
}

template <class Scalar>
class TruncatedSeries {
 public:
  using Terms = std::map<Word, Scalar, CanonicalWordOrder>;

  explicit TruncatedSeries(int truncation_degree) : degree_(truncation_degree) {
    if (truncation_degree < 0) throw ConfigurationError("negative truncation degree");
  }

  static TruncatedSeries one(int m) { return word(Word{}, m, Scalar(1)); }

  static TruncatedSeries word(const Word& w, int m, const Scalar& coefficient = Scalar(1)) {
    TruncatedSeries s(m);
    s.add_to(w, coefficient);
    return s;
  }

  static TruncatedSeries letter(int index, int m, const Scalar& coefficient = Scalar(1)) {
    return word(Word::letter(index), m, coefficient);
  }

  int truncation_degree() const noexcept { return degree_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Scalar coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  Scalar constant_term() const { return coefficient(Word{}); }

  /// Adds `c` to the coefficient of `w`; words beyond the truncation are dropped.
  void add_to(const Word& w, const Scalar& c) {
    if (w.scaled_degree() > degree_ || weak_is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (weak_is_zero(it->second)) terms_.erase(it);
    }
  }

  TruncatedSeries& operator+=(const TruncatedSeries& other) {
    require_compatible(other);
    for (const auto& [w, c] : other.terms_) add_to(w, c);
    return *this;
  }

  TruncatedSeries& operator-=(const TruncatedSeries& other) {
    require_compatible(other);
    for (const auto& [w, c] : other.terms_) add_to(w, Scalar(-c));
    return *this;
  }

  TruncatedSeries& operator*=(const Scalar& factor) {
    if (weak_is_zero(factor)) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= factor;
    return *this;
  }

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator-(TruncatedSeries a) { return a *= Scalar(-1); }
  friend TruncatedSeries operator*(const Scalar& k, TruncatedSeries a) { return a *= k; }
  friend TruncatedSeries operator*(TruncatedSeries a, const Scalar& k) { return a *= k; }

  /// Concatenation product, truncated at the shared degree.
  friend TruncatedSeries operator*(const TruncatedSeries& p, const TruncatedSeries& q) {
    p.require_compatible(q);
    TruncatedSeries out(p.degree_);
    for (const auto& [u, a] : p.terms_) {
      const int du = u.scaled_degree();
      for (const auto& [v, b] : q.terms_) {
        if (du + v.scaled_degree() > p.degree_) continue;
        out.add_to(u.concat(v), Scalar(a * b));
      }
    }
    return out;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  void require_compatible(const TruncatedSeries& other) const {
    if (degree_ != other.degree_) {
      throw ConfigurationError("truncation degree mismatch: " + std::to_string(degree_) + " vs " +
                               std::to_string(other.degree_));
    }
  }

 private:
  static bool weak_is_zero(const Scalar& c) {
    using weak::is_zero;
    return is_zero(c);
  }

  int degree_;
  Terms terms_;
};

template <class Scalar>
TruncatedSeries<Scalar> bracket(const TruncatedSeries<Scalar>& x, const TruncatedSeries<Scalar>& y) {
  return x * y - y * x;
}

/// 1 + sum_k p^k / k!, stopping once the power truncates to zero.
template <class Scalar>
TruncatedSeries<Scalar> exp(const TruncatedSeries<Scalar>& p) {
  using weak::is_zero;
  if (!is_zero(p.constant_term())) throw DomainError("exp needs a series without constant term");
  const int m = p.truncation_degree();
  TruncatedSeries<Scalar> result = TruncatedSeries<Scalar>::one(m);
  TruncatedSeries<Scalar> power = TruncatedSeries<Scalar>::one(m);
  for (long k = 1; ; ++k) {
    // power holds p^k / k!
    power = power * p;
    if (power.is_zero()) break;
    TruncatedSeries<Scalar> scaled(m);
    for (const auto& [w, c] : power.terms()) scaled.add_to(w, divide_by_integer(c, k));
    power = std::move(scaled);
    result += power;
  }
  return result;
}

/// sum_k (-1)^(k-1) (q - 1)^k / k.
template <class Scalar>
TruncatedSeries<Scalar> log(const TruncatedSeries<Scalar>& q) {
  using weak::is_zero;
  const int m = q.truncation_degree();
  if (!is_zero(Scalar(q.constant_term() - Scalar(1)))) {
    throw DomainError("log needs a series with constant term 1");
  }
  const TruncatedSeries<Scalar> x = q - TruncatedSeries<Scalar>::one(m);
  TruncatedSeries<Scalar> result(m);
  TruncatedSeries<Scalar> power = TruncatedSeries<Scalar>::one(m);
  for (long k = 1; ; ++k) {
    power = power * x;
    if (power.is_zero()) break;
    for (const auto& [w, c] : power.terms()) {
      Scalar term = divide_by_integer(c, k);
      if (k % 2 == 0) term = Scalar(-term);
      result.add_to(w, term);
    }
  }
  return result;
}

/// j_m: drops every word with ||w|| > m. The result keeps the input's truncation degree.
template <class Scalar>
TruncatedSeries<Scalar> project_jm(const TruncatedSeries<Scalar>& p, int m) {
  if (m > p.truncation_degree()) {
    throw ConfigurationError("j_" + std::to_string(m) + " exceeds truncation degree " +
                             std::to_string(p.truncation_degree()));
  }
  TruncatedSeries<Scalar> out(p.truncation_degree());
  for (const auto& [w, c] : p.terms()) {
    if (w.scaled_degree() <= m) out.add_to(w, c);
  }
  return out;
}

/// Psi_s: the homogeneous component of scaled degree k is multiplied by s^(k/2).
template <class Scalar>
TruncatedSeries<Scalar> rescale_psi(const TruncatedSeries<Scalar>& p, const Scalar& s) {
  const Scalar root = sqrt_scalar(s);
  std::vector<Scalar> factor{Scalar(1)};
  for (int k = 1; k <= p.truncation_degree(); ++k) factor.push_back(Scalar(factor.back() * root));
  TruncatedSeries<Scalar> out(p.truncation_degree());
  for (const auto& [w, c] : p.terms()) out.add_to(w, Scalar(c * factor[w.scaled_degree()]));
  return out;
}

template <class Scalar>
Scalar inner(const TruncatedSeries<Scalar>& p, const TruncatedSeries<Scalar>& q) {
  p.require_compatible(q);
  Scalar sum(0);
  for (const auto& [w, c] : p.terms()) {
    auto it = q.terms().find(w);
    if (it != q.terms().end()) sum += c * it->second;
  }
  return sum;
}

template <class Scalar>
double norm2(const TruncatedSeries<Scalar>& p) {
  return std::sqrt(to_double(inner(p, p)));
}

/// The right-nested bracketing r(v_i1 ... v_in) = [v_i1, [v_i2, ..., [v_i(n-1), v_in]...]],
/// extended linearly; r(1) = 0.
template <class Scalar>
TruncatedSeries<Scalar> right_nested_bracketing(const TruncatedSeries<Scalar>& p) {
  const int m = p.truncation_degree();
  TruncatedSeries<Scalar> out(m);
  for (const auto& [w, c] : p.terms()) {
    if (w.empty()) continue;
    TruncatedSeries<Scalar> nested = TruncatedSeries<Scalar>::letter(w[w.size() - 1], m);
    for (std::size_t i = w.size() - 1; i-- > 0;) {
      nested = bracket(TruncatedSeries<Scalar>::letter(w[i], m), nested);
    }
    out += c * nested;
  }
  return out;
}

/// Dynkin-Specht-Wever test: a series without constant term is a Lie series iff
/// every length-n homogeneous component P_n satisfies r(P_n) = n P_n.
template <class Scalar>
bool is_lie(const TruncatedSeries<Scalar>& p) {
  using weak::is_zero;
  if (!is_zero(p.constant_term())) return false;
  const int m = p.truncation_degree();
  std::map<std::size_t, TruncatedSeries<Scalar>> by_length;
  for (const auto& [w, c] : p.terms()) {
    by_length.try_emplace(w.size(), m).first->second.add_to(w, c);
  }
  for (const auto& [n, component] : by_length) {
    TruncatedSeries<Scalar> lhs = right_nested_bracketing(component);
    TruncatedSeries<Scalar> rhs = Scalar(static_cast<long>(n)) * component;
    if (!(lhs - rhs).is_zero()) return false;
  }
  return true;
}

template <class Scalar>
std::string to_string(const TruncatedSeries<Scalar>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    if (!first) out += " + ";
    first = false;
    if (w.empty()) {
      out += scalar_to_string(c);
    } else {
      out += "(" + scalar_to_string(c) + ") " + w.to_string();
    }
  }
  return out;
}

/// A truncated series that is a Lie series by construction.
template <class Scalar>
class LieElement {
 public:
  explicit LieElement(int truncation_degree) : series_(truncation_degree) {}

  static LieElement letter(int index, int m, const Scalar& coefficient = Scalar(1)) {
    return LieElement(TruncatedSeries<Scalar>::letter(index, m, coefficient));
  }

  /// Accepts an arbitrary series after verifying the Lie property.
  static LieElement checked(TruncatedSeries<Scalar> series) {
    if (!is_lie(series)) throw DomainError("series is not a Lie element");
    return LieElement(std::move(series));
  }

  const TruncatedSeries<Scalar>& series() const noexcept { return series_; }
  int truncation_degree() const noexcept { return series_.truncation_degree(); }

  friend LieElement operator+(const LieElement& a, const LieElement& b) {
    return LieElement(a.series_ + b.series_);
  }
  friend LieElement operator-(const LieElement& a, const LieElement& b) {
    return LieElement(a.series_ - b.series_);
  }
  friend LieElement operator*(const Scalar& k, const LieElement& a) { return LieElement(k * a.series_); }
  friend bool operator==(const LieElement& a, const LieElement& b) { return a.series_ == b.series_; }

  friend LieElement bracket(const LieElement& a, const LieElement& b) {
    return LieElement(bracket(a.series_, b.series_));
  }

  /// z2 |-| z1 = log(exp(z2) exp(z1)).
  friend LieElement bch(const LieElement& z2, const LieElement& z1) {
    return LieElement(log(exp(z2.series_) * exp(z1.series_)));
  }

 private:
  explicit LieElement(TruncatedSeries<Scalar> s) : series_(std::move(s)) {}

  TruncatedSeries<Scalar> series_;
};

}  // namespace weak
