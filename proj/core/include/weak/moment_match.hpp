#pragma once

// Moment matching for the two-exponential Gaussian splitting.
//
// With Z_j = c_j v0 + sum_i S^i_j v_i (S^i_j centred Gaussians, E[S^i_j S^i'_j'] =
// R_jj' delta_ii'), the coefficients of E[exp(Z_1) ... exp(Z_M)] are compared word by
// word against exp(v0 + 1/2 sum_i v_i^2). All functions are instantiated for Rational
// (exact verification) and double (irrational parameter families).

#include "weak/freealg.hpp"
#include "weak/rational.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace weak {

enum class Branch { upper, lower };

Branch parse_branch(const std::string& text);
std::string to_string(Branch b);

template <class Scalar>
Scalar scalar_cast(const Rational& q);
template <>
inline Rational scalar_cast<Rational>(const Rational& q) { return q; }
template <>
inline double scalar_cast<double>(const Rational& q) { return q.get_d(); }

/// Covariance of an M-dimensional centred Gaussian vector, row-major.
template <class Scalar>
struct GaussianSpec {
  std::size_t M = 0;
  std::vector<Scalar> covariance;

  GaussianSpec() = default;
  GaussianSpec(std::size_t dim, std::vector<Scalar> cov);

  const Scalar& at(std::size_t i, std::size_t j) const { return covariance[i * M + j]; }
  /// Symmetric and every principal minor non-negative.
  bool is_positive_semidefinite() const;
};

/// The data (c_1..c_M, R) defining Z_1..Z_M for any Brownian dimension d.
template <class Scalar>
struct GaussianFamily {
  std::vector<Scalar> c;
  GaussianSpec<Scalar> R;

  std::size_t M() const { return c.size(); }
  /// Throws ConfigurationError unless sum c_j = 1 (exact or 1e-12) and R is PSD.
  void validate() const;
};

/// The m = 5, M = 2 parameter family indexed by u >= 1/2 and a sign branch.
template <class Scalar>
struct SchemeParams {
  Scalar u;
  Branch branch = Branch::lower;
  Scalar c1, c2;
  Scalar R11, R12, R22;

  GaussianFamily<Scalar> family() const;
  /// Checks c1 + c2 = 1, PSD covariance, and agreement with solution_params(u, branch).
  void validate() const;
};

/// E[Y_1^m1 ... Y_M^mM] via the closed-form sum over pairing-count tables d_ij.
/// Odd total degree gives 0.
template <class Scalar>
Scalar gaussian_moment(const GaussianSpec<Scalar>& spec, const std::vector<int>& powers);

/// C(w) = <E[exp(Z_1) ... exp(Z_M)], w> summed over compositions of |w| into M blocks.
template <class Scalar>
Scalar scheme_coefficient(const GaussianFamily<Scalar>& family, const Word& w, int d);

template <class Scalar>
Scalar scheme_coefficient(const SchemeParams<Scalar>& params, const Word& w, int d) {
  return scheme_coefficient(params.family(), w, d);
}

/// E[j_m(exp(Z_1) ... exp(Z_M))] by expanding the product with symbolic Gaussian
/// monomials and taking the expectation of each monomial. Independent of
/// scheme_coefficient; used as its oracle.
template <class Scalar>
TruncatedSeries<Scalar> symbolic_expectation(const GaussianFamily<Scalar>& family, int m, int d);

template <class Scalar>
TruncatedSeries<Scalar> symbolic_expectation(const SchemeParams<Scalar>& params, int m, int d) {
  return symbolic_expectation(params.family(), m, d);
}

/// Coefficient of w in exp(v0 + 1/2 sum_i v_i^2): 1/(2^(|w|-l) l!) when w splits into
/// l blocks from {v0, v1v1, ..., vdvd}, else 0.
Rational target_coefficient(const Word& w);

/// j_m(exp(v0 + 1/2 sum_i v_i^2)) as an exact series.
TruncatedSeries<Rational> target_series(int m, int d);

/// Closed-form solution of the m = 5, M = 2 matching conditions.
/// The Rational instantiation requires sqrt(2(2u-1)) to be rational.
template <class Scalar>
SchemeParams<Scalar> solution_params(const Scalar& u, Branch branch);
template <>
SchemeParams<double> solution_params<double>(const double& u, Branch branch);
template <>
SchemeParams<Rational> solution_params<Rational>(const Rational& u, Branch branch);

/// True when every Brownian letter v1..vd occurs an even number of times.
bool has_even_brownian_parity(const Word& w);

template <class Scalar>
using ResidualMap = std::map<Word, Scalar, CanonicalWordOrder>;

/// scheme_coefficient - target_coefficient for every even-parity word with ||w|| <= m.
/// Odd-parity words vanish on both sides and are omitted.
template <class Scalar>
ResidualMap<Scalar> moment_residuals(const GaussianFamily<Scalar>& family, int m, int d);

template <class Scalar>
ResidualMap<Scalar> moment_residuals(const SchemeParams<Scalar>& params, int m, int d) {
  return moment_residuals(params.family(), m, d);
}

template <class Scalar>
struct ResidualRow {
  Word word;
  Scalar coefficient;
  Rational target;
  Scalar residual;
};

/// Same words as moment_residuals, with both sides kept for reporting.
template <class Scalar>
std::vector<ResidualRow<Scalar>> residual_table(const GaussianFamily<Scalar>& family, int m, int d);

/// The default parameters used by the simulation: u = 3/4, lower branch.
SchemeParams<Rational> default_scheme_params();

}  // namespace weak
