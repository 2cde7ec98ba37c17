#include "weak/moment_search.hpp"

#include "weak/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace weak {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform(std::uint64_t& state) { return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53; }

// Precomputed expansion of C(w) for every even-parity word:
// C(w) = sum over compositions k of coef * prod_j c_j^e0_j * prod_p moment[index_p].
class ResidualKernel {
 public:
  ResidualKernel(int m, std::size_t M, int d) : M_(M), d_(d), max_len_(m) {
    radix_ = static_cast<std::size_t>(max_len_) + 1;
    std::size_t table = 1;
    for (std::size_t j = 0; j < M_; ++j) table *= radix_;
    moment_tuples_.resize(table);
    for (std::size_t idx = 0; idx < table; ++idx) {
      std::vector<int> powers(M_);
      std::size_t rest = idx;
      int total = 0;
      for (std::size_t j = 0; j < M_; ++j) {
        powers[j] = static_cast<int>(rest % radix_);
        rest /= radix_;
        total += powers[j];
      }
      moment_tuples_[idx] = total <= max_len_ ? powers : std::vector<int>{};
    }

    for (const Word& w : enumerate_words(d, m)) {
      if (!has_even_brownian_parity(w)) continue;
      WordExpansion e;
      e.target = target_coefficient(w).get_d();
      const int len = static_cast<int>(w.size());
      std::vector<int> k(M_, 0);
      expand(w, len, 0, len, k, e);
      words_.push_back(std::move(e));
    }
  }

  std::size_t residual_count() const { return words_.size(); }

  void residuals(const GaussianFamily<double>& family, Eigen::VectorXd& out) const {
    std::vector<double> moments(moment_tuples_.size(), 0.0);
    for (std::size_t idx = 0; idx < moment_tuples_.size(); ++idx) {
      if (!moment_tuples_[idx].empty()) moments[idx] = gaussian_moment(family.R, moment_tuples_[idx]);
    }
    std::vector<double> cpow(M_ * radix_);
    for (std::size_t j = 0; j < M_; ++j) {
      double p = 1.0;
      for (std::size_t e = 0; e < radix_; ++e) {
        cpow[j * radix_ + e] = p;
        p *= family.c[j];
      }
    }
    out.resize(static_cast<Eigen::Index>(words_.size()));
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      double sum = 0.0;
      for (const Term& t : words_[wi].terms) {
        double v = t.coefficient;
        for (std::size_t j = 0; j < M_; ++j) v *= cpow[j * radix_ + t.drift_powers[j]];
        for (std::size_t idx : t.moment_indices) v *= moments[idx];
        sum += v;
      }
      out[static_cast<Eigen::Index>(wi)] = sum - words_[wi].target;
    }
  }

 private:
  struct Term {
    double coefficient;
    std::vector<std::uint8_t> drift_powers;
    std::vector<std::size_t> moment_indices;
  };
  struct WordExpansion {
    double target = 0.0;
    std::vector<Term> terms;
  };

  void expand(const Word& w, int len, std::size_t j, int remaining, std::vector<int>& k, WordExpansion& e) {
    if (j + 1 == M_) {
      k[j] = remaining;
      add_term(w, k, e);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[j] = v;
      expand(w, len, j + 1, remaining - v, k, e);
    }
  }

  void add_term(const Word& w, const std::vector<int>& k, WordExpansion& e) {
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(d_) + 1, std::vector<int>(M_, 0));
    std::size_t pos = 0;
    double coefficient = 1.0;
    for (std::size_t j = 0; j < M_; ++j) {
      for (int r = 0; r < k[j]; ++r) ++counts[w[pos++]][j];
      for (int f = 2; f <= k[j]; ++f) coefficient /= f;
    }
    Term t;
    t.coefficient = coefficient;
    for (std::size_t j = 0; j < M_; ++j) t.drift_powers.push_back(static_cast<std::uint8_t>(counts[0][j]));
    for (int p = 1; p <= d_; ++p) {
      int total = 0;
      std::size_t idx = 0;
      std::size_t scale = 1;
      for (std::size_t j = 0; j < M_; ++j) {
        total += counts[static_cast<std::size_t>(p)][j];
        idx += static_cast<std::size_t>(counts[static_cast<std::size_t>(p)][j]) * scale;
        scale *= radix_;
      }
      if (total % 2 != 0) return;  // vanishes identically
      if (total > 0) t.moment_indices.push_back(idx);
    }
    e.terms.push_back(std::move(t));
  }

  std::size_t M_;
  int d_;
  int max_len_;
  std::size_t radix_ = 0;
  std::vector<std::vector<int>> moment_tuples_;
  std::vector<WordExpansion> words_;
};

// x = (c_1..c_{M-1}, lower-triangular L row by row); c_M = 1 - sum, R = L L^T.
GaussianFamily<double> decode(const Eigen::VectorXd& x, std::size_t M) {
  GaussianFamily<double> f;
  f.c.resize(M);
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < M; ++j) {
    f.c[j] = x[static_cast<Eigen::Index>(j)];
    sum += f.c[j];
  }
  f.c[M - 1] = 1.0 - sum;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  Eigen::Index pos = static_cast<Eigen::Index>(M) - 1;
  for (Eigen::Index r = 0; r < L.rows(); ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) L(r, c) = x[pos++];
  }
  const Eigen::MatrixXd R = L * L.transpose();
  std::vector<double> cov(M * M);
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t c = 0; c < M; ++c) {
      cov[r * M + c] = R(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  f.R = GaussianSpec<double>(M, std::move(cov));
  return f;
}

double levenberg_marquardt(const ResidualKernel& kernel, Eigen::VectorXd& x, std::size_t M, int max_iterations) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd r;
  kernel.residuals(decode(x, M), r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixXd J(r.size(), n);
  Eigen::VectorXd rp;
  for (int it = 0; it < max_iterations && cost > 1e-30; ++it) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
      Eigen::VectorXd xp = x;
      xp[k] += h;
      kernel.residuals(decode(xp, M), rp);
      J.col(k) = (rp - r) / h;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda * (1.0 + JtJ.diagonal().array());
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      const Eigen::VectorXd candidate = x + step;
      Eigen::VectorXd rc;
      kernel.residuals(decode(candidate, M), rc);
      const double c = rc.squaredNorm();
      if (std::isfinite(c) && c < cost) {
        x = candidate;
        r = std::move(rc);
        const double relative_gain = (cost - c) / std::max(cost, 1e-300);
        cost = c;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (relative_gain < 1e-12) it = max_iterations;
        break;
      }
      lambda *= 8.0;
    }
    if (!improved) break;
  }
  return std::sqrt(cost);
}

}  // namespace

MomentSearchResult minimize_moment_residuals(const MomentSearchOptions& options) {
  if (options.M < 1 || options.m < 1 || options.d < 1 || options.starts < 1) {
    throw ConfigurationError("moment search: m, M, d and starts must be positive");
  }
  const ResidualKernel kernel(options.m, options.M, options.d);
  const std::size_t M = options.M;
  const Eigen::Index n = static_cast<Eigen::Index>((M - 1) + M * (M + 1) / 2);
  std::uint64_t state = options.seed;

  MomentSearchResult best;
  best.best_residual_norm = std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.starts; ++s) {
    Eigen::VectorXd x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = 2.0 * uniform(state) - 1.0;
    // Start near a valid scale: c spread around 1/M, L of order one.
    for (std::size_t j = 0; j + 1 < M; ++j) x[static_cast<Eigen::Index>(j)] += 1.0 / static_cast<double>(M);
    const double norm = levenberg_marquardt(kernel, x, M, options.max_iterations);
    ++best.starts_run;
    if (norm < best.best_residual_norm) {
      best.best_residual_norm = norm;
      best.best_family = decode(x, M);
    }
  }
  return best;
}

double residual_norm(const GaussianFamily<double>& family, int m, int d) {
  const ResidualKernel kernel(m, family.M(), d);
  Eigen::VectorXd r;
  kernel.residuals(family, r);
  return r.norm();
}

}  // namespace weak
