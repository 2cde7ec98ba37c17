#pragma once

// Explicit Runge-Kutta integration of autonomous vector fields.
//
// An IntegrationScheme is g(W)(y) = Y(y; W, 1): the caller folds the step size into
// the field, as the splitting scheme does with its rescaled Lie elements.

#include "weak/errors.hpp"
#include "weak/rk_trees.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace weak {

/// An autonomous vector field on R^N.
struct VectorField {
  std::size_t dimension = 0;
  std::function<void(std::span<const double> y, std::span<double> out)> eval;

  void operator()(std::span<const double> y, std::span<double> out) const { eval(y, out); }
};

/// Exact tableaus "rk5-butcher" (6 stages, order 5) and "rk7-butcher" (9 stages, order 7).
ButcherTableau builtin_tableau(std::string_view name);
std::vector<std::string> builtin_tableau_names();

/// Scratch space for one integrator on one thread.
struct RkWorkspace {
  std::vector<double> slopes;  // stages x N
  std::vector<double> stage;   // N

  void ensure(std::size_t stages, std::size_t n) {
    if (slopes.size() < stages * n) slopes.resize(stages * n);
    if (stage.size() < n) stage.resize(n);
  }
};

/// A tableau whose order conditions have been verified exactly.
class IntegrationScheme {
 public:
  /// Throws ConfigurationError unless check_order(tableau, order) passes.
  static IntegrationScheme certified(ButcherTableau tableau, int order);
  /// A builtin tableau certified at its declared order.
  static IntegrationScheme builtin(std::string_view name);

  const ButcherTableau& tableau() const noexcept { return tableau_; }
  int order() const noexcept { return order_; }
  std::size_t stages() const noexcept { return tableau_.stages; }

  /// One step y <- Y(y; W, s). `field` is any callable (span<const double>, span<double>).
  template <class Field>
  void step(const Field& field, std::span<double> y, double s, RkWorkspace& ws) const {
    const std::size_t K = tableau_.stages;
    const std::size_t n = y.size();
    ws.ensure(K, n);
    double* slopes = ws.slopes.data();
    double* stage = ws.stage.data();
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t c = 0; c < n; ++c) stage[c] = y[c];
      for (std::size_t j = 0; j < i; ++j) {
        const double a = a_[i * K + j];
        if (a == 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) stage[c] += s * a * slopes[j * n + c];
      }
      field(std::span<const double>(stage, n), std::span<double>(slopes + i * n, n));
      for (std::size_t c = 0; c < n; ++c) {
        if (!std::isfinite(slopes[i * n + c])) {
          throw IntegrationFailure(i, "non-finite state at Runge-Kutta stage " + std::to_string(i + 1));
        }
      }
    }
    for (std::size_t i = 0; i < K; ++i) {
      const double b = b_[i];
      if (b == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) y[c] += s * b * slopes[i * n + c];
    }
  }

 private:
  IntegrationScheme(ButcherTableau tableau, int order);

  ButcherTableau tableau_;
  int order_;
  std::vector<double> a_;  // row-major K x K
  std::vector<double> b_;
};

/// Y(y0; W, s), optionally split into `substeps` equal steps (diagnostics only).
std::vector<double> rk_step(const IntegrationScheme& scheme, const VectorField& field, std::span<const double> y0,
                            double s, int substeps = 1);

}  // namespace weak
