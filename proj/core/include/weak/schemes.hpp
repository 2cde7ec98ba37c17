#pragma once

// Weak-approximation drivers: the Gaussian splitting scheme (NN), Euler-Maruyama (EM),
// the random-order Strang splitting (NV), and Romberg extrapolation.
//
// Uniform consumption is step-major. Within a step:
//   NN: for i = 1..d, (S^i_1, S^i_2)      -> 2d coordinates
//   EM: for i = 1..d, dB^i                -> d coordinates
//   NV: Bernoulli sign, then eta^1..eta^d -> 1 + d coordinates

#include "weak/moment_match.hpp"
#include "weak/rk_integrator.hpp"
#include "weak/sampling.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace weak {

/// dY = V_0(Y) dt + sum_i V_i(Y) o dB^i, with an independently supplied Ito drift for EM.
class SDEModel {
 public:
  virtual ~SDEModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t brownian_dim() const = 0;

  /// V_i(y) for i = 0..d (Stratonovich form).
  virtual void stratonovich_field(std::size_t i, std::span<const double> y, std::span<double> out) const = 0;
  /// Ito drift; V_1..V_d double as the Ito diffusion columns.
  virtual void ito_drift(std::span<const double> y, std::span<double> out) const = 0;

  /// sum_i weights[i] * V_i(y), weights indexed 0..d.
  virtual void combined_field(std::span<const double> weights, std::span<const double> y,
                              std::span<double> out) const;

  /// True when a post-step state has left the model's domain (counted, not fatal).
  virtual bool outside_domain(std::span<const double>) const { return false; }
};

enum class SchemeKind { nn, em, nv };

SchemeKind parse_scheme_kind(const std::string& text);
std::string to_string(SchemeKind kind);

/// Uniform coordinates per step: 2d (NN), d (EM), 1 + d (NV).
std::size_t uniforms_per_step(SchemeKind kind, std::size_t d);

/// rk5-butcher for plain runs, rk7-butcher under Romberg extrapolation.
std::string default_tableau(bool romberg);

/// Per-thread scratch for the step functions.
struct StepWorkspace {
  RkWorkspace rk;
  std::vector<double> weights;
  std::vector<double> field;
  std::vector<double> gaussians;
};

/// y <- g(W_1)(g(W_2)(y)), W_j = s c_j V_0 + sqrt(s) sum_i S^i_j V_i.
/// `gaussians` holds (S^1_1, S^1_2, ..., S^d_1, S^d_2), already correlated.
void nn_step(const SDEModel& model, const SchemeParams<double>& params, const IntegrationScheme& rk,
             std::span<double> y, double s, std::span<const double> gaussians, StepWorkspace& ws);

/// y <- y + drift(y) s + sum_i V_i(y) dB^i with dB^i ~ N(0, s).
void em_step(const SDEModel& model, std::span<double> y, double s, std::span<const double> increments,
             StepWorkspace& ws);

/// y <- exp(s/2 V_0) o [exp(sqrt(s) eta^i V_i) in ascending i if bernoulli = +1, else descending]
///      o exp(s/2 V_0) (y), each flow approximated by `rk`.
void nv_step(const SDEModel& model, const IntegrationScheme& rk, std::span<double> y, double s, int bernoulli,
             std::span<const double> eta, StepWorkspace& ws);

/// (2^p e_2n - e_n) / (2^p - 1).
double romberg(double estimate_n, double estimate_2n, int p);

/// Romberg exponent matched to the scheme's weak order: 2 for NN and NV, 1 for EM.
int weak_order(SchemeKind kind);

/// Everything needed to run one discretised path.
class PathPlan {
 public:
  PathPlan(SchemeKind kind, int n, double T, SchemeParams<double> params, std::optional<IntegrationScheme> rk);

  SchemeKind kind() const noexcept { return kind_; }
  int steps() const noexcept { return n_; }
  double horizon() const noexcept { return T_; }
  const SchemeParams<double>& params() const noexcept { return params_; }
  const std::optional<IntegrationScheme>& rk() const noexcept { return rk_; }

  std::size_t dimension(std::size_t d) const { return uniforms_per_step(kind_, d) * static_cast<std::size_t>(n_); }

  /// Runs n steps from the state already in `y`, consuming exactly dimension(d) uniforms.
  /// Returns the number of steps whose post-step state left the model's domain.
  std::uint64_t run(const SDEModel& model, std::span<double> y, std::span<const double> uniforms,
                    StepWorkspace& ws) const;

 private:
  SchemeKind kind_;
  int n_;
  double T_;
  SchemeParams<double> params_;
  std::optional<PairCorrelator> correlator_;
  std::optional<IntegrationScheme> rk_;
};

/// E[payoff(Y_T)] as an integral over the unit cube, optionally Romberg-combined:
/// coordinates [0, dim(2n)) drive the 2n-step path, the rest the n-step path.
class SchemeIntegrand : public Integrand {
 public:
  using Payoff = std::function<double(std::span<const double>)>;

  SchemeIntegrand(const SDEModel& model, std::vector<double> x0, PathPlan plan, Payoff payoff,
                  std::optional<PathPlan> coarse = std::nullopt);

  std::size_t dimension() const override { return dimension_; }
  double operator()(std::span<const double> u) const override;

  std::uint64_t guard_events() const noexcept { return guard_events_.load(); }
  std::uint64_t steps_taken() const noexcept { return steps_taken_.load(); }

 private:
  const SDEModel* model_;
  std::vector<double> x0_;
  PathPlan plan_;
  std::optional<PathPlan> coarse_;
  Payoff payoff_;
  std::size_t dimension_;
  mutable std::atomic<std::uint64_t> guard_events_{0};
  mutable std::atomic<std::uint64_t> steps_taken_{0};
};

}  // namespace weak
