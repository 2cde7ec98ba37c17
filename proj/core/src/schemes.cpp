#include "weak/schemes.hpp"

#include "weak/errors.hpp"

#include <cmath>

namespace weak {

void SDEModel::combined_field(std::span<const double> weights, std::span<const double> y,
                              std::span<double> out) const {
  const std::size_t N = state_dim();
  std::vector<double> tmp(N);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    stratonovich_field(i, y, tmp);
    for (std::size_t c = 0; c < N; ++c) out[c] += weights[i] * tmp[c];
  }
}

SchemeKind parse_scheme_kind(const std::string& text) {
  if (text == "nn") return SchemeKind::nn;
  if (text == "em") return SchemeKind::em;
  if (text == "nv") return SchemeKind::nv;
  throw ConfigurationError("unknown scheme '" + text + "' (expected nn, em or nv)");
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::nn: return "nn";
    case SchemeKind::em: return "em";
    case SchemeKind::nv: return "nv";
  }
  return "?";
}

std::size_t uniforms_per_step(SchemeKind kind, std::size_t d) {
  switch (kind) {
    case SchemeKind::nn: return 2 * d;
    case SchemeKind::em: return d;
    case SchemeKind::nv: return 1 + d;
  }
  return 0;
}

std::string default_tableau(bool romberg) { return romberg ? "rk7-butcher" : "rk5-butcher"; }

int weak_order(SchemeKind kind) { return kind == SchemeKind::em ? 1 : 2; }

namespace {

// One Runge-Kutta step of the time-1 flow of sum_i weights[i] V_i.
void flow(const SDEModel& model, const IntegrationScheme& rk, std::span<double> y, StepWorkspace& ws) {
  const std::span<const double> weights(ws.weights);
  rk.step([&](std::span<const double> x, std::span<double> out) { model.combined_field(weights, x, out); }, y, 1.0,
          ws.rk);
}

}  // namespace

void nn_step(const SDEModel& model, const SchemeParams<double>& params, const IntegrationScheme& rk,
             std::span<double> y, double s, std::span<const double> gaussians, StepWorkspace& ws) {
  const std::size_t d = model.brownian_dim();
  if (gaussians.size() != 2 * d) throw ConfigurationError("nn_step: expected 2d Gaussians");
  if (s == 0.0) return;
  const double rs = std::sqrt(s);
  ws.weights.assign(d + 1, 0.0);
  for (int j = 1; j >= 0; --j) {  // Z_2's flow first
    ws.weights[0] = s * (j == 0 ? params.c1 : params.c2);
    for (std::size_t i = 0; i < d; ++i) ws.weights[i + 1] = rs * gaussians[2 * i + static_cast<std::size_t>(j)];
    flow(model, rk, y, ws);
  }
}

void em_step(const SDEModel& model, std::span<double> y, double s, std::span<const double> increments,
             StepWorkspace& ws) {
  const std::size_t N = model.state_dim();
  const std::size_t d = model.brownian_dim();
  if (increments.size() != d) throw ConfigurationError("em_step: expected d increments");
  ws.field.resize(2 * N);
  std::span<double> drift(ws.field.data(), N);
  std::span<double> column(ws.field.data() + N, N);
  model.ito_drift(y, drift);
  for (std::size_t c = 0; c < N; ++c) drift[c] *= s;
  for (std::size_t i = 0; i < d; ++i) {
    if (increments[i] == 0.0) continue;
    model.stratonovich_field(i + 1, y, column);
    for (std::size_t c = 0; c < N; ++c) drift[c] += column[c] * increments[i];
  }
  for (std::size_t c = 0; c < N; ++c) y[c] += drift[c];
}

void nv_step(const SDEModel& model, const IntegrationScheme& rk, std::span<double> y, double s, int bernoulli,
             std::span<const double> eta, StepWorkspace& ws) {
  const std::size_t d = model.brownian_dim();
  if (eta.size() != d) throw ConfigurationError("nv_step: expected d Gaussians");
  if (bernoulli != 1 && bernoulli != -1) throw ConfigurationError("nv_step: bernoulli must be +1 or -1");
  if (s == 0.0) return;
  const double rs = std::sqrt(s);
  ws.weights.assign(d + 1, 0.0);
  ws.weights[0] = 0.5 * s;
  flow(model, rk, y, ws);
  ws.weights[0] = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t i = bernoulli == 1 ? k : d - 1 - k;
    ws.weights[i + 1] = rs * eta[i];
    flow(model, rk, y, ws);
    ws.weights[i + 1] = 0.0;
  }
  ws.weights[0] = 0.5 * s;
  flow(model, rk, y, ws);
}

double romberg(double estimate_n, double estimate_2n, int p) {
  if (p < 1) throw ConfigurationError("romberg: p must be at least 1");
  const double w = std::ldexp(1.0, p);
  return (w * estimate_2n - estimate_n) / (w - 1.0);
}

PathPlan::PathPlan(SchemeKind kind, int n, double T, SchemeParams<double> params,
                   std::optional<IntegrationScheme> rk)
    : kind_(kind), n_(n), T_(T), params_(std::move(params)), rk_(std::move(rk)) {
  if (n < 1) throw ConfigurationError("path plan: n must be at least 1");
  if (!(T > 0.0)) throw ConfigurationError("path plan: horizon must be positive");
  if (kind != SchemeKind::em && !rk_) throw ConfigurationError("path plan: " + to_string(kind) + " needs a Runge-Kutta scheme");
  if (kind == SchemeKind::nn) {
    params_.validate();
    correlator_.emplace(params_.R11, params_.R12, params_.R22);
  }
}

std::uint64_t PathPlan::run(const SDEModel& model, std::span<double> y, std::span<const double> uniforms,
                            StepWorkspace& ws) const {
  const std::size_t d = model.brownian_dim();
  const std::size_t per_step = uniforms_per_step(kind_, d);
  if (uniforms.size() != per_step * static_cast<std::size_t>(n_)) {
    throw ConfigurationError("run_path: expected " + std::to_string(per_step * static_cast<std::size_t>(n_)) +
                             " uniforms, got " + std::to_string(uniforms.size()));
  }
  if (y.size() != model.state_dim()) throw ConfigurationError("run_path: state dimension mismatch");
  const double s = T_ / n_;
  const double rs = std::sqrt(s);
  std::uint64_t guard = 0;
  ws.gaussians.resize(per_step);
  for (int k = 0; k < n_; ++k) {
    const std::span<const double> u = uniforms.subspan(static_cast<std::size_t>(k) * per_step, per_step);
    try {
      switch (kind_) {
        case SchemeKind::nn:
          for (std::size_t i = 0; i < d; ++i) {
            const auto [a, b] = (*correlator_)(inv_normal_cdf(u[2 * i]), inv_normal_cdf(u[2 * i + 1]));
            ws.gaussians[2 * i] = a;
            ws.gaussians[2 * i + 1] = b;
          }
          nn_step(model, params_, *rk_, y, s, ws.gaussians, ws);
          break;
        case SchemeKind::em:
          for (std::size_t i = 0; i < d; ++i) ws.gaussians[i] = rs * inv_normal_cdf(u[i]);
          em_step(model, y, s, std::span<const double>(ws.gaussians.data(), d), ws);
          break;
        case SchemeKind::nv:
          for (std::size_t i = 0; i < d; ++i) ws.gaussians[i] = inv_normal_cdf(u[1 + i]);
          nv_step(model, *rk_, y, s, u[0] < 0.5 ? 1 : -1, std::span<const double>(ws.gaussians.data(), d), ws);
          break;
      }
    } catch (const IntegrationFailure& e) {
      throw IntegrationFailure(e.stage(), "step " + std::to_string(k + 1) + ": " + e.what());
    }
    if (model.outside_domain(y)) ++guard;
  }
  return guard;
}

SchemeIntegrand::SchemeIntegrand(const SDEModel& model, std::vector<double> x0, PathPlan plan, Payoff payoff,
                                 std::optional<PathPlan> coarse)
    : model_(&model), x0_(std::move(x0)), plan_(std::move(plan)), coarse_(std::move(coarse)),
      payoff_(std::move(payoff)) {
  if (x0_.size() != model.state_dim()) throw ConfigurationError("initial state dimension mismatch");
  const std::size_t d = model.brownian_dim();
  dimension_ = plan_.dimension(d);
  if (coarse_) {
    if (coarse_->kind() != plan_.kind() || 2 * coarse_->steps() != plan_.steps()) {
      throw ConfigurationError("Romberg pair must use the same scheme with n and 2n steps");
    }
    dimension_ += coarse_->dimension(d);
  }
}

double SchemeIntegrand::operator()(std::span<const double> u) const {
  thread_local StepWorkspace ws;
  thread_local std::vector<double> y;
  const std::size_t d = model_->brownian_dim();
  const std::size_t fine_dim = plan_.dimension(d);

  y = x0_;
  std::uint64_t guard = plan_.run(*model_, y, u.first(fine_dim), ws);
  std::uint64_t steps = static_cast<std::uint64_t>(plan_.steps());
  double value = payoff_(y);
  if (coarse_) {
    y = x0_;
    guard += coarse_->run(*model_, y, u.subspan(fine_dim), ws);
    steps += static_cast<std::uint64_t>(coarse_->steps());
    value = romberg(payoff_(y), value, weak_order(plan_.kind()));
  }
  if (guard) guard_events_.fetch_add(guard, std::memory_order_relaxed);
  steps_taken_.fetch_add(steps, std::memory_order_relaxed);
  return value;
}

}  // namespace weak
