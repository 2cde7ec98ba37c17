#pragma once

// Heston stochastic volatility with an Asian payoff: the state (y1, y2, y3) carries
// the price, the variance and the running integral of the price.

#include "weak/sampling.hpp"
#include "weak/schemes.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace weak {

struct HestonParams {
  double mu = 0.05;
  double alpha = 2.0;
  double beta = 0.1;
  double theta = 0.09;
  double rho = 0.0;
  double x1 = 1.0;
  double x2 = 0.09;
  double T = 1.0;
  double K = 1.05;

  /// Throws ConfigurationError on non-positive parameters, |rho| > 1 or a violated
  /// Feller condition 2 alpha theta - beta^2 > 0.
  void validate() const;
  std::vector<double> initial_state() const { return {x1, x2, 0.0}; }
};

/// Asian call price for the default parameters.
inline constexpr double kHestonReferencePrice = 6.0473534496e-2;

class HestonModel : public SDEModel {
 public:
  explicit HestonModel(const HestonParams& params);

  std::size_t state_dim() const override { return 3; }
  std::size_t brownian_dim() const override { return 2; }
  void stratonovich_field(std::size_t i, std::span<const double> y, std::span<double> out) const override;
  void ito_drift(std::span<const double> y, std::span<double> out) const override;
  void combined_field(std::span<const double> weights, std::span<const double> y,
                      std::span<double> out) const override;
  /// Negative variance.
  bool outside_domain(std::span<const double> y) const override { return y[1] < 0.0; }

  const HestonParams& params() const noexcept { return p_; }

 private:
  HestonParams p_;
  double drift1_shift_;  // rho beta / 4
  double drift2_shift_;  // beta^2 / 4
  double v2_scale_;      // beta sqrt(1 - rho^2)
};

/// max(y3 / T - K, 0); undiscounted.
double asian_payoff(std::span<const double> y, const HestonParams& params);

struct PriceConfig {
  SchemeKind scheme = SchemeKind::nn;
  int n = 10;
  /// Extrapolate from n and 2n steps.
  bool romberg = false;
  EstimatorMode mode = EstimatorMode::qmc;
  std::uint64_t samples = 200000;
  std::uint64_t seed = 20070901;
  std::uint64_t skip = 0;
  unsigned workers = 0;
  SchemeParams<double> params = solution_params<double>(0.75, Branch::lower);
  /// Builtin name or JSON file; empty selects default_tableau(romberg).
  std::string tableau;
};

struct PriceResult {
  PriceConfig config;
  std::size_t dimension = 0;
  EstimatorReport report;
  std::uint64_t guard_events = 0;
  std::uint64_t steps = 0;
};

/// Looks `name` up among the builtin tableaus, otherwise loads it as a JSON file.
IntegrationScheme resolve_tableau(const std::string& name);

PriceResult price(const HestonParams& heston, const PriceConfig& config, std::optional<double> reference);

struct StudyConfig {
  HestonParams heston;
  std::optional<double> reference;
  std::string sweep;  // "discretization" or "integration"
  std::vector<PriceConfig> cells;
};

/// Parses a convergence-study JSON document (see configs/default.json).
std::vector<StudyConfig> parse_study_config(const std::string& json_text);
std::vector<StudyConfig> load_study_config(const std::string& path);

struct StudyRow {
  std::string sweep;
  PriceResult result;
};

std::vector<StudyRow> convergence_study(const std::vector<StudyConfig>& sweeps);

/// CSV layout: sweep,scheme,n,romberg,mode,M,estimate,error,guard_events[,seconds].
void write_csv_header(std::ostream& out, bool timings);
void write_csv_row(std::ostream& out, const std::string& sweep, const PriceResult& r, bool timings);

}  // namespace weak
