#pragma once

// Numerical search for Gaussian splittings that match exp(v0 + 1/2 sum v_i^2) to
// degree m with M exponentials. A best residual well away from zero is evidence
// (not proof) that no such splitting exists.

#include "weak/moment_match.hpp"

#include <cstdint>

namespace weak {

struct MomentSearchOptions {
  int m = 7;
  std::size_t M = 3;
  int d = 2;
  int starts = 40;
  int max_iterations = 400;
  std::uint64_t seed = 20070901;
};

struct MomentSearchResult {
  /// Euclidean norm of the residual vector over all even-parity words with ||w|| <= m.
  double best_residual_norm = 0.0;
  GaussianFamily<double> best_family;
  int starts_run = 0;
};

/// Multi-start Levenberg-Marquardt over c (summing to one) and R = L L^T.
MomentSearchResult minimize_moment_residuals(const MomentSearchOptions& options);

/// Residual norm of a given family, evaluated with the same fast kernel as the search.
double residual_norm(const GaussianFamily<double>& family, int m, int d);

}  // namespace weak
