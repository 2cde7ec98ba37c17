#include "weak/errors.hpp"
#include "weak/moment_search.hpp"

#include <gtest/gtest.h>

#include <cmath>

TEST(MomentSearch, KernelAgreesWithExactResiduals) {
  weak::GaussianFamily<double> f;
  f.c = {0.2, 0.5, 0.3};
  f.R = weak::GaussianSpec<double>(3, {1.0, 0.2, -0.1, 0.2, 0.8, 0.3, -0.1, 0.3, 0.6});
  double sq = 0.0;
  for (const auto& [w, r] : weak::moment_residuals(f, 7, 2)) sq += r * r;
  EXPECT_NEAR(weak::residual_norm(f, 7, 2), std::sqrt(sq), 1e-12);
}

TEST(MomentSearch, SolutionFamilyHasZeroNorm) {
  EXPECT_LT(weak::residual_norm(weak::solution_params<double>(0.75, weak::Branch::lower).family(), 5, 2), 1e-14);
}

TEST(MomentSearch, FindsAnExactSplittingWhenOneExists) {
  weak::MomentSearchOptions o;
  o.m = 5;
  o.M = 2;
  o.starts = 10;
  const auto r = weak::minimize_moment_residuals(o);
  EXPECT_LT(r.best_residual_norm, 1e-8);
  EXPECT_EQ(r.starts_run, 10);
  EXPECT_NEAR(r.best_family.c[0] + r.best_family.c[1], 1.0, 1e-12);
}

TEST(MomentSearch, SingleExponentialCannotReachDegreeFive) {
  weak::MomentSearchOptions o;
  o.m = 5;
  o.M = 1;
  o.starts = 20;
  EXPECT_GT(weak::minimize_moment_residuals(o).best_residual_norm, 0.01);
}

TEST(MomentSearch, IsDeterministic) {
  weak::MomentSearchOptions o;
  o.m = 5;
  o.M = 1;
  o.starts = 3;
  EXPECT_EQ(weak::minimize_moment_residuals(o).best_residual_norm, weak::minimize_moment_residuals(o).best_residual_norm);
}

TEST(MomentSearch, RejectsBadOptions) {
  weak::MomentSearchOptions o;
  o.M = 0;
  EXPECT_THROW(weak::minimize_moment_residuals(o), weak::ConfigurationError);
}
