#include "weak/errors.hpp"
#include "weak/heston.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

weak::PriceConfig config(weak::SchemeKind scheme, int n, std::uint64_t samples) {
  weak::PriceConfig c;
  c.scheme = scheme;
  c.n = n;
  c.samples = samples;
  return c;
}

std::string csv(const weak::PriceResult& r) {
  std::ostringstream out;
  weak::write_csv_row(out, "t", r, false);
  return out.str();
}

}  // namespace

TEST(HestonParams, DefaultsAndValidation) {
  const weak::HestonParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.initial_state(), (std::vector<double>{1.0, 0.09, 0.0}));
  weak::HestonParams bad = p;
  bad.beta = 0.7;  // 2 * 2 * 0.09 = 0.36 < 0.49
  EXPECT_THROW(bad.validate(), weak::ConfigurationError);
  EXPECT_THROW(weak::HestonModel{bad}, weak::ConfigurationError);
  bad = p;
  bad.rho = 1.5;
  EXPECT_THROW(bad.validate(), weak::ConfigurationError);
  bad = p;
  bad.T = 0.0;
  EXPECT_THROW(bad.validate(), weak::ConfigurationError);
}

TEST(HestonModel, FieldsAtDefaults) {
  const weak::HestonModel m{weak::HestonParams{}};
  const std::vector<double> y{1.2, 0.04, 0.3};
  std::vector<double> v(3);
  m.stratonovich_field(0, y, v);
  EXPECT_NEAR(v[0], 1.2 * (0.05 - 0.02), 1e-15);
  EXPECT_NEAR(v[1], 2.0 * (0.09 - 0.04) - 0.0025, 1e-15);
  EXPECT_EQ(v[2], 1.2);
  m.stratonovich_field(1, y, v);
  EXPECT_NEAR(v[0], 1.2 * 0.2, 1e-15);
  EXPECT_EQ(v[1], 0.0);
  m.stratonovich_field(2, y, v);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_NEAR(v[1], 0.1 * 0.2, 1e-15);
  EXPECT_EQ(v[2], 0.0);
  m.ito_drift(y, v);
  EXPECT_NEAR(v[0], 0.05 * 1.2, 1e-15);
  EXPECT_NEAR(v[1], 2.0 * 0.05, 1e-15);
  EXPECT_EQ(v[2], 1.2);
  EXPECT_THROW(m.stratonovich_field(3, y, v), weak::ConfigurationError);
}

TEST(HestonModel, CorrelatedFieldsAndCombination) {
  weak::HestonParams p;
  p.rho = -0.6;
  const weak::HestonModel m{p};
  const std::vector<double> y{0.9, 0.16, 0.0};
  std::vector<double> v0(3), v1(3), v2(3), sum(3);
  m.stratonovich_field(0, y, v0);
  m.stratonovich_field(1, y, v1);
  m.stratonovich_field(2, y, v2);
  EXPECT_NEAR(v0[0], 0.9 * (0.05 - 0.08 + 0.6 * 0.1 / 4), 1e-15);
  EXPECT_NEAR(v1[1], -0.6 * 0.1 * 0.4, 1e-15);
  EXPECT_NEAR(v2[1], 0.1 * std::sqrt(1 - 0.36) * 0.4, 1e-15);
  const std::vector<double> w{0.3, -1.1, 0.7};
  m.combined_field(w, y, sum);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(sum[c], 0.3 * v0[c] - 1.1 * v1[c] + 0.7 * v2[c], 1e-15);
}

TEST(HestonModel, NegativeVarianceIsGuarded) {
  const weak::HestonModel m{weak::HestonParams{}};
  std::vector<double> v(3);
  m.stratonovich_field(1, std::vector<double>{1.0, -0.01, 0.0}, v);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_TRUE(m.outside_domain(std::vector<double>{1.0, -1e-9, 0.0}));
  EXPECT_FALSE(m.outside_domain(std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(AsianPayoff, Values) {
  const weak::HestonParams p;
  EXPECT_EQ(weak::asian_payoff(std::vector<double>{1.0, 0.1, 1.05}, p), 0.0);
  EXPECT_NEAR(weak::asian_payoff(std::vector<double>{1.0, 0.1, 1.15}, p), 0.10, 1e-15);
  EXPECT_EQ(weak::asian_payoff(std::vector<double>{1.0, 0.1, 0.5}, p), 0.0);
}

TEST(Price, SanityAndGuardRate) {
  for (auto scheme : {weak::SchemeKind::nn, weak::SchemeKind::nv, weak::SchemeKind::em}) {
    const auto r = weak::price(weak::HestonParams{}, config(scheme, 4, 20000), weak::kHestonReferencePrice);
    EXPECT_GT(r.report.estimate, 0.0);
    EXPECT_LT(r.report.estimate, 1.0);
    EXPECT_LT(static_cast<double>(r.guard_events), 1e-4 * static_cast<double>(r.steps));
    EXPECT_EQ(r.steps, 4u * 20000u);
  }
}

TEST(Price, DimensionsFollowTheScheme) {
  EXPECT_EQ(weak::price(weak::HestonParams{}, config(weak::SchemeKind::nn, 3, 100), std::nullopt).dimension, 12u);
  EXPECT_EQ(weak::price(weak::HestonParams{}, config(weak::SchemeKind::em, 3, 100), std::nullopt).dimension, 6u);
  EXPECT_EQ(weak::price(weak::HestonParams{}, config(weak::SchemeKind::nv, 3, 100), std::nullopt).dimension, 9u);
  auto c = config(weak::SchemeKind::nn, 2, 100);
  c.romberg = true;
  EXPECT_EQ(weak::price(weak::HestonParams{}, c, std::nullopt).dimension, 24u);
  c.scheme = weak::SchemeKind::em;
  c.n = 8;
  EXPECT_EQ(weak::price(weak::HestonParams{}, c, std::nullopt).dimension, 16u + 32u);
}

TEST(Price, CsvIsIndependentOfWorkers) {
  auto c = config(weak::SchemeKind::nn, 3, 30000);
  c.workers = 1;
  const auto a = weak::price(weak::HestonParams{}, c, weak::kHestonReferencePrice);
  c.workers = 4;
  const auto b = weak::price(weak::HestonParams{}, c, weak::kHestonReferencePrice);
  EXPECT_EQ(csv(a), csv(b));
  c.mode = weak::EstimatorMode::mc;
  c.workers = 1;
  const auto d = weak::price(weak::HestonParams{}, c, std::nullopt);
  c.workers = 3;
  EXPECT_EQ(csv(d), csv(weak::price(weak::HestonParams{}, c, std::nullopt)));
}

TEST(Price, ItoAndStratonovichFormsAgree) {
  auto em = config(weak::SchemeKind::em, 4096, 20000);
  em.mode = weak::EstimatorMode::mc;
  auto nn = config(weak::SchemeKind::nn, 8, 200000);
  nn.mode = weak::EstimatorMode::mc;
  nn.seed = 77;
  const auto a = weak::price(weak::HestonParams{}, em, std::nullopt);
  const auto b = weak::price(weak::HestonParams{}, nn, std::nullopt);
  EXPECT_LE(std::abs(a.report.estimate - b.report.estimate), *a.report.error + *b.report.error);
}

TEST(Price, UnknownTableauIsAConfigurationError) {
  auto c = config(weak::SchemeKind::nn, 1, 100);
  c.tableau = "/nonexistent/tableau.json";
  EXPECT_THROW(weak::price(weak::HestonParams{}, c, std::nullopt), weak::ConfigurationError);
}

TEST(Csv, HeaderAndRowLayout) {
  std::ostringstream h;
  weak::write_csv_header(h, false);
  EXPECT_EQ(h.str(), "sweep,scheme,n,romberg,mode,M,estimate,error,guard_events\n");
  std::ostringstream ht;
  weak::write_csv_header(ht, true);
  EXPECT_EQ(ht.str(), "sweep,scheme,n,romberg,mode,M,estimate,error,guard_events,seconds\n");

  weak::PriceResult r;
  r.config = config(weak::SchemeKind::em, 16, 1000);
  r.config.romberg = true;
  r.report.samples = 1000;
  r.report.estimate = 0.0625;
  EXPECT_EQ(csv(r), "t,em,16,1,qmc,1000,6.250000000000e-02,,0\n");
  r.report.error = 0.5;
  EXPECT_EQ(csv(r), "t,em,16,1,qmc,1000,6.250000000000e-02,5.000000000000e-01,0\n");
}

TEST(StudyConfig, DefaultFileParses) {
  const auto sweeps = weak::load_study_config(std::string(WEAK_TEST_CONFIG_DIR) + "/default.json");
  ASSERT_EQ(sweeps.size(), 2u);
  EXPECT_EQ(sweeps[0].sweep, "discretization");
  EXPECT_EQ(sweeps[1].sweep, "integration");
  ASSERT_TRUE(sweeps[0].reference.has_value());
  EXPECT_EQ(*sweeps[0].reference, weak::kHestonReferencePrice);
  EXPECT_FALSE(sweeps[0].cells.empty());
  EXPECT_EQ(sweeps[1].cells.size(), 8u);
}

TEST(StudyConfig, CartesianProductAndOverrides) {
  const auto sweeps = weak::parse_study_config(R"({
    "seed": 5, "skip": 3, "workers": 2,
    "model": {"beta": 0.2},
    "scheme_params": {"u": "3/4", "branch": "upper"},
    "sweeps": [{"name": "s", "mode": "mc", "M": [10, 20],
                "runs": [{"scheme": "nv", "n": [1, 2, 3]}, {"scheme": "em", "n": 4, "mode": "qmc", "romberg": true}]}]})");
  ASSERT_EQ(sweeps.size(), 1u);
  const auto& cells = sweeps[0].cells;
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[0].scheme, weak::SchemeKind::nv);
  EXPECT_EQ(cells[0].mode, weak::EstimatorMode::mc);
  EXPECT_EQ(cells[1].samples, 20u);
  EXPECT_EQ(cells[7].scheme, weak::SchemeKind::em);
  EXPECT_TRUE(cells[7].romberg);
  EXPECT_EQ(cells[7].mode, weak::EstimatorMode::qmc);
  EXPECT_EQ(cells[0].seed, 5u);
  EXPECT_EQ(cells[0].skip, 3u);
  EXPECT_EQ(cells[0].workers, 2u);
  EXPECT_EQ(cells[0].params.branch, weak::Branch::upper);
  EXPECT_EQ(sweeps[0].heston.beta, 0.2);
  EXPECT_FALSE(sweeps[0].reference.has_value());
}

TEST(StudyConfig, Errors) {
  EXPECT_THROW(weak::parse_study_config("{"), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_study_config(R"({"sweeps": [], "typo": 1})"), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_study_config(R"({"model": {"beta": 1.0}, "sweeps": []})"), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_study_config(R"({"sweeps": [{"name": "a", "M": 10, "runs": [{"scheme": "x", "n": 1}]}]})"),
               weak::ConfigurationError);
  EXPECT_THROW(weak::parse_study_config(R"({"sweeps": [{"name": "a", "M": [], "runs": []}]})"),
               weak::ConfigurationError);
  EXPECT_THROW(weak::parse_study_config(R"({"sweeps": [{"name": "a", "runs": []}]})"), weak::ConfigurationError);
  EXPECT_THROW(weak::load_study_config("/nonexistent.json"), weak::ConfigurationError);
}

TEST(Study, RunsEveryCell) {
  const auto sweeps = weak::parse_study_config(R"({"reference": 0.06,
    "sweeps": [{"name": "quick", "M": 2000, "runs": [{"scheme": "nn", "n": [1, 2]}]}]})");
  const auto rows = weak::convergence_study(sweeps);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].sweep, "quick");
  EXPECT_EQ(rows[1].result.config.n, 2);
  ASSERT_TRUE(rows[0].result.report.error.has_value());
}
