#include "weak/heston.hpp"

#include "weak/errors.hpp"
#include "weak/tableau_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace weak {

void HestonParams::validate() const {
  for (const auto& [name, v] : {std::pair{"mu", mu}, {"alpha", alpha}, {"beta", beta}, {"theta", theta},
                                {"x1", x1}, {"x2", x2}, {"T", T}, {"K", K}}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigurationError(std::string("Heston ") + name + " must be positive");
  }
  if (!(std::abs(rho) <= 1.0)) throw ConfigurationError("Heston rho must lie in [-1, 1]");
  if (!(2.0 * alpha * theta - beta * beta > 0.0)) {
    throw ConfigurationError("Heston parameters violate the Feller condition 2 alpha theta - beta^2 > 0");
  }
}

HestonModel::HestonModel(const HestonParams& params) : p_(params) {
  p_.validate();
  drift1_shift_ = p_.rho * p_.beta / 4.0;
  drift2_shift_ = p_.beta * p_.beta / 4.0;
  v2_scale_ = p_.beta * std::sqrt(1.0 - p_.rho * p_.rho);
}

void HestonModel::stratonovich_field(std::size_t i, std::span<const double> y, std::span<double> out) const {
  const double sq = std::sqrt(std::max(y[1], 0.0));
  switch (i) {
    case 0:
      out[0] = y[0] * (p_.mu - y[1] / 2.0 - drift1_shift_);
      out[1] = p_.alpha * (p_.theta - y[1]) - drift2_shift_;
      out[2] = y[0];
      return;
    case 1:
      out[0] = y[0] * sq;
      out[1] = p_.rho * p_.beta * sq;
      out[2] = 0.0;
      return;
    case 2:
      out[0] = 0.0;
      out[1] = v2_scale_ * sq;
      out[2] = 0.0;
      return;
    default:
      throw ConfigurationError("Heston model has fields V_0..V_2 only");
  }
}

void HestonModel::ito_drift(std::span<const double> y, std::span<double> out) const {
  out[0] = p_.mu * y[0];
  out[1] = p_.alpha * (p_.theta - y[1]);
  out[2] = y[0];
}

void HestonModel::combined_field(std::span<const double> w, std::span<const double> y,
                                 std::span<double> out) const {
  const double sq = std::sqrt(std::max(y[1], 0.0));
  out[0] = w[0] * y[0] * (p_.mu - y[1] / 2.0 - drift1_shift_) + w[1] * y[0] * sq;
  out[1] = w[0] * (p_.alpha * (p_.theta - y[1]) - drift2_shift_) + (w[1] * p_.rho * p_.beta + w[2] * v2_scale_) * sq;
  out[2] = w[0] * y[0];
}

double asian_payoff(std::span<const double> y, const HestonParams& params) {
  return std::max(y[2] / params.T - params.K, 0.0);
}

IntegrationScheme resolve_tableau(const std::string& name) {
  const auto names = builtin_tableau_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) return IntegrationScheme::builtin(name);
  ButcherTableau t = load_tableau_file(name);
  const int order = t.declared_order;
  return IntegrationScheme::certified(std::move(t), order);
}

PriceResult price(const HestonParams& heston, const PriceConfig& config, std::optional<double> reference) {
  const HestonModel model(heston);
  std::optional<IntegrationScheme> rk;
  if (config.scheme != SchemeKind::em) {
    rk = resolve_tableau(config.tableau.empty() ? default_tableau(config.romberg) : config.tableau);
  }
  const int fine_n = config.romberg ? 2 * config.n : config.n;
  PathPlan fine(config.scheme, fine_n, heston.T, config.params, rk);
  std::optional<PathPlan> coarse;
  if (config.romberg) coarse.emplace(config.scheme, config.n, heston.T, config.params, rk);

  const SchemeIntegrand integrand(
      model, heston.initial_state(), std::move(fine),
      [heston](std::span<const double> y) { return asian_payoff(y, heston); }, std::move(coarse));

  const UniformSource source = config.mode == EstimatorMode::qmc
                                   ? UniformSource::sobol(integrand.dimension(), config.skip)
                                   : UniformSource::pseudo_random(integrand.dimension(), config.seed);
  EstimateOptions options;
  options.mode = config.mode;
  options.samples = config.samples;
  options.reference = reference;
  options.workers = config.workers;

  PriceResult result;
  result.config = config;
  result.dimension = integrand.dimension();
  result.report = estimate(integrand, source, options);
  result.guard_events = integrand.guard_events();
  result.steps = integrand.steps_taken();
  return result;
}

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigurationError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigurationError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
std::vector<T> scalar_or_list(const json& j, const std::string& where) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(e.get<T>());
  } else {
    out.push_back(j.get<T>());
  }
  if (out.empty()) throw ConfigurationError(where + " must not be empty");
  return out;
}

double number_or_rational(const json& j) {
  if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
  return j.get<double>();
}

}  // namespace

std::vector<StudyConfig> parse_study_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("invalid study config: ") + e.what());
  }
  try {
    check_keys(doc, {"model", "reference", "seed", "skip", "workers", "scheme_params", "sweeps"}, "study config");

    HestonParams heston;
    if (doc.contains("model")) {
      const json& m = doc["model"];
      check_keys(m, {"mu", "alpha", "beta", "theta", "rho", "x1", "x2", "T", "K"}, "model");
      heston.mu = m.value("mu", heston.mu);
      heston.alpha = m.value("alpha", heston.alpha);
      heston.beta = m.value("beta", heston.beta);
      heston.theta = m.value("theta", heston.theta);
      heston.rho = m.value("rho", heston.rho);
      heston.x1 = m.value("x1", heston.x1);
      heston.x2 = m.value("x2", heston.x2);
      heston.T = m.value("T", heston.T);
      heston.K = m.value("K", heston.K);
    }
    heston.validate();

    PriceConfig base;
    base.seed = doc.value("seed", base.seed);
    base.skip = doc.value("skip", base.skip);
    base.workers = doc.value("workers", base.workers);
    if (doc.contains("scheme_params")) {
      const json& sp = doc["scheme_params"];
      check_keys(sp, {"u", "branch"}, "scheme_params");
      const double u = sp.contains("u") ? number_or_rational(sp["u"]) : 0.75;
      const Branch branch = parse_branch(sp.value("branch", std::string("lower")));
      base.params = solution_params<double>(u, branch);
    }

    std::optional<double> reference;
    if (doc.contains("reference") && !doc["reference"].is_null()) reference = doc["reference"].get<double>();

    std::vector<StudyConfig> sweeps;
    if (!doc.contains("sweeps") || !doc["sweeps"].is_array()) {
      throw ConfigurationError("study config needs a 'sweeps' array");
    }
    for (const json& s : doc["sweeps"]) {
      check_keys(s, {"name", "mode", "M", "runs"}, "sweep");
      StudyConfig study;
      study.heston = heston;
      study.reference = reference;
      study.sweep = s.at("name").get<std::string>();
      const EstimatorMode mode = parse_estimator_mode(s.value("mode", std::string("qmc")));
      const auto Ms = scalar_or_list<std::uint64_t>(s.at("M"), "sweep M");
      for (const json& r : s.at("runs")) {
        check_keys(r, {"scheme", "n", "romberg", "tableau", "mode"}, "run");
        PriceConfig cell = base;
        cell.scheme = parse_scheme_kind(r.at("scheme").get<std::string>());
        cell.romberg = r.value("romberg", false);
        cell.tableau = r.value("tableau", std::string());
        cell.mode = r.contains("mode") ? parse_estimator_mode(r["mode"].get<std::string>()) : mode;
        for (int n : scalar_or_list<int>(r.at("n"), "run n")) {
          for (std::uint64_t M : Ms) {
            cell.n = n;
            cell.samples = M;
            study.cells.push_back(cell);
          }
        }
      }
      sweeps.push_back(std::move(study));
    }
    return sweeps;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("invalid study config: ") + e.what());
  }
}

std::vector<StudyConfig> load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open study config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_study_config(buf.str());
}

std::vector<StudyRow> convergence_study(const std::vector<StudyConfig>& sweeps) {
  std::vector<StudyRow> rows;
  for (const StudyConfig& study : sweeps) {
    for (const PriceConfig& cell : study.cells) rows.push_back({study.sweep, price(study.heston, cell, study.reference)});
  }
  return rows;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& out, bool timings) {
  out << "sweep,scheme,n,romberg,mode,M,estimate,error,guard_events";
  if (timings) out << ",seconds";
  out << '\n';
}

void write_csv_row(std::ostream& out, const std::string& sweep, const PriceResult& r, bool timings) {
  const PriceConfig& c = r.config;
  out << sweep << ',' << to_string(c.scheme) << ',' << c.n << ',' << (c.romberg ? 1 : 0) << ',' << to_string(c.mode)
      << ',' << r.report.samples << ',' << format_double(r.report.estimate) << ','
      << (r.report.error ? format_double(*r.report.error) : std::string()) << ',' << r.guard_events;
  if (timings) out << ',' << format_double(r.report.seconds);
  out << '\n';
}

}  // namespace weak
