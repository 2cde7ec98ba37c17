// weakapprox: moment and order verification, Heston pricing and convergence studies.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.

#include "weak/errors.hpp"
#include "weak/heston.hpp"
#include "weak/moment_match.hpp"
#include "weak/rk_integrator.hpp"
#include "weak/rk_trees.hpp"
#include "weak/tableau_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kUsage = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes to --output when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw weak::ConfigurationError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct MomentArgs {
  std::string u = "3/4";
  std::string branch = "lower";
  int m = 5;
  int d = 2;
  std::vector<std::string> perturb;
  std::string output;
};

template <class Scalar>
void apply_perturbations(weak::GaussianFamily<Scalar>& f, const std::vector<std::string>& perturb) {
  for (const std::string& p : perturb) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw weak::ConfigurationError("perturbation '" + p + "' is not NAME=DELTA");
    const std::string name = p.substr(0, eq);
    const Scalar delta = weak::scalar_cast<Scalar>(weak::parse_rational(p.substr(eq + 1)));
    if (name == "c1") {
      f.c[0] += delta;
    } else if (name == "c2") {
      f.c[1] += delta;
    } else if (name == "R11") {
      f.R.covariance[0] += delta;
    } else if (name == "R22") {
      f.R.covariance[3] += delta;
    } else if (name == "R12") {
      f.R.covariance[1] += delta;
      f.R.covariance[2] += delta;
    } else {
      throw weak::ConfigurationError("unknown parameter '" + name + "' (expected c1, c2, R11, R12 or R22)");
    }
  }
  if (!f.R.is_positive_semidefinite()) throw weak::ConfigurationError("perturbed covariance is not PSD");
}

template <class Scalar>
int report_moments(const weak::SchemeParams<Scalar>& params, const MomentArgs& a, bool exact) {
  weak::GaussianFamily<Scalar> family = params.family();
  apply_perturbations(family, a.perturb);
  const auto rows = weak::residual_table(family, a.m, a.d);

  Output out(a.output);
  out.stream() << "word,coefficient,target,residual\n";
  std::size_t failures = 0;
  for (const auto& r : rows) {
    bool bad;
    if constexpr (std::is_same_v<Scalar, weak::Rational>) {
      bad = !weak::is_zero(r.residual);
      out.stream() << r.word.to_string() << ',' << weak::to_string(r.coefficient) << ',' << weak::to_string(r.target)
                   << ',' << weak::to_string(r.residual) << '\n';
    } else {
      bad = std::abs(r.residual) > 1e-12;
      out.stream() << r.word.to_string() << ',' << fmt(r.coefficient) << ',' << weak::to_string(r.target) << ','
                   << fmt(r.residual) << '\n';
    }
    if (bad) {
      ++failures;
      std::cerr << "  residual in " << r.word.to_string() << '\n';
    }
  }
  std::cerr << "verify-moments: u=" << a.u << " branch=" << a.branch << " m=" << a.m << " d=" << a.d << " ("
            << (exact ? "exact rational" : "double, tolerance 1e-12") << "): " << rows.size() << " words, "
            << failures << " nonzero residuals\n";
  return failures == 0 ? kOk : kVerificationFailed;
}

int cmd_verify_moments(const MomentArgs& a) {
  const weak::Rational u = weak::parse_rational(a.u);
  const weak::Branch branch = weak::parse_branch(a.branch);
  if (u < weak::Rational(1, 2)) throw weak::DomainError("u must be at least 1/2");
  if (a.m < 1 || a.d < 1) throw weak::ConfigurationError("--m and --d must be positive");
  try {
    return report_moments(weak::solution_params<weak::Rational>(u, branch), a, true);
  } catch (const weak::DomainError&) {
    // sqrt(2(2u - 1)) is irrational: fall back to floating point.
    return report_moments(weak::solution_params<double>(weak::to_double(u), branch), a, false);
  }
}

struct RkArgs {
  std::string tableau = "rk5-butcher";
  int order = 5;
  std::string output;
};

int cmd_verify_rk(const RkArgs& a) {
  const auto names = weak::builtin_tableau_names();
  const weak::ButcherTableau t = std::find(names.begin(), names.end(), a.tableau) != names.end()
                                     ? weak::builtin_tableau(a.tableau)
                                     : weak::load_tableau_file(a.tableau);
  if (a.order < 1) throw weak::ConfigurationError("--order must be positive");
  const weak::OrderReport report = weak::check_order(t, a.order);
  Output out(a.output);
  out.stream() << "tree,order,lhs,rhs,pass\n";
  for (const auto& row : report.rows) {
    out.stream() << row.tree.to_string() << ',' << row.tree.order() << ',' << weak::to_string(row.lhs) << ','
                 << weak::to_string(row.rhs) << ',' << (row.pass ? 1 : 0) << '\n';
  }
  std::cerr << "verify-rk-order: " << t.name << " (" << t.stages << " stages) at order " << a.order << ": "
            << report.rows.size() << " conditions, " << report.failures() << " failed\n";
  return report.all_pass() ? kOk : kVerificationFailed;
}

struct PriceArgs {
  std::string scheme = "nn";
  int n = 10;
  bool romberg = false;
  std::string mode = "qmc";
  std::uint64_t samples = 200000;
  std::uint64_t seed = 20070901;
  std::uint64_t skip = 0;
  unsigned workers = 0;
  std::string u = "3/4";
  std::string branch = "lower";
  std::string tableau;
  bool timings = false;
  std::string output;
};

void describe(const weak::PriceResult& r, const std::optional<double>& reference) {
  const auto& c = r.config;
  std::fprintf(stderr, "%-6s n=%-4d%s %-3s M=%-9llu dim=%-4zu estimate=%.10f", weak::to_string(c.scheme).c_str(), c.n,
               c.romberg ? "+R" : "  ", weak::to_string(c.mode).c_str(), static_cast<unsigned long long>(c.samples),
               r.dimension, r.report.estimate);
  if (r.report.error) std::fprintf(stderr, " error=%.3e", *r.report.error);
  if (reference) std::fprintf(stderr, " (reference %.10f)", *reference);
  std::fprintf(stderr, " guard=%llu/%llu %.2fs\n", static_cast<unsigned long long>(r.guard_events),
               static_cast<unsigned long long>(r.steps), r.report.seconds);
}

int cmd_price(const PriceArgs& a) {
  weak::PriceConfig c;
  c.scheme = weak::parse_scheme_kind(a.scheme);
  c.n = a.n;
  c.romberg = a.romberg;
  c.mode = weak::parse_estimator_mode(a.mode);
  c.samples = a.samples;
  c.seed = a.seed;
  c.skip = a.skip;
  c.workers = a.workers;
  c.params = weak::solution_params<double>(weak::to_double(weak::parse_rational(a.u)), weak::parse_branch(a.branch));
  c.tableau = a.tableau;
  const weak::HestonParams heston;
  const std::optional<double> reference = weak::kHestonReferencePrice;
  const weak::PriceResult r = weak::price(heston, c, reference);
  Output out(a.output);
  weak::write_csv_header(out.stream(), a.timings);
  weak::write_csv_row(out.stream(), "price", r, a.timings);
  describe(r, reference);
  return kOk;
}

struct ConvergeArgs {
  std::string config;
  std::optional<unsigned> workers;
  bool timings = false;
  std::string output;
};

int cmd_converge(const ConvergeArgs& a) {
  auto sweeps = weak::load_study_config(a.config);
  if (a.workers) {
    for (auto& s : sweeps) {
      for (auto& c : s.cells) c.workers = *a.workers;
    }
  }
  Output out(a.output);
  weak::write_csv_header(out.stream(), a.timings);
  for (const auto& s : sweeps) {
    for (const auto& c : s.cells) {
      const weak::PriceResult r = weak::price(s.heston, c, s.reference);
      weak::write_csv_row(out.stream(), s.sweep, r, a.timings);
      out.stream().flush();
      describe(r, s.reference);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak approximation of SDEs: scheme verification and Heston benchmarks"};
  app.require_subcommand(1);

  MomentArgs moments;
  auto* vm = app.add_subcommand("verify-moments", "Check the moment-matching conditions of the splitting scheme");
  vm->add_option("--u", moments.u, "Family parameter u >= 1/2 (rational or decimal)")->capture_default_str();
  vm->add_option("--branch", moments.branch, "Sign branch")
      ->check(CLI::IsMember({"upper", "lower"}))
      ->capture_default_str();
  vm->add_option("--m", moments.m, "Scaled degree")->capture_default_str();
  vm->add_option("--d", moments.d, "Brownian dimension")->capture_default_str();
  vm->add_option("--perturb", moments.perturb, "Shift a parameter, e.g. R12=+0.1 (repeatable)");
  vm->add_option("-o,--output", moments.output, "CSV destination (default stdout)");

  RkArgs rk;
  auto* vr = app.add_subcommand("verify-rk-order", "Check Runge-Kutta order conditions exactly");
  vr->add_option("--tableau", rk.tableau, "Builtin name (rk5-butcher, rk7-butcher) or JSON file")
      ->capture_default_str();
  vr->add_option("--order", rk.order, "Order to verify")->capture_default_str();
  vr->add_option("-o,--output", rk.output, "CSV destination (default stdout)");

  PriceArgs pr;
  auto* vp = app.add_subcommand("price", "Price the Heston Asian call");
  vp->add_option("--scheme", pr.scheme, "Scheme")->check(CLI::IsMember({"nn", "em", "nv"}))->capture_default_str();
  vp->add_option("--n", pr.n, "Time steps (the coarse count under --romberg)")->capture_default_str();
  vp->add_flag("--romberg", pr.romberg, "Extrapolate from n and 2n steps");
  vp->add_option("--mode", pr.mode, "Estimator")->check(CLI::IsMember({"mc", "qmc"}))->capture_default_str();
  vp->add_option("--samples", pr.samples, "Number of paths M")->capture_default_str();
  vp->add_option("--seed", pr.seed, "Pseudo-random seed (mc)")->capture_default_str();
  vp->add_option("--skip", pr.skip, "Sobol points to skip (qmc)")->capture_default_str();
  vp->add_option("--workers", pr.workers, "Worker threads (0 = all cores)")->capture_default_str();
  vp->add_option("--u", pr.u, "Splitting parameter u")->capture_default_str();
  vp->add_option("--branch", pr.branch, "Splitting sign branch")
      ->check(CLI::IsMember({"upper", "lower"}))
      ->capture_default_str();
  vp->add_option("--tableau", pr.tableau, "Runge-Kutta tableau (default rk5-butcher, rk7-butcher with --romberg)");
  vp->add_flag("--timings", pr.timings, "Append a wall-clock seconds column");
  vp->add_option("-o,--output", pr.output, "CSV destination (default stdout)");

  ConvergeArgs cv;
  auto* vc = app.add_subcommand("converge", "Run a convergence study from a JSON config");
  vc->add_option("--config", cv.config, "Study configuration")->required()->check(CLI::ExistingFile);
  vc->add_option("--workers", cv.workers, "Override the worker count");
  vc->add_flag("--timings", cv.timings, "Append a wall-clock seconds column");
  vc->add_option("-o,--output", cv.output, "CSV destination (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (vm->parsed()) return cmd_verify_moments(moments);
    if (vr->parsed()) return cmd_verify_rk(rk);
    if (vp->parsed()) return cmd_price(pr);
    if (vc->parsed()) return cmd_converge(cv);
  } catch (const weak::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const weak::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  return kUsage;
}
