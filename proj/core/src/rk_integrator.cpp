#include "weak/rk_integrator.hpp"

#include <utility>

namespace weak {

namespace {

struct Entry {
  std::size_t i, j;  // 1-based
  const char* value;
};

ButcherTableau make_tableau(std::string name, std::size_t stages, int order, std::initializer_list<Entry> a,
                            std::initializer_list<const char*> b) {
  ButcherTableau t;
  t.name = std::move(name);
  t.stages = stages;
  t.declared_order = order;
  t.A.assign(stages, std::vector<Rational>(stages, Rational(0)));
  for (const Entry& e : a) t.A[e.i - 1][e.j - 1] = parse_rational(e.value);
  for (const char* v : b) t.b.push_back(parse_rational(v));
  t.validate_explicit();
  return t;
}

ButcherTableau rk5_butcher() {
  return make_tableau("rk5-butcher", 6, 5,
                      {{2, 1, "2/5"},
                       {3, 1, "11/64"}, {3, 2, "5/64"},
                       {4, 3, "1/2"},
                       {5, 1, "3/64"}, {5, 2, "-15/64"}, {5, 3, "3/8"}, {5, 4, "9/16"},
                       {6, 2, "5/7"}, {6, 3, "6/7"}, {6, 4, "-12/7"}, {6, 5, "8/7"}},
                      {"7/90", "0", "32/90", "12/90", "32/90", "7/90"});
}

ButcherTableau rk7_butcher() {
  return make_tableau("rk7-butcher", 9, 7,
                      {{2, 1, "1/6"},
                       {3, 2, "1/3"},
                       {4, 1, "1/8"}, {4, 3, "3/8"},
                       {5, 1, "148/1331"}, {5, 3, "150/1331"}, {5, 4, "-56/1331"},
                       {6, 1, "-404/243"}, {6, 3, "-170/27"}, {6, 4, "4024/1701"}, {6, 5, "10648/1701"},
                       {7, 1, "2466/2401"}, {7, 3, "1242/343"}, {7, 4, "-19176/16807"},
                       {7, 5, "-51909/16807"}, {7, 6, "1053/2401"},
                       {8, 1, "5/154"}, {8, 4, "96/539"}, {8, 5, "-1815/20384"}, {8, 6, "-405/2464"},
                       {8, 7, "49/1144"},
                       {9, 1, "-113/32"}, {9, 3, "-195/22"}, {9, 4, "32/7"}, {9, 5, "29403/3584"},
                       {9, 6, "-729/512"}, {9, 7, "1029/1408"}, {9, 8, "21/16"}},
                      // b6 and b9 are fixed by the quadrature conditions; 243/1560 and 11/70
                      // would break sum b = 1.
                      {"0", "0", "0", "32/105", "1771561/6289920", "243/2560", "16807/74880", "77/1440",
                       "11/270"});
}

}  // namespace

ButcherTableau builtin_tableau(std::string_view name) {
  if (name == "rk5-butcher") return rk5_butcher();
  if (name == "rk7-butcher") return rk7_butcher();
  throw ConfigurationError("unknown tableau '" + std::string(name) + "' (known: rk5-butcher, rk7-butcher)");
}

std::vector<std::string> builtin_tableau_names() { return {"rk5-butcher", "rk7-butcher"}; }

IntegrationScheme::IntegrationScheme(ButcherTableau tableau, int order)
    : tableau_(std::move(tableau)), order_(order) {
  const std::size_t K = tableau_.stages;
  a_.resize(K * K);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) a_[i * K + j] = tableau_.A[i][j].get_d();
  }
  for (const Rational& b : tableau_.b) b_.push_back(b.get_d());
}

IntegrationScheme IntegrationScheme::certified(ButcherTableau tableau, int order) {
  const OrderReport report = check_order(tableau, order);
  if (!report.all_pass()) {
    throw ConfigurationError("tableau '" + tableau.name + "' fails " + std::to_string(report.failures()) +
                             " order-" + std::to_string(order) + " conditions");
  }
  return IntegrationScheme(std::move(tableau), order);
}

IntegrationScheme IntegrationScheme::builtin(std::string_view name) {
  ButcherTableau t = builtin_tableau(name);
  const int order = t.declared_order;
  return certified(std::move(t), order);
}

std::vector<double> rk_step(const IntegrationScheme& scheme, const VectorField& field, std::span<const double> y0,
                            double s, int substeps) {
  if (field.dimension != y0.size()) throw ConfigurationError("rk_step: state and field dimensions differ");
  if (substeps < 1) throw ConfigurationError("rk_step: substeps must be positive");
  std::vector<double> y(y0.begin(), y0.end());
  RkWorkspace ws;
  const double h = s / substeps;
  for (int k = 0; k < substeps; ++k) scheme.step(field, std::span<double>(y), h, ws);
  return y;
}

}  // namespace weak
