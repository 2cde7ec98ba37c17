#include "weak/tableau_io.hpp"

#include "weak/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace weak {

namespace {

Rational entry(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ConfigurationError("tableau entries must be rational strings such as \"11/64\"");
}

}  // namespace

ButcherTableau parse_tableau_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigurationError(std::string("tableau JSON: ") + e.what());
  }
  if (!doc.contains("A") || !doc.contains("b")) throw ConfigurationError("tableau JSON needs 'A' and 'b'");
  ButcherTableau t;
  t.name = doc.value("name", std::string("custom"));
  t.declared_order = doc.value("order", 0);
  for (const auto& b : doc.at("b")) t.b.push_back(entry(b));
  t.stages = t.b.size();
  for (const auto& row : doc.at("A")) {
    std::vector<Rational> r;
    for (const auto& a : row) r.push_back(entry(a));
    t.A.push_back(std::move(r));
  }
  t.validate_explicit();
  return t;
}

ButcherTableau load_tableau_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open tableau file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tableau_json(ss.str());
}

std::string tableau_to_json(const ButcherTableau& tableau) {
  nlohmann::json doc;
  doc["name"] = tableau.name;
  doc["order"] = tableau.declared_order;
  nlohmann::json A = nlohmann::json::array();
  for (const auto& row : tableau.A) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& a : row) r.push_back(to_string(a));
    A.push_back(r);
  }
  doc["A"] = A;
  nlohmann::json b = nlohmann::json::array();
  for (const auto& v : tableau.b) b.push_back(to_string(v));
  doc["b"] = b;
  return doc.dump(2);
}

}  // namespace weak
