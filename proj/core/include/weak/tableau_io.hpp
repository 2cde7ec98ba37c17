#pragma once

// JSON layout for Butcher tableaus, with entries as rational strings:
//
//   {"name": "rk5-butcher", "order": 5,
//    "A": [["0", "0", ...], ["2/5", "0", ...], ...],
//    "b": ["7/90", "0", ...]}

#include "weak/rk_trees.hpp"

#include <string>

namespace weak {

ButcherTableau parse_tableau_json(const std::string& text);
ButcherTableau load_tableau_file(const std::string& path);
std::string tableau_to_json(const ButcherTableau& tableau);

}  // namespace weak
