#pragma once

#include "json.hpp"

#include <fstream>
#include <string>

namespace fsm::test {

// Frozen values from fixtures/v1/oracle.py.
inline const nlohmann::json& oracle() {
  static const nlohmann::json j = [] {
    std::ifstream in(std::string(FSM_FIXTURE_DIR) + "/oracle.json");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace fsm::test
