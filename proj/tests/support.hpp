#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

namespace eiskit::testing {

inline nlohmann::json golden(const std::string& name) {
    std::ifstream in(std::string(EISKIT_GOLDEN_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing golden file " + name);
    return nlohmann::json::parse(in);
}

inline std::string golden_path(const std::string& name) { return std::string(EISKIT_GOLDEN_DIR) + "/" + name; }

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace eiskit::testing
