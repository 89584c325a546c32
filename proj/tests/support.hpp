#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"
#include "qf/grid.hpp"

namespace qft {

inline const nlohmann::json& oracles()
{
    static const nlohmann::json j = [] {
        std::ifstream is(std::string(QF_GOLDEN_DIR) + "/oracles.json");
        return nlohmann::json::parse(is);
    }();
    return j;
}

inline double gauss(const qf::Point& x, int n, double c = 0.0, double w = 1.0)
{
    double r2 = (x[0] - c) * (x[0] - c);
    if (n == 2) r2 += (x[1] - c) * (x[1] - c);
    return std::exp(-r2 / (2.0 * w * w));
}

inline double rel_l2(const qf::ComplexField& a, const qf::ComplexField& b)
{
    return (a.values() - b.values()).norm() / b.values().norm();
}

} // namespace qft
