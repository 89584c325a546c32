#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "qf/domain.hpp"
#include "qf/littlewood_paley.hpp"
#include "qf/quark_system.hpp"

namespace qf {

struct CorpusConfig {
    std::string kind = "gaussian";  // gaussian | boundary | zero
    std::size_t count = 20;
    std::uint64_t seed = 1;
};

struct DomainConfig {
    std::string kind = "interval";
    nlohmann::json params = nlohmann::json::array({0.0, 1.0});
    int K = 2;
    int J_max = 6;
};

// declarative run description; every key is optional, unknown keys are rejected
struct RunConfig {
    int n = 1;
    int grid_exp = 12;
    double box = 64.0;
    int beta_max = 4;
    int j_max = -1;  // < 0: grid limit
    double kappa = 0.0;
    int M_max = 384;
    SpaceSpec space{Family::B, 1.2, 2.0, 2.0, 0.0, 0.0};
    CorpusConfig corpus;
    DomainConfig domain;

    static RunConfig defaults(int n);
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
    nlohmann::ordered_json to_json() const;

    GridSpec grid() const;
    SystemConfig system() const;
    DomainSpec domain_spec() const;
    // resolved level count: j_max or the grid limit
    int levels() const;
};

} // namespace qf
