#include "qf/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace qf {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    require(j.is_object(), ErrorKind::Config, where + " must be an object");
    for (const auto& [key, _] : j.items())
        require(allowed.count(key) > 0, ErrorKind::Config, "unknown config key " + where + "." + key);
}

// exponents may be given as the string "inf"
double exponent(const json& v, const std::string& name)
{
    if (v.is_string()) {
        require(v.get<std::string>() == "inf", ErrorKind::Config, name + " must be a number or \"inf\"");
        return std::numeric_limits<double>::infinity();
    }
    require(v.is_number(), ErrorKind::Config, name + " must be a number");
    return v.get<double>();
}

json exponent_json(double v)
{
    if (std::isinf(v)) return "inf";
    return v;
}

template <class T>
T number(const json& j, const std::string& key, T fallback)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    require(v.is_number(), ErrorKind::Config, "config key " + key + " must be a number");
    if constexpr (std::is_integral_v<T>) {
        require(v.is_number_integer(), ErrorKind::Config, "config key " + key + " must be an integer");
    }
    return v.get<T>();
}

} // namespace

RunConfig RunConfig::defaults(int n)
{
    RunConfig c;
    c.n = n;
    if (n == 2) {
        c.grid_exp = 9;
        c.box = 32.0;
        c.domain.kind = "square";
        c.domain.params = json::array({0.0, 1.0});
        c.domain.J_max = 4;
    }
    return c;
}

RunConfig RunConfig::from_json(const json& j)
{
    only_keys(j, {"n", "grid_exp", "box", "beta_max", "j_max", "kappa", "M_max", "space", "corpus", "domain"},
              "config");
    RunConfig c = defaults(number(j, "n", 1));
    c.grid_exp = number(j, "grid_exp", c.grid_exp);
    c.box = number(j, "box", c.box);
    c.beta_max = number(j, "beta_max", c.beta_max);
    c.j_max = number(j, "j_max", c.j_max);
    c.kappa = number(j, "kappa", c.kappa);
    c.M_max = number(j, "M_max", c.M_max);
    require(c.n == 1 || c.n == 2, ErrorKind::Config, "n must be 1 or 2");
    require(c.grid_exp >= 6 && c.grid_exp <= 16, ErrorKind::Config, "grid_exp must lie in [6, 16]");
    require(c.beta_max >= 0, ErrorKind::Config, "beta_max must be nonnegative");
    require(c.M_max > 0, ErrorKind::Config, "M_max must be positive");
    if (j.contains("space")) {
        const json& s = j.at("space");
        only_keys(s, {"family", "s", "p", "q", "delta"}, "space");
        if (s.contains("family")) {
            const std::string f = s.at("family").get<std::string>();
            require(f == "B" || f == "F", ErrorKind::Config, "space.family must be B or F");
            c.space.family = f == "B" ? Family::B : Family::F;
        }
        c.space.s = number(s, "s", c.space.s);
        if (s.contains("p")) c.space.p = exponent(s.at("p"), "space.p");
        if (s.contains("q")) c.space.q = exponent(s.at("q"), "space.q");
        c.space.delta = number(s, "delta", c.space.delta);
    }
    c.space.kappa = c.kappa;
    if (j.contains("corpus")) {
        const json& s = j.at("corpus");
        only_keys(s, {"kind", "count", "seed"}, "corpus");
        if (s.contains("kind")) c.corpus.kind = s.at("kind").get<std::string>();
        require(c.corpus.kind == "gaussian" || c.corpus.kind == "boundary" || c.corpus.kind == "zero",
                ErrorKind::Config, "corpus.kind must be gaussian, boundary or zero");
        c.corpus.count = number(s, "count", c.corpus.count);
        c.corpus.seed = number(s, "seed", c.corpus.seed);
    }
    if (j.contains("domain")) {
        const json& s = j.at("domain");
        only_keys(s, {"kind", "params", "K", "J_max"}, "domain");
        if (s.contains("kind")) c.domain.kind = s.at("kind").get<std::string>();
        if (s.contains("params")) c.domain.params = s.at("params");
        c.domain.K = number(s, "K", c.domain.K);
        c.domain.J_max = number(s, "J_max", c.domain.J_max);
    }
    c.space.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path)
{
    std::ifstream is(path);
    require(bool(is), ErrorKind::Io, "cannot open config " + path);
    json j;
    try {
        j = json::parse(is, nullptr, true, true);
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, "config " + path + " does not parse: " + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("config has a value of the wrong type: ") + e.what());
    }
}

nlohmann::ordered_json RunConfig::to_json() const
{
    nlohmann::ordered_json j;
    j["n"] = n;
    j["grid_exp"] = grid_exp;
    j["box"] = box;
    j["beta_max"] = beta_max;
    j["j_max"] = levels();
    j["kappa"] = kappa;
    j["M_max"] = M_max;
    j["space"] = {{"family", space.family == Family::B ? "B" : "F"},
                  {"s", space.s},
                  {"p", exponent_json(space.p)},
                  {"q", exponent_json(space.q)},
                  {"delta", space.delta}};
    j["corpus"] = {{"kind", corpus.kind}, {"count", corpus.count}, {"seed", corpus.seed}};
    j["domain"] = {{"kind", domain.kind}, {"params", domain.params}, {"K", domain.K}, {"J_max", domain.J_max}};
    return j;
}

GridSpec RunConfig::grid() const { return GridSpec::make(n, 1 << grid_exp, box); }

SystemConfig RunConfig::system() const
{
    SystemConfig s;
    s.beta_max = beta_max;
    s.j_max = j_max;
    s.M_max = M_max;
    s.kappa = kappa;
    return s;
}

DomainSpec RunConfig::domain_spec() const { return DomainSpec::from_json(n, domain.kind, domain.params); }

int RunConfig::levels() const { return j_max >= 0 ? j_max : grid().max_level(); }

} // namespace qf
