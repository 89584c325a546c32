#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string err;
};

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("qf_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Run run(const fs::path& dir, const std::string& args)
{
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + QF_CLI + "\" --quiet --out \"" + dir.string() + "\" " + args + " 2> \"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

} // namespace

TEST_CASE("verify commands exit zero and write reports")
{
    const fs::path d = scratch("verify");
    CHECK(run(d, "verify partition").code == 0);
    CHECK(run(d, "verify realness").code == 0);
    const auto j = load(d / "verify_partition.json");
    CHECK(j["command"] == "verify partition");
    CHECK(j.contains("timestamp"));
    CHECK(j["config"]["n"] == 1);
}

TEST_CASE("reports are deterministic apart from the timestamp")
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run(a, "--format both --seed 7 norm reference").code == 0);
    REQUIRE(run(b, "--format both --seed 7 norm reference").code == 0);
    auto ja = load(a / "norm_reference.json"), jb = load(b / "norm_reference.json");
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja == jb);
    CHECK(slurp(a / "norm_reference.csv") == slurp(b / "norm_reference.csv"));
    CHECK(ja["seed"] == 7);
}

TEST_CASE("configuration errors")
{
    const fs::path d = scratch("config");
    std::ofstream(d / "bad.json") << R"({"n": 1, "foo": 2})";
    const Run r = run(d, "--config \"" + (d / "bad.json").string() + "\" verify partition");
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown config key config.foo") != std::string::npos);

    std::ofstream(d / "gap.json") << R"({"space": {"family": "F", "s": 0.1, "p": 0.5, "q": 0.5}})";
    const Run g = run(d, "--config \"" + (d / "gap.json").string() + "\" frame-ratio");
    CHECK(g.code == 1);
    CHECK(g.err.find("hypothesis") != std::string::npos);

    CHECK(run(d, "no-such-command").code != 0);
    CHECK(run(d, "--config \"" + (d / "missing.json").string() + "\" verify partition").code == 1);
}

TEST_CASE("analyze then synthesize")
{
    const fs::path d = scratch("pipe");
    std::ofstream(d / "cfg.json") << R"({"corpus": {"count": 1, "seed": 4}})";
    const std::string cfg = "--config \"" + (d / "cfg.json").string() + "\" ";
    REQUIRE(run(d, cfg + "analyze").code == 0);
    fs::path coeffs;
    for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".jsonl") coeffs = e.path();
    REQUIRE(!coeffs.empty());
    CHECK(run(d, cfg + "synthesize --input \"" + coeffs.string() + "\"").code == 0);
    CHECK(fs::exists(d / "synthesize.qfld"));
    CHECK(fs::file_size(d / "synthesize.qfld") > 4096 * 16);
}

TEST_CASE("domain commands")
{
    const fs::path d = scratch("domain");
    REQUIRE(run(d, "domain whitney").code == 0);
    const auto j = load(d / "domain_whitney.json");
    CHECK(j["rows"].size() == 16);
    CHECK(run(d, "domain partition").code == 0);
}
