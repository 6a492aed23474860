#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vmcoal/cli.hpp"

using namespace vmcoal;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("invert prints the minimal root and its region") {
    const CliRun r = run({"invert", "--V", "1", "--z", "2"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "0.4063757"));
    CHECK(contains(r.out, "region=Exterior"));
    CHECK(contains(r.out, "method:"));
}

TEST_CASE("trees reports the exact count for integer weights") {
    const CliRun r = run({"trees", "--x", "2:2", "--V", "0,1;1,0"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "T = 4"));
    CHECK(contains(r.out, "cofactor"));
    CHECK(contains(r.out, "brute-force"));
}

TEST_CASE("gelation prints the critical time") {
    const CliRun r = run({"gelation", "--V", "0,1;1,0", "--alpha", "1,1"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "T_gel = 1.0"));
}

TEST_CASE("zeta evaluates the closed form on a grid") {
    const CliRun r =
        run({"zeta", "--V", "1", "--alpha", "1", "--x", "2", "--t-grid", "0.5,1.0"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "zeta_2(0.5"));
}

TEST_CASE("usage errors exit with 64") {
    CHECK(run({"invert", "--no-such-flag"}).code == 64);
    CHECK(run({"not-a-command"}).code == 64);
    CHECK(run({}).code == 64);
    CHECK(run({"invert", "--format", "xml"}).code == 64);
    const CliRun r = run({"invert", "--bogus"});
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("help exits cleanly") {
    const CliRun top = run({"--help"});
    CHECK(top.code == 0);
    CHECK(contains(top.out, "invert"));
    const CliRun sub = run({"invert", "--help"});
    CHECK(sub.code == 0);
    CHECK(contains(sub.out, "--z"));
}

TEST_CASE("domain violations exit with 2") {
    // Asymmetric weight matrix.
    CHECK(run({"invert", "--V", "0,1;2,0", "--z", "1,1"}).code == 2);
    // Second moments at the divergence time.
    const CliRun r = run({"moments", "--V", "1", "--alpha", "1", "--t", "1.0"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "validation error"));
    // Missing required inputs.
    CHECK(run({"invert", "--z", "2"}).code == 2);
    CHECK(run({"trees", "--V", "1"}).code == 2);
}

TEST_CASE("config files feed inputs and flags override them") {
    TempFile cfg("cli_test_cfg.json");
    {
        std::ofstream os(cfg.path);
        os << R"({"V": [[1.0]], "z": [2.0], "alpha": [1.0]})";
    }
    const CliRun from_cfg = run({"invert", "--config", cfg.path});
    CHECK(from_cfg.code == 0);
    CHECK(contains(from_cfg.out, "0.4063757"));

    // Inline --z beats the config value.
    const CliRun overridden = run({"invert", "--config", cfg.path, "--z", "0.5"});
    CHECK(overridden.code == 0);
    CHECK(contains(overridden.out, "region=Interior"));

    CHECK(run({"invert", "--config", "no_such_file.json"}).code == 2);

    TempFile bad("cli_test_bad.json");
    {
        std::ofstream os(bad.path);
        os << "{not json";
    }
    CHECK(run({"invert", "--config", bad.path, "--z", "2"}).code == 2);
}

TEST_CASE("csv artifacts carry headers and exact values") {
    TempFile outfile("cli_test_trees.csv");
    const CliRun r = run({"trees", "--x", "2:2", "--V", "0,1;1,0", "--out", outfile.path});
    CHECK(r.code == 0);
    const std::string body = slurp(outfile.path);
    CHECK(contains(body, "method,value,log_value\r\n"));
    CHECK(contains(body, "cofactor,4,"));
}

TEST_CASE("json artifacts parse and agree with the text output") {
    TempFile outfile("cli_test_gel.json");
    const CliRun r = run({"gelation", "--V", "1", "--alpha", "1", "--out", outfile.path,
                          "--format", "json"});
    CHECK(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(outfile.path));
    CHECK(j.at("t_gel").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("simulate artifacts are reproducible for a fixed seed") {
    TempFile f1("cli_test_sim1.csv"), f2("cli_test_sim2.csv");
    const std::vector<std::string> base{"simulate", "--V",     "1",   "--alpha", "1",
                                        "--n",      "200",     "--t-max", "0.4",
                                        "--t-grid", "0.2,0.4", "--seed",  "17"};
    auto with_out = [&](const std::string& p) {
        std::vector<std::string> a = base;
        a.push_back("--out");
        a.push_back(p);
        return a;
    };
    const CliRun r1 = run(with_out(f1.path));
    const CliRun r2 = run(with_out(f2.path));
    CHECK(r1.code == 0);
    CHECK(r2.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(slurp(f1.path) == slurp(f2.path));
    CHECK(contains(slurp(f1.path), "t,composition,count\r\n"));

    std::vector<std::string> reseeded = with_out(f1.path);
    reseeded[reseeded.size() - 3] = "18";  // replace the seed value
    REQUIRE(reseeded[reseeded.size() - 4] == "--seed");
    const CliRun r3 = run(reseeded);
    CHECK(r3.code == 0);
    CHECK(r3.out != r1.out);
}

TEST_CASE("mst series subcommand reports the partial sum") {
    const CliRun r = run({"mst-series", "--V", "1", "--alpha", "1", "--n-max", "60"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "partial_sum = 1.20"));
}

TEST_CASE("curve subcommand walks the time grid") {
    TempFile outfile("cli_test_curve.csv");
    const CliRun r = run({"curve", "--V", "1", "--alpha", "1", "--t-grid", "0.5,2.0", "--out",
                          outfile.path});
    CHECK(r.code == 0);
    const std::string body = slurp(outfile.path);
    CHECK(contains(body, "t,y1\r\n"));
    CHECK(contains(r.out, "0.4063757"));
}
