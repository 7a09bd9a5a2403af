#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlyap/cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = mlyap::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("mlyap_cli_test_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("simulate table shape")
{
    const auto r = run({"simulate", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--seed", "42"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 10002);
    CHECK(rows[0].size() == 52);
    CHECK(rows[0].front() == "t");
    CHECK(rows[0].back() == "mean");
    CHECK(rows.back().size() == 52);
    CHECK(std::stod(rows.back()[0]) == doctest::Approx(10.0));
    CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("simulate deterministic recursion")
{
    const auto r = run({"simulate", "--lambda", "1", "--epsilon", "0", "--sigma", "0", "--dt", "0.01", "--steps", "5",
                        "--paths", "3"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 7);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double expected = static_cast<double>(k - 1) * std::log(1.01);
        REQUIRE(rows[k].size() == 5);
        for (std::size_t c = 1; c <= 3; ++c)
            CHECK(rows[k][c] == rows[k][1]);
        CHECK(std::stod(rows[k][1]) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(std::stod(rows[k][4]) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("outputs are reproducible across runs and thread counts")
{
    TempDir dir;
    std::vector<std::string> contents;
    for (const char* threads : {"1", "4", "8", "1"}) {
        const auto file = dir.path / (std::string("sim_") + threads + ".csv");
        const auto r = run({"simulate", "--lambda", "0.5", "--epsilon", "4", "--sigma", "8", "--steps", "2000",
                            "--paths", "20", "--seed", "3", "--threads", threads, "--out", file.string()});
        REQUIRE(r.code == 0);
        contents.push_back(slurp(file));
        CHECK(fs::exists(file.string() + ".meta.json"));
    }
    for (const auto& c : contents)
        CHECK(c == contents.front());

    std::vector<std::string> sweeps;
    for (const char* threads : {"1", "8"}) {
        const auto r = run({"sweep-dt", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--method", "as-mc",
                            "--samples", "200000", "--dts", "1e-2,1e-3,1e-4", "--threads", threads});
        REQUIRE(r.code == 0);
        sweeps.push_back(r.out);
    }
    CHECK(sweeps[0] == sweeps[1]);
}

TEST_CASE("exponent records")
{
    auto r = run({"exponent", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--method", "ms-exact"});
    REQUIRE(r.code == 0);
    auto doc = json::parse(r.out);
    CHECK(doc["method"] == "ms-exact");
    CHECK(doc["value"].get<double>() == doctest::Approx(17.793598421964811805).epsilon(1e-14));
    CHECK(doc["continuum_value"].get<double>() == 18.0);
    CHECK_FALSE(doc.contains("std_error"));
    CHECK(doc["config"]["lambda"] == 8.0);

    r = run({"exponent", "--lambda", "6", "--epsilon", "0.5", "--sigma", "4", "--dt", "1e-3"});
    REQUIRE(r.code == 0);
    doc = json::parse(r.out);
    CHECK(doc["method"] == "as-quadrature");
    CHECK(doc["value"].get<double>() == doctest::Approx(-1.7955495083582504183).epsilon(1e-11));
    CHECK(doc["region_class"] == "stable");

    r = run({"exponent", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--method", "as-mc", "--samples",
             "100000", "--seed", "1"});
    REQUIRE(r.code == 0);
    doc = json::parse(r.out);
    CHECK(doc.contains("std_error"));
    CHECK(doc["n_samples"] == 100000);

    r = run({"exponent", "--lambda", "6", "--epsilon", "0", "--sigma", "4", "--method", "theta-ms-exact", "--theta",
             "0.5", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"method", "dt", "value", "std_error", "continuum_value", "region_class"});
    CHECK(std::stod(rows[1][2]) == doctest::Approx(13.952275859359963927).epsilon(1e-13));
}

TEST_CASE("exponent estimator errors")
{
    const auto r = run({"exponent", "--lambda", "6", "--epsilon", "0.5", "--sigma", "4", "--dt", "0.5"});
    CHECK(r.code == 2);
    const auto doc = json::parse(r.out);
    CHECK(doc["error"]["kind"] == "precondition");
    CHECK(doc["error"]["message"].get<std::string>().find("gamma_dt") != std::string::npos);

    const auto conv = run({"exponent", "--lambda", "6", "--epsilon", "0.5", "--sigma", "4", "--dt", "0.1"});
    CHECK(conv.code == 2);
    CHECK(json::parse(conv.out)["error"]["kind"] == "convergence");
}

TEST_CASE("sweep-dt")
{
    TempDir dir;
    const auto file = dir.path / "sweep.csv";
    auto r = run({"sweep-dt", "--lambda", "6", "--epsilon", "0.5", "--sigma", "4", "--dts", "1e-2,1e-3,1e-4,1e-5",
                  "--out", file.string()});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(slurp(file));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"dt", "discrete_value", "continuum_value", "abs_error"});
    const auto fit = json::parse(slurp(file.string() + ".fit.json"));
    CHECK(fit["fit"]["order_p"].get<double>() >= 0.45);

    r = run({"sweep-dt", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--method", "ms-exact", "--dts",
             "1e-2,1e-3,1e-4,1e-5", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["fit"]["order_p"].get<double>() >= 0.9);
    CHECK(doc["fit"]["order_p"].get<double>() <= 1.1);
    CHECK(doc["rows"].size() == 4);

    // the default sweep starts at 0.1, where the quadrature fails; that row is marked
    r = run({"sweep-dt", "--lambda", "6", "--epsilon", "0.5", "--sigma", "4"});
    REQUIRE(r.code == 0);
    const auto def = parse_csv(r.out);
    REQUIRE(def.size() == 6);
    CHECK(def[1][0] == "0.1");
    CHECK(def[1][1] == "error");
    CHECK(def[1][3].empty());

    r = run({"sweep-dt", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--dts", "1e-3"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--dts") != std::string::npos);
}

TEST_CASE("region curves")
{
    auto r = run({"region", "--lambda", "0", "--sigma-range", "0:3:0.5"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == std::vector<std::string>{"sigma", "eps_plus", "eps_minus", "class_at_epsilon_0"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double sigma = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == sigma);
        CHECK(std::stod(rows[i][2]) == -sigma);
    }

    r = run({"region", "--lambda", "7", "--sigma-range", "0:3:0.25"});
    rows = parse_csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1].empty());
        CHECK(rows[i][2].empty());
        CHECK(rows[i][3] == "blow-up");
    }

    r = run({"region", "--lambda", "-2", "--sigma-range", "0:5:1"});
    rows = parse_csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double sigma = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == doctest::Approx(std::sqrt(sigma * sigma + 4.0)));
    }

    CHECK(run({"region", "--lambda", "1", "--sigma-range", "0:1:0"}).code == 2);
    CHECK(run({"region", "--lambda", "1"}).code == 2);
}

TEST_CASE("verify suites")
{
    CHECK(run({"verify", "--suite", "lemmas"}).code == 0);
    CHECK(run({"verify", "--suite", "moments", "--samples", "1000000", "--seed", "7"}).code == 0);
    const auto r = run({"verify", "--suite", "closedform", "--lambda", "8", "--epsilon", "2", "--sigma", "4",
                        "--format", "json"});
    CHECK(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["passed"] == true);
    CHECK(run({"verify", "--suite", "bogus"}).code == 2);
}

TEST_CASE("config file precedence")
{
    TempDir dir;
    const auto cfg = dir.path / "run.json";
    {
        std::ofstream f(cfg);
        f << R"({"lambda": 8, "epsilon": 2, "sigma": 4, "dt": 0.01, "method": "ms-exact", "sigma-range": "0:1:1"})";
    }
    auto r = run({"exponent", "--config", cfg.string()});
    REQUIRE(r.code == 0);
    auto doc = json::parse(r.out);
    CHECK(doc["dt"] == 0.01);
    CHECK(doc["config"]["lambda"] == 8.0);

    r = run({"exponent", "--config", cfg.string(), "--dt", "0.001", "--lambda", "6"});
    REQUIRE(r.code == 0);
    doc = json::parse(r.out);
    CHECK(doc["dt"] == 0.001);
    CHECK(doc["config"]["lambda"] == 6.0);
    CHECK(doc["config"]["sigma"] == 4.0);

    {
        std::ofstream f(cfg);
        f << R"({"lambda": 8, "colour": "blue"})";
    }
    r = run({"exponent", "--config", cfg.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("colour") != std::string::npos);

    {
        std::ofstream f(cfg);
        f << R"({"lambda": "eight"})";
    }
    CHECK(run({"exponent", "--config", cfg.string()}).code == 2);
    CHECK(run({"exponent", "--config", (dir.path / "missing.json").string()}).code == 2);
}

TEST_CASE("configuration errors exit with code 2")
{
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"exponent", "--lambda", "1", "--epsilon", "1"}).code == 2);
    CHECK(run({"exponent", "--lambda", "1", "--epsilon", "1", "--sigma", "1", "--method", "nope"}).code == 2);
    CHECK(run({"exponent", "--lambda", "1", "--epsilon", "1", "--sigma", "1", "--format", "xml"}).code == 2);
    CHECK(run({"exponent", "--lambda", "1", "--epsilon", "1", "--sigma", "1", "--dt", "2"}).code == 2);
    CHECK(run({"exponent", "--lambda", "1", "--epsilon", "1", "--sigma", "1", "--method", "theta-ms-exact"}).code ==
          2);
    CHECK(run({"simulate", "--lambda", "1", "--epsilon", "1", "--sigma", "1", "--theta", "0.5"}).code == 2);
    CHECK(run({"simulate", "--lambda", "x", "--epsilon", "1", "--sigma", "1"}).code == 2);
    const auto missing = run({"simulate", "--epsilon", "1", "--sigma", "1"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("--lambda") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
}
