#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlyap/model.hpp"

namespace mlyap::cli {

struct VerifySettings {
    std::string suite = "all";
    ModelParams params{8.0, 2.0, 4.0};
    double dt = 1e-3;
    std::size_t steps = 10;
    std::size_t paths = 100'000;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
    int nodes = 201;
    InitialDatum initial;
    unsigned threads = 0;
};

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the checks of one suite ("all" runs every suite in order).
[[nodiscard]] std::vector<CheckResult> run_verify(const VerifySettings& s);

} // namespace mlyap::cli
