#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlyap/model.hpp"

namespace mlyap::cli {

using nlohmann::json;

/// Invalid flags, config files or values; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

struct SigmaRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    [[nodiscard]] std::vector<double> values() const;
};

/// Everything a subcommand may read. Unset fields take subcommand defaults.
struct Options {
    std::optional<double> lambda;
    std::optional<double> epsilon;
    std::optional<double> sigma;
    std::optional<double> dt;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> paths;
    std::optional<double> theta;
    std::optional<std::uint64_t> seed;
    std::optional<int> nodes;
    std::optional<std::size_t> samples;
    std::vector<double> dts;
    std::optional<std::string> sigma_range;
    std::optional<std::string> suite;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
    std::optional<std::string> config;
    std::optional<std::string> method;
    std::optional<double> x0;
    std::optional<double> y0;
};

/// One flag and how to fill it from a JSON config value.
struct Field {
    std::string key;
    CLI::Option* option = nullptr;
    std::function<void(const json&)> from_json;
};

using Registry = std::vector<Field>;

enum Flag : unsigned {
    kModel = 1u << 0,
    kLambda = 1u << 1,
    kDt = 1u << 2,
    kScheme = 1u << 3, // steps, paths, theta, seed, x0, y0
    kEstimator = 1u << 4, // nodes, samples, method
    kDts = 1u << 5,
    kSigmaRange = 1u << 6,
    kSuite = 1u << 7,
};

/// Adds the flags selected by `mask` (plus --out, --format, --threads,
/// --config) to `app`, bound to `opts`.
Registry register_flags(CLI::App& app, Options& opts, unsigned mask);

/// Fills every field not given on the command line from the JSON file named
/// by --config. Keys are flag names without dashes; keys belonging to other
/// subcommands are ignored, unknown keys are errors.
void apply_config_file(const Registry& fields, const Options& opts);

[[nodiscard]] ModelParams require_model(const Options& opts);
[[nodiscard]] InitialDatum initial_datum(const Options& opts);
[[nodiscard]] Format output_format(const Options& opts, Format fallback);
[[nodiscard]] SigmaRange parse_sigma_range(const std::string& text);

} // namespace mlyap::cli
