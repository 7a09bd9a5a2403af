#include "options.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "format.hpp"

namespace mlyap::cli {

namespace {

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{"lambda", "epsilon", "sigma", "dt",          "steps",  "paths", "theta",
                                            "seed",   "nodes",   "samples", "dts",       "sigma-range", "suite",
                                            "out",    "format",  "threads", "method",    "x0",     "y0"};
    return keys;
}

template <class T>
void add(CLI::App& app, Registry& reg, const std::string& key, std::optional<T>& target, const std::string& help)
{
    CLI::Option* opt = app.add_option("--" + key, target, help);
    reg.push_back({key, opt, [&target](const json& j) { target = j.get<T>(); }});
}

} // namespace

std::vector<double> SigmaRange::values() const
{
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        out.push_back(start + static_cast<double>(i) * step);
    return out;
}

Registry register_flags(CLI::App& app, Options& opts, unsigned mask)
{
    Registry reg;
    if (mask & (kModel | kLambda))
        add(app, reg, "lambda", opts.lambda, "drift coefficient lambda");
    if (mask & kModel) {
        add(app, reg, "epsilon", opts.epsilon, "rotation noise intensity epsilon");
        add(app, reg, "sigma", opts.sigma, "radial noise intensity sigma");
    }
    if (mask & kDt)
        add(app, reg, "dt", opts.dt, "step size, 0 < dt < 1");
    if (mask & kScheme) {
        add(app, reg, "steps", opts.steps, "number of steps per path");
        add(app, reg, "paths", opts.paths, "number of simulated paths");
        add(app, reg, "theta", opts.theta, "drift-implicitness of the theta scheme, in [0, 1]");
        add(app, reg, "seed", opts.seed, "root seed of the random streams");
        add(app, reg, "x0", opts.x0, "initial datum, first component");
        add(app, reg, "y0", opts.y0, "initial datum, second component");
    }
    if (mask & kEstimator) {
        add(app, reg, "method", opts.method,
            "ms-exact | as-quadrature | as-mc | as-path-slope | theta-ms-exact | theta-as-quadrature");
        add(app, reg, "nodes", opts.nodes, "Gauss-Hermite nodes");
        add(app, reg, "samples", opts.samples, "Monte Carlo samples");
    }
    if (mask & kDts) {
        CLI::Option* opt = app.add_option("--dts", opts.dts, "comma-separated step sizes")->delimiter(',');
        reg.push_back({"dts", opt, [&opts](const json& j) { opts.dts = j.get<std::vector<double>>(); }});
    }
    if (mask & kSigmaRange) {
        CLI::Option* opt = app.add_option("--sigma-range", opts.sigma_range, "start:stop:step");
        reg.push_back({"sigma-range", opt, [&opts](const json& j) {
                           if (j.is_array()) {
                               const auto v = j.get<std::vector<double>>();
                               if (v.size() != 3)
                                   throw ConfigError("config: sigma-range array must have 3 entries");
                               opts.sigma_range = shortest(v[0]) + ":" + shortest(v[1]) + ":" + shortest(v[2]);
                           } else {
                               opts.sigma_range = j.get<std::string>();
                           }
                       }});
    }
    if (mask & kSuite)
        add(app, reg, "suite", opts.suite, "lemmas | moments | closedform | all");
    add(app, reg, "out", opts.out, "output file (default: standard output)");
    add(app, reg, "format", opts.format, "csv | json");
    add(app, reg, "threads", opts.threads, "worker threads (0 = all cores); results do not depend on it");
    app.add_option("--config", opts.config, "JSON file of flag values; flags given on the command line win");
    return reg;
}

void apply_config_file(const Registry& fields, const Options& opts)
{
    if (!opts.config)
        return;
    std::ifstream in(*opts.config);
    if (!in)
        throw ConfigError("--config: cannot open '" + *opts.config + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("--config: '" + *opts.config + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("--config: top level must be a JSON object");

    for (const auto& [key, value] : doc.items()) {
        if (!known_keys().contains(key))
            throw ConfigError("--config: unknown key '" + key + "'");
    }
    for (const Field& f : fields) {
        if (f.option->count() > 0 || !doc.contains(f.key))
            continue;
        try {
            f.from_json(doc.at(f.key));
        } catch (const json::exception& e) {
            throw ConfigError("--config: key '" + f.key + "' has the wrong type: " + e.what());
        }
    }
}

ModelParams require_model(const Options& opts)
{
    for (const auto& [name, v] : {std::pair{"--lambda", opts.lambda}, std::pair{"--epsilon", opts.epsilon},
                                  std::pair{"--sigma", opts.sigma}}) {
        if (!v)
            throw ConfigError(std::string(name) + ": required");
        if (!std::isfinite(*v))
            throw ConfigError(std::string(name) + ": must be finite");
    }
    return {*opts.lambda, *opts.epsilon, *opts.sigma};
}

InitialDatum initial_datum(const Options& opts)
{
    const InitialDatum z{opts.x0.value_or(1.0), opts.y0.value_or(0.0)};
    if (!std::isfinite(z.x0) || !std::isfinite(z.y0) || (z.x0 == 0.0 && z.y0 == 0.0))
        throw ConfigError("--x0/--y0: initial datum must be finite and nonzero");
    return z;
}

Format output_format(const Options& opts, Format fallback)
{
    if (!opts.format)
        return fallback;
    if (*opts.format == "csv")
        return Format::Csv;
    if (*opts.format == "json")
        return Format::Json;
    throw ConfigError("--format: expected csv or json, got '" + *opts.format + "'");
}

SigmaRange parse_sigma_range(const std::string& text)
{
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--sigma-range: '" + item + "' is not a number");
        }
    }
    if (parts.size() != 3)
        throw ConfigError("--sigma-range: expected start:stop:step, got '" + text + "'");
    const SigmaRange r{parts[0], parts[1], parts[2]};
    if (!(r.step > 0.0) || !std::isfinite(r.step))
        throw ConfigError("--sigma-range: step must be positive");
    if (!(r.stop >= r.start) || !std::isfinite(r.start) || !std::isfinite(r.stop))
        throw ConfigError("--sigma-range: need finite start <= stop");
    if ((r.stop - r.start) / r.step > 1e7)
        throw ConfigError("--sigma-range: more than 1e7 rows requested");
    return r;
}

} // namespace mlyap::cli
