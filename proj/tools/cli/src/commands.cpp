#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "format.hpp"
#include "mlyap/cli/cli.hpp"
#include "mlyap/error.hpp"
#include "mlyap/exponents.hpp"
#include "mlyap/scheme.hpp"
#include "mlyap/stochastics.hpp"
#include "verify.hpp"

namespace mlyap::cli {

namespace {

void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out)
{
    if (!path) {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(*path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw ConfigError("--out: cannot open '" + *path + "' for writing");
    file << text;
    file.close();
    if (!file)
        throw ConfigError("--out: write to '" + *path + "' failed");
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

double check_dt(double dt, const char* name = "--dt")
{
    if (!(dt > 0.0 && dt < 1.0))
        throw ConfigError(std::string(name) + ": must satisfy 0 < dt < 1, got " + shortest(dt));
    return dt;
}

json model_json(const ModelParams& p) { return {{"lambda", p.lambda}, {"epsilon", p.epsilon}, {"sigma", p.sigma}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

ExponentMethod resolve_method(const Options& opts)
{
    const std::string name = opts.method.value_or("as-quadrature");
    const auto m = parse_method(name);
    if (!m)
        throw ConfigError("--method: unknown method '" + name + "'");
    const bool theta_method = *m == ExponentMethod::ThetaMsExact || *m == ExponentMethod::ThetaAsQuadrature;
    if (theta_method && !opts.theta)
        throw ConfigError("--theta: required by method " + name);
    if (!theta_method && opts.theta)
        throw ConfigError("--theta: only the theta-* methods take a theta");
    return *m;
}

EstimatorOptions resolve_estimator(const Options& opts, ExponentMethod method)
{
    EstimatorOptions eo;
    eo.nodes = opts.nodes.value_or(kDefaultHermiteNodes);
    eo.samples = opts.samples.value_or(1'000'000);
    eo.seed = opts.seed.value_or(0);
    eo.theta = opts.theta.value_or(0.0);
    eo.steps = opts.steps.value_or(10'000);
    eo.paths = opts.paths.value_or(50);
    eo.initial = initial_datum(opts);
    eo.threads = opts.threads.value_or(0);

    if (eo.nodes < kMinHermiteNodes || 2 * eo.nodes > kMaxHermiteNodes)
        throw ConfigError("--nodes: must lie in [" + std::to_string(kMinHermiteNodes) + ", " +
                          std::to_string(kMaxHermiteNodes / 2) + "]");
    if (method == ExponentMethod::AsMonteCarlo && eo.samples < 100)
        throw ConfigError("--samples: at least 100 required");
    if (method == ExponentMethod::AsPathSlope) {
        if (eo.paths < 2)
            throw ConfigError("--paths: at least 2 required");
        if (eo.steps < 1)
            throw ConfigError("--steps: must be positive");
    }
    if (opts.theta && !(eo.theta >= 0.0 && eo.theta <= 1.0))
        throw ConfigError("--theta: must lie in [0, 1]");
    return eo;
}

json estimator_json(ExponentMethod method, const EstimatorOptions& eo)
{
    json j;
    j["method"] = to_string(method);
    switch (method) {
    case ExponentMethod::AsQuadrature: j["nodes"] = eo.nodes; break;
    case ExponentMethod::AsMonteCarlo:
        j["samples"] = eo.samples;
        j["seed"] = eo.seed;
        break;
    case ExponentMethod::AsPathSlope:
        j["steps"] = eo.steps;
        j["paths"] = eo.paths;
        j["seed"] = eo.seed;
        j["x0"] = eo.initial.x0;
        j["y0"] = eo.initial.y0;
        break;
    case ExponentMethod::ThetaMsExact: j["theta"] = eo.theta; break;
    case ExponentMethod::ThetaAsQuadrature:
        j["theta"] = eo.theta;
        j["nodes"] = eo.nodes;
        break;
    case ExponentMethod::MsExact: break;
    }
    return j;
}

json error_json(const char* kind, const std::string& message)
{
    return {{"kind", kind}, {"message", message}};
}

} // namespace

// ---------------------------------------------------------------------------

int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& /*err*/)
{
    const ModelParams p = require_model(opts);
    SchemeConfig cfg;
    cfg.dt = check_dt(opts.dt.value_or(1e-3));
    cfg.n_steps = opts.steps.value_or(10'000);
    cfg.theta = opts.theta;
    cfg.initial = initial_datum(opts);
    cfg.seed = opts.seed.value_or(0);
    const std::size_t n_paths = opts.paths.value_or(50);
    const Format format = output_format(opts, Format::Csv);
    if (cfg.n_steps == 0)
        throw ConfigError("--steps: must be positive");
    if (n_paths == 0)
        throw ConfigError("--paths: must be positive");
    if (cfg.theta && !(*cfg.theta >= 0.0 && *cfg.theta <= 1.0))
        throw ConfigError("--theta: must lie in [0, 1]");
    if (cfg.theta && p.epsilon != 0.0)
        throw ConfigError("--theta: the theta scheme needs --epsilon 0");
    try {
        cfg.validate(p);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }

    const auto paths = simulate_paths(p, cfg, n_paths, opts.threads.value_or(0));

    json config = model_json(p);
    config["command"] = "simulate";
    config["dt"] = cfg.dt;
    config["steps"] = cfg.n_steps;
    config["paths"] = n_paths;
    config["theta"] = optional_json(cfg.theta);
    config["seed"] = cfg.seed;
    config["x0"] = cfg.initial.x0;
    config["y0"] = cfg.initial.y0;
    std::size_t clamped = 0;
    for (const auto& path : paths)
        clamped += path.clamped_steps.size();

    std::vector<double> mean(cfg.n_steps + 1, 0.0);
    for (std::size_t k = 0; k <= cfg.n_steps; ++k) {
        double s = 0.0;
        for (const auto& path : paths)
            s += path.log_values[k];
        mean[k] = s / static_cast<double>(n_paths);
    }

    if (format == Format::Json) {
        json doc;
        doc["config"] = config;
        doc["clamped_steps"] = clamped;
        std::vector<double> t(cfg.n_steps + 1);
        for (std::size_t k = 0; k <= cfg.n_steps; ++k)
            t[k] = paths.front().time(k);
        doc["t"] = t;
        json cols = json::array();
        for (const auto& path : paths)
            cols.push_back(path.log_values);
        doc["log_modulus"] = cols;
        doc["mean"] = mean;
        emit(dump(doc), opts.out, out);
        return kExitOk;
    }

    std::string text;
    text.reserve((cfg.n_steps + 2) * (n_paths + 2) * 22);
    CsvWriter csv(text);
    std::vector<std::string> names{"t"};
    for (std::size_t i = 0; i < n_paths; ++i)
        names.push_back("path_" + std::to_string(i));
    names.emplace_back("mean");
    csv.header(names);
    for (std::size_t k = 0; k <= cfg.n_steps; ++k) {
        csv.cell(paths.front().time(k));
        for (const auto& path : paths)
            csv.cell(path.log_values[k]);
        csv.cell(mean[k]).end_row();
    }
    emit(text, opts.out, out);
    if (opts.out)
        emit(dump({{"config", config}, {"clamped_steps", clamped}}), *opts.out + ".meta.json", out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_exponent(const Options& opts, std::ostream& out, std::ostream& err)
{
    const ModelParams p = require_model(opts);
    const double dt = check_dt(opts.dt.value_or(1e-3));
    const ExponentMethod method = resolve_method(opts);
    const EstimatorOptions eo = resolve_estimator(opts, method);
    const Format format = output_format(opts, Format::Json);

    json config = model_json(p);
    config["command"] = "exponent";
    config["dt"] = dt;
    config.update(estimator_json(method, eo));

    ExponentEstimate est;
    try {
        est = estimate_exponent(p, dt, method, eo);
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        emit(dump({{"error", error_json("precondition", e.what())}, {"config", config}}), opts.out, out);
        return kExitConfigError;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        emit(dump({{"error", error_json("convergence", e.what())}, {"config", config}}), opts.out, out);
        return kExitConfigError;
    }

    const double continuum = continuum_target(p, method);
    const RegionClass region = classify(p, sense_of(method));

    if (format == Format::Csv) {
        std::string text;
        CsvWriter csv(text);
        csv.header({"method", "dt", "value", "std_error", "continuum_value", "region_class"});
        csv.cell(std::string(to_string(method)))
            .cell(est.dt)
            .cell(est.value)
            .cell(est.std_error)
            .cell(continuum)
            .cell(std::string(to_string(region.behaviour)))
            .end_row();
        emit(text, opts.out, out);
        if (opts.out)
            emit(dump({{"config", config}}), *opts.out + ".meta.json", out);
        return kExitOk;
    }

    json doc;
    doc["method"] = to_string(method);
    doc["dt"] = est.dt;
    doc["value"] = est.value;
    if (est.std_error)
        doc["std_error"] = *est.std_error;
    if (est.n_samples)
        doc["n_samples"] = *est.n_samples;
    doc["continuum_value"] = continuum;
    doc["sense"] = to_string(region.sense);
    doc["region_class"] = to_string(region.behaviour);
    doc["config"] = config;
    emit(dump(doc), opts.out, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_sweep_dt(const Options& opts, std::ostream& out, std::ostream& err)
{
    const ModelParams p = require_model(opts);
    const ExponentMethod method = resolve_method(opts);
    const EstimatorOptions eo = resolve_estimator(opts, method);
    const Format format = output_format(opts, Format::Csv);
    const std::vector<double> dts = opts.dts.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4, 1e-5} : opts.dts;
    if (dts.size() < 3)
        throw ConfigError("--dts: at least 3 step sizes required, got " + std::to_string(dts.size()));
    for (double dt : dts)
        check_dt(dt, "--dts");

    json config = model_json(p);
    config["command"] = "sweep-dt";
    config["dts"] = dts;
    config.update(estimator_json(method, eo));

    const double continuum = continuum_target(p, method);
    struct Row {
        double dt;
        std::optional<double> value;
        std::optional<double> abs_error;
    };
    std::vector<Row> rows;
    json failures = json::array();
    std::vector<double> fit_dts;
    std::vector<double> fit_errors;
    for (double dt : dts) {
        Row row{dt, std::nullopt, std::nullopt};
        try {
            row.value = estimate_exponent(p, dt, method, eo).value;
            row.abs_error = std::abs(*row.value - continuum);
            if (*row.abs_error > 0.0) {
                fit_dts.push_back(dt);
                fit_errors.push_back(*row.abs_error);
            } else {
                failures.push_back({{"dt", dt}, {"kind", "zero-error"}, {"message", "error below resolution"}});
            }
        } catch (const PreconditionError& e) {
            failures.push_back({{"dt", dt}, {"kind", "precondition"}, {"message", e.what()}});
        } catch (const ConvergenceError& e) {
            failures.push_back({{"dt", dt}, {"kind", "convergence"}, {"message", e.what()}});
        }
        rows.push_back(row);
    }

    json fit = nullptr;
    int code = kExitOk;
    if (fit_dts.size() >= 3) {
        const ConvergenceFit f = fit_convergence(fit_dts, fit_errors);
        fit = {{"constant_C", f.constant_C}, {"order_p", f.order_p}, {"residual", f.residual},
               {"residual_units", "log10"}, {"n_points", f.dts.size()}};
    } else {
        err << "error: sweep-dt: only " << fit_dts.size() << " usable step sizes, a fit needs 3\n";
        code = kExitConfigError;
    }
    json fit_doc = {{"fit", fit}, {"continuum_value", continuum}, {"failures", failures}, {"config", config}};

    if (format == Format::Json) {
        json jrows = json::array();
        for (const Row& r : rows)
            jrows.push_back({{"dt", r.dt},
                             {"discrete_value", optional_json(r.value)},
                             {"continuum_value", continuum},
                             {"abs_error", optional_json(r.abs_error)}});
        fit_doc["rows"] = jrows;
        emit(dump(fit_doc), opts.out, out);
        return code;
    }

    std::string text;
    CsvWriter csv(text);
    csv.header({"dt", "discrete_value", "continuum_value", "abs_error"});
    for (const Row& r : rows) {
        csv.cell(r.dt);
        if (r.value)
            csv.cell(*r.value);
        else
            csv.cell(std::string("error"));
        csv.cell(continuum).cell(r.abs_error).end_row();
    }
    emit(text, opts.out, out);
    if (opts.out)
        emit(dump(fit_doc), *opts.out + ".fit.json", out);
    else
        err << fit_doc.dump() << '\n';
    return code;
}

// ---------------------------------------------------------------------------

int cmd_region(const Options& opts, std::ostream& out, std::ostream& /*err*/)
{
    if (!opts.lambda)
        throw ConfigError("--lambda: required");
    if (!std::isfinite(*opts.lambda))
        throw ConfigError("--lambda: must be finite");
    if (!opts.sigma_range)
        throw ConfigError("--sigma-range: required");
    const double lambda = *opts.lambda;
    const SigmaRange range = parse_sigma_range(*opts.sigma_range);
    const Format format = output_format(opts, Format::Csv);

    json config = {{"command", "region"},
                   {"lambda", lambda},
                   {"sigma_range", {range.start, range.stop, range.step}},
                   {"sense", to_string(Sense::AlmostSure)}};

    struct Row {
        double sigma;
        std::optional<double> plus;
        std::optional<double> minus;
        Behaviour at_zero;
    };
    std::vector<Row> rows;
    for (double sigma : range.values()) {
        const auto eps = as_boundary_epsilon(lambda, sigma);
        Row r{sigma, std::nullopt, std::nullopt, classify({lambda, 0.0, sigma}, Sense::AlmostSure).behaviour};
        if (!eps.empty()) {
            r.minus = eps.front();
            r.plus = eps.back();
        }
        rows.push_back(r);
    }

    if (format == Format::Json) {
        json jrows = json::array();
        for (const Row& r : rows)
            jrows.push_back({{"sigma", r.sigma},
                             {"eps_plus", optional_json(r.plus)},
                             {"eps_minus", optional_json(r.minus)},
                             {"class_at_epsilon_0", to_string(r.at_zero)}});
        emit(dump({{"rows", jrows}, {"config", config}}), opts.out, out);
        return kExitOk;
    }

    std::string text;
    CsvWriter csv(text);
    csv.header({"sigma", "eps_plus", "eps_minus", "class_at_epsilon_0"});
    for (const Row& r : rows)
        csv.cell(r.sigma).cell(r.plus).cell(r.minus).cell(std::string(to_string(r.at_zero))).end_row();
    emit(text, opts.out, out);
    if (opts.out)
        emit(dump({{"config", config}}), *opts.out + ".meta.json", out);
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_verify(const Options& opts, std::ostream& out, std::ostream& /*err*/)
{
    VerifySettings s;
    s.suite = opts.suite.value_or("all");
    if (s.suite != "lemmas" && s.suite != "moments" && s.suite != "closedform" && s.suite != "all")
        throw ConfigError("--suite: expected lemmas, moments, closedform or all, got '" + s.suite + "'");
    s.params = {opts.lambda.value_or(8.0), opts.epsilon.value_or(2.0), opts.sigma.value_or(4.0)};
    try {
        s.params.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("verify: ") + e.what());
    }
    s.dt = check_dt(opts.dt.value_or(1e-3));
    s.steps = opts.steps.value_or(10);
    s.paths = opts.paths.value_or(100'000);
    s.samples = opts.samples.value_or(1'000'000);
    s.seed = opts.seed.value_or(0);
    s.nodes = opts.nodes.value_or(kDefaultHermiteNodes);
    s.initial = initial_datum(opts);
    s.threads = opts.threads.value_or(0);
    if (s.steps == 0)
        throw ConfigError("--steps: must be positive");
    if (s.paths < 2)
        throw ConfigError("--paths: at least 2 required");
    if (s.samples < 100)
        throw ConfigError("--samples: at least 100 required");
    if (s.nodes < kMinHermiteNodes || 2 * s.nodes > kMaxHermiteNodes)
        throw ConfigError("--nodes: must lie in [" + std::to_string(kMinHermiteNodes) + ", " +
                          std::to_string(kMaxHermiteNodes / 2) + "]");

    const std::vector<CheckResult> checks = run_verify(s);
    bool all_passed = true;
    for (const auto& c : checks)
        all_passed = all_passed && c.passed;

    json config = model_json(s.params);
    config["command"] = "verify";
    config["suite"] = s.suite;
    config["dt"] = s.dt;
    config["steps"] = s.steps;
    config["paths"] = s.paths;
    config["samples"] = s.samples;
    config["seed"] = s.seed;
    config["nodes"] = s.nodes;
    config["x0"] = s.initial.x0;
    config["y0"] = s.initial.y0;

    json jchecks = json::array();
    for (const auto& c : checks)
        jchecks.push_back({{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    const json doc = {{"passed", all_passed}, {"checks", jchecks}, {"config", config}};

    std::string table;
    std::size_t width = 0;
    for (const auto& c : checks)
        width = std::max(width, c.suite.size() + c.name.size() + 1);
    for (const auto& c : checks) {
        std::string label = c.suite + "/" + c.name;
        label.resize(width, ' ');
        table += (c.passed ? "PASS  " : "FAIL  ") + label + "  " + c.detail + "\n";
    }
    table += all_passed ? "all checks passed\n" : "verification FAILED\n";

    std::string csv_text;
    CsvWriter csv(csv_text);
    csv.header({"suite", "name", "passed", "detail"});
    for (const auto& c : checks) {
        std::string detail = c.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        csv.cell(c.suite).cell(c.name).cell(std::string(c.passed ? "true" : "false")).cell(detail).end_row();
    }

    if (opts.out) {
        out << table;
        const Format format = output_format(opts, Format::Json);
        emit(format == Format::Json ? dump(doc) : csv_text, opts.out, out);
    } else if (opts.format) {
        emit(output_format(opts, Format::Json) == Format::Json ? dump(doc) : csv_text, std::nullopt, out);
    } else {
        out << table;
    }
    return all_passed ? kExitOk : kExitVerifyFailed;
}

} // namespace mlyap::cli
