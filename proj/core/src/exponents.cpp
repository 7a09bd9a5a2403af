#include "mlyap/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "mlyap/error.hpp"
#include "mlyap/parallel.hpp"
#include "mlyap/stochastics.hpp"

namespace mlyap {

std::string_view to_string(ExponentMethod m)
{
    switch (m) {
    case ExponentMethod::MsExact: return "ms-exact";
    case ExponentMethod::AsQuadrature: return "as-quadrature";
    case ExponentMethod::AsMonteCarlo: return "as-mc";
    case ExponentMethod::AsPathSlope: return "as-path-slope";
    case ExponentMethod::ThetaMsExact: return "theta-ms-exact";
    case ExponentMethod::ThetaAsQuadrature: return "theta-as-quadrature";
    }
    return "unknown";
}

std::optional<ExponentMethod> parse_method(std::string_view name)
{
    for (auto m : {ExponentMethod::MsExact, ExponentMethod::AsQuadrature, ExponentMethod::AsMonteCarlo,
                   ExponentMethod::AsPathSlope, ExponentMethod::ThetaMsExact, ExponentMethod::ThetaAsQuadrature}) {
        if (to_string(m) == name)
            return m;
    }
    return std::nullopt;
}

Sense sense_of(ExponentMethod m)
{
    return (m == ExponentMethod::MsExact || m == ExponentMethod::ThetaMsExact) ? Sense::MeanSquare
                                                                               : Sense::AlmostSure;
}

bool is_stochastic(ExponentMethod m)
{
    return m == ExponentMethod::AsMonteCarlo || m == ExponentMethod::AsPathSlope;
}

namespace {

void require_step(double dt)
{
    if (!(dt > 0.0 && dt < 1.0))
        throw PreconditionError("dt must satisfy 0 < dt < 1, got " + std::to_string(dt));
}

void require_scalar(const ModelParams& p)
{
    if (p.epsilon != 0.0)
        throw PreconditionError("theta-Milstein estimators are defined for the scalar equation (epsilon = 0)");
}

double theta_denominator(const ModelParams& p, double theta, double dt)
{
    if (!(theta >= 0.0 && theta <= 1.0))
        throw PreconditionError("theta must lie in [0, 1], got " + std::to_string(theta));
    const double denom = 1.0 - p.lambda * theta * dt;
    if (!(denom > 0.0))
        throw PreconditionError("1 - lambda*theta*dt must be positive (implicit step ill-posed)");
    return denom;
}

// gamma_dt - 1 without the cancellation of forming gamma_dt first.
double as_drift_excess(const ModelParams& p, double dt)
{
    return ((p.lambda + p.epsilon * p.epsilon / 2.0) - p.sigma * p.sigma / 2.0) * dt;
}

// Running mean and sum of squared deviations, merged in a fixed order.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o)
    {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.n) / total;
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }

    [[nodiscard]] double sample_sd() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

// E f(y), y ~ N(0,1), with the requested rule and a node-doubling check.
template <class F>
double hermite_expectation(F&& f, int nodes, const char* who)
{
    if (nodes < kMinHermiteNodes || 2 * nodes > kMaxHermiteNodes)
        throw PreconditionError(std::string(who) + ": nodes must lie in [" + std::to_string(kMinHermiteNodes) + ", " +
                                std::to_string(kMaxHermiteNodes / 2) + "]");
    const QuadratureRule& rule = gauss_hermite_rule(nodes);
    const QuadratureRule& refined = gauss_hermite_rule(2 * nodes);
    const double coarse = rule.integrate(f);
    const double fine = refined.integrate(f);
    const double magnitude = refined.integrate([&](double y) { return std::abs(f(y)); });
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
    if (std::abs(fine - coarse) > 1e-10 * std::abs(fine) + floor)
    {
        char diff[32];
        std::snprintf(diff, sizeof diff, "%.3e", std::abs(fine - coarse) / std::max(std::abs(fine), floor));
        throw ConvergenceError(std::string(who) + ": quadrature not converged, " + std::to_string(nodes) + " and " +
                               std::to_string(2 * nodes) + " nodes differ by " + diff + " relative");
    }
    return coarse;
}

} // namespace

// ---------------------------------------------------------------------------
// Mean square

namespace {

double ms_base_excess(const ModelParams& p, double dt)
{
    return (2.0 * p.lambda + p.epsilon * p.epsilon + p.sigma * p.sigma) * dt + mu(p) * dt * dt;
}

} // namespace

double ms_base(const ModelParams& p, double dt)
{
    return 1.0 + ms_base_excess(p, dt);
}

ExponentEstimate ms_exponent_exact(const ModelParams& p, double dt)
{
    p.validate();
    require_step(dt);
    const double excess = ms_base_excess(p, dt);
    if (!(excess > -1.0))
        throw PreconditionError("ms_exponent_exact: base 1 + (2 lambda + epsilon^2 + sigma^2) dt + mu dt^2 "
                                "must be positive; reduce dt");
    return {std::log1p(excess) / (2.0 * dt), ExponentMethod::MsExact, dt, std::nullopt, std::nullopt};
}

double ms_second_moment_exact(const ModelParams& p, double dt, std::size_t n_steps, const InitialDatum& initial)
{
    initial.validate();
    const double excess = ms_base_excess(p, dt);
    if (!(excess > -1.0))
        throw PreconditionError("ms_second_moment_exact: base must be positive");
    return std::exp(2.0 * initial.log_modulus() + static_cast<double>(n_steps) * std::log1p(excess));
}

double ms_remainder_contraction(const ModelParams& p, double dt)
{
    return (2.0 * std::abs(continuum_ms_exponent(p)) + mu(p) * dt) * dt;
}

RemainderReport ms_remainder(const ModelParams& p, double dt)
{
    p.validate();
    require_step(dt);
    const double q = ms_remainder_contraction(p, dt);
    if (!(q < 1.0))
        throw PreconditionError("ms_remainder: series contraction q = " + std::to_string(q) + " >= 1");

    constexpr int kMaxTerms = 200;
    const double m = mu(p);
    const double a = 2.0 * continuum_ms_exponent(p) + m * dt;
    const double ratio = a * dt;

    RemainderReport report;
    double sum = m * dt;
    double power = a * ratio; // a^m dt^(m-1) at m = 2
    for (int k = 2; k < 2 + kMaxTerms; ++k) {
        const double term = (k % 2 == 0 ? -1.0 : 1.0) * power / static_cast<double>(k);
        if (std::abs(term) < 1e-16 * std::max(1.0, std::abs(sum))) {
            report.converged = true;
            break;
        }
        sum += term;
        ++report.terms_used;
        power *= ratio;
    }
    report.value = sum;

    const double A = 2.0 * std::abs(continuum_ms_exponent(p)) + m * dt;
    report.bound = (m + A * A / (1.0 - A * dt)) * dt;
    return report;
}

MomentSample ms_second_moment_mc(const ModelParams& p, double dt, std::size_t n_steps, const InitialDatum& initial,
                                 std::size_t n_paths, std::uint64_t seed, unsigned threads)
{
    if (n_paths < 2)
        throw PreconditionError("ms_second_moment_mc: need at least 2 paths");
    SchemeConfig cfg;
    cfg.dt = dt;
    cfg.n_steps = n_steps;
    cfg.initial = initial;
    cfg.seed = seed;
    cfg.validate(p);

    std::vector<double> squares(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        RngStream stream(seed, i);
        const LogModulusPath path = simulate_path(p, cfg, stream);
        squares[i] = std::exp(2.0 * path.log_values.back());
    });
    Moments acc;
    for (double s : squares)
        acc.add(s);
    return {acc.mean, acc.sample_sd() / std::sqrt(static_cast<double>(acc.n)), acc.n};
}

// ---------------------------------------------------------------------------
// Almost sure

ExponentEstimate as_exponent_quadrature(const ModelParams& p, double dt, int nodes)
{
    p.validate();
    require_step(dt);
    if (!(gamma_dt(p, dt) > 0.75))
        throw PreconditionError("as_exponent_quadrature: requires gamma_dt = 1 + (lambda + epsilon^2/2 - "
                                "sigma^2/2) dt > 3/4, got " + std::to_string(gamma_dt(p, dt)));
    const double drift = as_drift_excess(p, dt);
    const double sqrt_dt = std::sqrt(dt);
    const double mean_log = hermite_expectation(
        [&](double y) { return log_abs_one_plus(drift + increment_term(p.sigma, sqrt_dt * y)); }, nodes,
        "as_exponent_quadrature");
    return {mean_log / dt, ExponentMethod::AsQuadrature, dt, std::nullopt, std::nullopt};
}

ExponentEstimate as_exponent_mc(const ModelParams& p, double dt, std::size_t n_samples, std::uint64_t seed,
                                unsigned threads)
{
    p.validate();
    require_step(dt);
    if (!(gamma_dt(p, dt) > 0.75))
        throw PreconditionError("as_exponent_mc: requires gamma_dt > 3/4, got " + std::to_string(gamma_dt(p, dt)));
    if (n_samples < 100)
        throw PreconditionError("as_exponent_mc: n_samples must be >= 100");

    const double drift = as_drift_excess(p, dt);
    const double sqrt_dt = std::sqrt(dt);
    const std::size_t blocks = (n_samples + kMcBlockSize - 1) / kMcBlockSize;
    std::vector<Moments> partial(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t begin = b * kMcBlockSize;
        const std::size_t len = std::min(kMcBlockSize, n_samples - begin);
        RngStream stream(seed, b);
        Moments m;
        for (std::size_t i = 0; i < len; ++i)
            m.add(log_abs_one_plus(drift + increment_term(p.sigma, sqrt_dt * standard_normal(stream))));
        partial[b] = m;
    });
    Moments total;
    for (const auto& m : partial)
        total.merge(m);

    const double se = total.sample_sd() / (std::sqrt(static_cast<double>(total.n)) * dt);
    return {total.mean / dt, ExponentMethod::AsMonteCarlo, dt, se, total.n};
}

ExponentEstimate as_exponent_path_slope(std::span<const LogModulusPath> paths)
{
    if (paths.size() < 2)
        throw PreconditionError("as_exponent_path_slope: need at least 2 paths");
    const double dt = paths.front().dt;
    const std::size_t len = paths.front().log_values.size();
    if (len < 2)
        throw PreconditionError("as_exponent_path_slope: paths must contain at least one step");
    for (const auto& path : paths) {
        if (path.dt != dt || path.log_values.size() != len)
            throw PreconditionError("as_exponent_path_slope: paths do not share a time grid");
    }
    const double horizon = static_cast<double>(len - 1) * dt;
    Moments acc;
    for (const auto& path : paths)
        acc.add((path.log_values.back() - path.log_values.front()) / horizon);
    const double se = acc.sample_sd() / std::sqrt(static_cast<double>(acc.n));
    return {acc.mean, ExponentMethod::AsPathSlope, dt, se, acc.n};
}

// ---------------------------------------------------------------------------
// theta-Milstein

ExponentEstimate theta_ms_exponent(const ModelParams& p, double theta, double dt)
{
    p.validate();
    require_step(dt);
    require_scalar(p);
    const double denom = theta_denominator(p, theta, dt);
    const double s2 = p.sigma * p.sigma;
    const double eta_excess = (p.lambda - s2 / 2.0) * dt / denom;
    const double eta = 1.0 + eta_excess;
    // E[factor^2] - 1 = eta^2 - 1 + sigma^2 eta dt / d + (sigma^2 dt + 3 sigma^4 dt^2 / 4) / d^2
    const double excess = eta_excess * (2.0 + eta_excess) + s2 * eta * dt / denom +
                          (s2 * dt + 0.75 * s2 * s2 * dt * dt) / (denom * denom);
    if (!(excess > -1.0))
        throw PreconditionError("theta_ms_exponent: second-moment base must be positive");
    return {std::log1p(excess) / (2.0 * dt), ExponentMethod::ThetaMsExact, dt, std::nullopt, std::nullopt};
}

ExponentEstimate theta_as_exponent_quadrature(const ModelParams& p, double theta, double dt, int nodes)
{
    p.validate();
    require_step(dt);
    require_scalar(p);
    const double denom = theta_denominator(p, theta, dt);
    const double eta = theta_eta(p, theta, dt);
    if (!(eta - 1.0 / (2.0 * denom) > 0.0))
        throw PreconditionError("theta_as_exponent_quadrature: requires eta_dt - 1/(2(1 - lambda*theta*dt)) > 0");
    const double eta_excess = (p.lambda - p.sigma * p.sigma / 2.0) * dt / denom;
    const double sqrt_dt = std::sqrt(dt);
    const double mean_log = hermite_expectation(
        [&](double y) { return log_abs_one_plus(eta_excess + increment_term(p.sigma, sqrt_dt * y) / denom); }, nodes,
        "theta_as_exponent_quadrature");
    return {mean_log / dt, ExponentMethod::ThetaAsQuadrature, dt, std::nullopt, std::nullopt};
}

// ---------------------------------------------------------------------------
// Sweeps

ExponentEstimate estimate_exponent(const ModelParams& p, double dt, ExponentMethod method,
                                   const EstimatorOptions& opts)
{
    switch (method) {
    case ExponentMethod::MsExact: return ms_exponent_exact(p, dt);
    case ExponentMethod::AsQuadrature: return as_exponent_quadrature(p, dt, opts.nodes);
    case ExponentMethod::AsMonteCarlo: return as_exponent_mc(p, dt, opts.samples, opts.seed, opts.threads);
    case ExponentMethod::AsPathSlope: {
        SchemeConfig cfg;
        cfg.dt = dt;
        cfg.n_steps = opts.steps;
        cfg.initial = opts.initial;
        cfg.seed = opts.seed;
        const auto paths = simulate_paths(p, cfg, opts.paths, opts.threads);
        return as_exponent_path_slope(paths);
    }
    case ExponentMethod::ThetaMsExact: return theta_ms_exponent(p, opts.theta, dt);
    case ExponentMethod::ThetaAsQuadrature: return theta_as_exponent_quadrature(p, opts.theta, dt, opts.nodes);
    }
    throw PreconditionError("unknown exponent method");
}

double continuum_target(const ModelParams& p, ExponentMethod method)
{
    return continuum_exponent(p, sense_of(method));
}

ConvergenceFit fit_convergence(std::span<const double> dts, std::span<const double> errors)
{
    if (dts.size() != errors.size())
        throw PreconditionError("fit_convergence: dts and errors differ in length");
    if (dts.size() < 3)
        throw PreconditionError("fit_convergence: need at least 3 step sizes");
    const auto n = static_cast<double>(dts.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (!(dts[i] > 0.0))
            throw PreconditionError("fit_convergence: step sizes must be positive");
        if (!(errors[i] > 0.0))
            throw PreconditionError("fit_convergence: errors must be positive (log-log fit undefined)");
        mx += std::log(dts[i]);
        my += std::log(errors[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        const double x = std::log(dts[i]) - mx;
        sxx += x * x;
        sxy += x * (std::log(errors[i]) - my);
    }
    if (!(sxx > 0.0))
        throw PreconditionError("fit_convergence: step sizes must not all be equal");

    ConvergenceFit fit;
    fit.order_p = sxy / sxx;
    const double intercept = my - fit.order_p * mx;
    fit.constant_C = std::exp(intercept);
    for (std::size_t i = 0; i < dts.size(); ++i) {
        const double predicted = intercept + fit.order_p * std::log(dts[i]);
        fit.residual = std::max(fit.residual, std::abs(std::log(errors[i]) - predicted) / std::numbers::ln10);
    }
    fit.dts.assign(dts.begin(), dts.end());
    fit.errors.assign(errors.begin(), errors.end());
    return fit;
}

ConvergenceFit sweep_dt(const ModelParams& p, std::span<const double> dts, ExponentMethod method,
                        const EstimatorOptions& opts)
{
    if (dts.size() < 3)
        throw PreconditionError("sweep_dt: need at least 3 step sizes");
    const double target = continuum_target(p, method);
    std::vector<double> errors;
    errors.reserve(dts.size());
    for (double dt : dts) {
        const double err = std::abs(estimate_exponent(p, dt, method, opts).value - target);
        if (err == 0.0)
            throw PreconditionError("sweep_dt: error at dt = " + std::to_string(dt) +
                                    " is exactly zero (below resolution)");
        errors.push_back(err);
    }
    return fit_convergence(dts, errors);
}

} // namespace mlyap
