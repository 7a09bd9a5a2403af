#include "mlyap/scheme.hpp"

#include <cmath>
#include <string>

#include "mlyap/error.hpp"
#include "mlyap/parallel.hpp"

namespace mlyap {

void SchemeConfig::validate(const ModelParams& p) const
{
    p.validate();
    if (!(dt > 0.0 && dt < 1.0))
        throw PreconditionError("dt must satisfy 0 < dt < 1, got " + std::to_string(dt));
    if (n_steps == 0)
        throw PreconditionError("n_steps must be positive");
    initial.validate();
    if (theta) {
        if (!(*theta >= 0.0 && *theta <= 1.0))
            throw PreconditionError("theta must lie in [0, 1], got " + std::to_string(*theta));
        if (!(1.0 - p.lambda * *theta * dt > 0.0))
            throw PreconditionError("theta: implicit step ill-posed, need 1 - lambda*theta*dt > 0");
    }
}

double gamma_dt(const ModelParams& p, double dt)
{
    return 1.0 + ((p.lambda + p.epsilon * p.epsilon / 2.0) - p.sigma * p.sigma / 2.0) * dt;
}

double mu(const ModelParams& p)
{
    const double e2 = p.epsilon * p.epsilon;
    const double s2 = p.sigma * p.sigma;
    return p.lambda * p.lambda + p.lambda * e2 + e2 * e2 / 4.0 + s2 * s2 / 2.0;
}

double increment_term(double sigma, double dB)
{
    return sigma * dB + (sigma * sigma / 2.0) * (dB * dB);
}

double milstein_factor(const ModelParams& p, double dt, double dB)
{
    return gamma_dt(p, dt) + increment_term(p.sigma, dB);
}

double log_abs_one_plus(double excess)
{
    if (excess > -1.0)
        return std::log1p(excess);
    const double v = std::abs(1.0 + excess);
    return v == 0.0 ? kClampedLog : std::log(v);
}

namespace {

// Shared driver: the step factor is 1 + drift_excess + increment / denom.
// Keeping both schemes on this one code path makes theta = 0 reproduce the
// explicit scheme bit for bit.
LogModulusPath accumulate(const ModelParams& p, const SchemeConfig& cfg, double drift_excess, double denom,
                          RngStream& stream)
{
    LogModulusPath path;
    path.dt = cfg.dt;
    path.log_values.resize(cfg.n_steps + 1);
    path.log_values[0] = cfg.initial.log_modulus();

    const double sqrt_dt = std::sqrt(cfg.dt);
    double acc = path.log_values[0];
    for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
        const double dB = sqrt_dt * standard_normal(stream);
        const double excess = drift_excess + increment_term(p.sigma, dB) / denom;
        const double factor = 1.0 + excess;
        double contribution = 0.0;
        if (factor == 0.0) {
            contribution = kClampedLog;
            path.clamped_steps.push_back(k);
        } else {
            contribution = log_abs_one_plus(excess);
        }
        acc += contribution;
        path.log_values[k] = acc;
    }
    return path;
}

} // namespace

LogModulusPath simulate_path(const ModelParams& p, const SchemeConfig& cfg, RngStream& stream)
{
    if (cfg.theta)
        throw PreconditionError("simulate_path: theta must be absent; use simulate_theta_path");
    cfg.validate(p);
    const double drift_excess = ((p.lambda + p.epsilon * p.epsilon / 2.0) - p.sigma * p.sigma / 2.0) * cfg.dt;
    return accumulate(p, cfg, drift_excess, 1.0, stream);
}

double theta_eta(const ModelParams& p, double theta, double dt)
{
    const double denom = 1.0 - p.lambda * theta * dt;
    if (!(denom > 0.0))
        throw PreconditionError("theta_eta: 1 - lambda*theta*dt must be positive");
    return (1.0 + (p.lambda * (1.0 - theta) - p.sigma * p.sigma / 2.0) * dt) / denom;
}

LogModulusPath simulate_theta_path(const ModelParams& p, const SchemeConfig& cfg, RngStream& stream)
{
    if (!cfg.theta)
        throw PreconditionError("simulate_theta_path: theta is required");
    if (p.epsilon != 0.0)
        throw PreconditionError("simulate_theta_path: the theta scheme is scalar, epsilon must be 0");
    cfg.validate(p);
    const double theta = *cfg.theta;
    const double denom = 1.0 - p.lambda * theta * cfg.dt;
    // eta - 1 = (lambda - sigma^2/2) dt / denom
    const double drift_excess = ((p.lambda + p.epsilon * p.epsilon / 2.0) - p.sigma * p.sigma / 2.0) * cfg.dt / denom;
    return accumulate(p, cfg, drift_excess, denom, stream);
}

std::vector<LogModulusPath> simulate_paths(const ModelParams& p, const SchemeConfig& cfg, std::size_t n_paths,
                                           unsigned threads)
{
    cfg.validate(p);
    if (cfg.theta && p.epsilon != 0.0)
        throw PreconditionError("theta scheme requires epsilon = 0");
    std::vector<LogModulusPath> paths(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        RngStream stream(cfg.seed, i);
        paths[i] = cfg.theta ? simulate_theta_path(p, cfg, stream) : simulate_path(p, cfg, stream);
    });
    return paths;
}

} // namespace mlyap
