#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mlyap/model.hpp"
#include "mlyap/stochastics.hpp"

namespace mlyap {

struct SchemeConfig {
    double dt = 1e-3;
    std::size_t n_steps = 10'000;
    std::optional<double> theta; ///< absent: explicit Milstein
    InitialDatum initial;
    std::uint64_t seed = 0;

    /// Checks 0 < dt < 1, n_steps > 0, theta in [0,1], the initial datum and,
    /// when theta is set, 1 - lambda*theta*dt > 0.
    void validate(const ModelParams& p) const;
};

/// log|Z_k| on the grid t_k = k*dt, k = 0..n_steps.
struct LogModulusPath {
    double dt = 0.0;
    std::vector<double> log_values;
    /// Steps k (1-based, the step producing log_values[k]) whose factor was
    /// exactly zero in floating point and whose log was clamped.
    std::vector<std::size_t> clamped_steps;

    [[nodiscard]] std::size_t n_steps() const { return log_values.empty() ? 0 : log_values.size() - 1; }
    [[nodiscard]] double time(std::size_t k) const { return static_cast<double>(k) * dt; }
};

/// Log contribution used in place of log(0).
inline constexpr double kClampedLog = -745.0;

/// gamma_dt = 1 + (lambda + epsilon^2/2 - sigma^2/2) dt.
[[nodiscard]] double gamma_dt(const ModelParams& p, double dt);

/// (lambda + epsilon^2/2)^2 + sigma^4/2, written as in the expanded form
/// lambda^2 + lambda epsilon^2 + epsilon^4/4 + sigma^4/2.
[[nodiscard]] double mu(const ModelParams& p);

/// sigma dB + (sigma^2/2) dB^2, the random part of every one-step factor.
/// Always >= -1/2.
[[nodiscard]] double increment_term(double sigma, double dB);

/// One-step Milstein factor gamma_dt + sigma dB + (sigma^2/2) dB^2.
[[nodiscard]] double milstein_factor(const ModelParams& p, double dt, double dB);

/// log|1 + excess|, accurate for small excess.
[[nodiscard]] double log_abs_one_plus(double excess);

/// Explicit Milstein recursion for |Z_n| accumulated in log space. Draws
/// n_steps increments dB = sqrt(dt) * N(0,1) from `stream`.
[[nodiscard]] LogModulusPath simulate_path(const ModelParams& p, const SchemeConfig& cfg,
                                           RngStream& stream);

/// eta_dt = (1 + (lambda(1-theta) - sigma^2/2) dt) / (1 - lambda theta dt).
[[nodiscard]] double theta_eta(const ModelParams& p, double theta, double dt);

/// Drift-implicit theta-Milstein recursion for the scalar equation
/// (epsilon must be 0). With theta = 0 the per-step arithmetic is identical
/// to simulate_path.
[[nodiscard]] LogModulusPath simulate_theta_path(const ModelParams& p, const SchemeConfig& cfg,
                                                 RngStream& stream);

/// Simulates `n_paths` independent paths; path i draws from
/// RngStream(cfg.seed, i). Dispatches on cfg.theta. The result does not
/// depend on `threads` (0 = hardware concurrency).
[[nodiscard]] std::vector<LogModulusPath> simulate_paths(const ModelParams& p, const SchemeConfig& cfg,
                                                         std::size_t n_paths, unsigned threads = 0);

} // namespace mlyap
