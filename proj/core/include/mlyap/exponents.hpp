#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mlyap/model.hpp"
#include "mlyap/scheme.hpp"

namespace mlyap {

enum class ExponentMethod {
    MsExact,
    AsQuadrature,
    AsMonteCarlo,
    AsPathSlope,
    ThetaMsExact,
    ThetaAsQuadrature,
};

[[nodiscard]] std::string_view to_string(ExponentMethod m);
[[nodiscard]] std::optional<ExponentMethod> parse_method(std::string_view name);
[[nodiscard]] Sense sense_of(ExponentMethod m);
[[nodiscard]] bool is_stochastic(ExponentMethod m);

/// A discrete Lyapunov exponent. Mean-square values are rates of
/// [E|Z_n|^2]^{1/2}; almost-sure values are rates of |Z_n|.
struct ExponentEstimate {
    double value = 0.0;
    ExponentMethod method = ExponentMethod::MsExact;
    double dt = 0.0;
    std::optional<double> std_error; ///< set only for stochastic methods
    std::optional<std::size_t> n_samples;
};

/// |error| ~ C dt^p fitted by least squares in log-log space.
struct ConvergenceFit {
    double constant_C = 0.0;
    double order_p = 0.0;
    double residual = 0.0; ///< max |log10 error - fitted log10 error|, in decades
    std::vector<double> dts;
    std::vector<double> errors;
};

struct RemainderReport {
    double value = 0.0;
    double bound = 0.0;
    int terms_used = 0;
    bool converged = false;
};

inline constexpr int kDefaultHermiteNodes = 201;

// ---------------------------------------------------------------------------
// Mean square

/// 1 + (2 lambda + epsilon^2 + sigma^2) dt + mu dt^2, the per-step growth of
/// E|Z_n|^2.
[[nodiscard]] double ms_base(const ModelParams& p, double dt);

/// (1/(2 dt)) log ms_base. Throws PreconditionError when the base is not
/// positive.
[[nodiscard]] ExponentEstimate ms_exponent_exact(const ModelParams& p, double dt);

/// E|Z_n|^2 = |Z_0|^2 ms_base^n.
[[nodiscard]] double ms_second_moment_exact(const ModelParams& p, double dt, std::size_t n_steps,
                                            const InitialDatum& initial);

/// Series form of the remainder in
///   (1/t_n) log E|Z_n|^2 = 2 (lambda + epsilon^2/2 + sigma^2/2) + R(dt)
/// and its a-priori bound. Throws PreconditionError unless
///   q = (2|lambda + epsilon^2/2 + sigma^2/2| + mu dt) dt < 1.
[[nodiscard]] RemainderReport ms_remainder(const ModelParams& p, double dt);

[[nodiscard]] double ms_remainder_contraction(const ModelParams& p, double dt);

struct MomentSample {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

/// Monte Carlo estimate of E|Z_n|^2 from n_paths simulated paths
/// (path i uses RngStream(seed, i)).
[[nodiscard]] MomentSample ms_second_moment_mc(const ModelParams& p, double dt, std::size_t n_steps,
                                               const InitialDatum& initial, std::size_t n_paths,
                                               std::uint64_t seed, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Almost sure

/// (1/dt) E log|gamma_dt + sigma dB + (sigma^2/2) dB^2| by Gauss-Hermite
/// quadrature after dB = sqrt(dt) y. Requires gamma_dt > 3/4 and
/// nodes in [3, 512] (the rule is checked against 2*nodes). Throws
/// ConvergenceError when doubling the node count moves the result by more
/// than 1e-10 relative.
[[nodiscard]] ExponentEstimate as_exponent_quadrature(const ModelParams& p, double dt,
                                                      int nodes = kDefaultHermiteNodes);

/// Per-increment Monte Carlo estimate of the same expectation. Samples are
/// drawn in fixed blocks of kMcBlockSize, block b from RngStream(seed, b),
/// and merged in block order.
[[nodiscard]] ExponentEstimate as_exponent_mc(const ModelParams& p, double dt, std::size_t n_samples,
                                              std::uint64_t seed, unsigned threads = 0);

inline constexpr std::size_t kMcBlockSize = 1u << 16;

/// Mean over paths of (log|Z_n| - log|Z_0|)/t_n with the cross-path
/// standard error. Requires >= 2 paths on a common grid.
[[nodiscard]] ExponentEstimate as_exponent_path_slope(std::span<const LogModulusPath> paths);

// ---------------------------------------------------------------------------
// theta-Milstein (scalar equation, epsilon = 0)

[[nodiscard]] ExponentEstimate theta_ms_exponent(const ModelParams& p, double theta, double dt);

[[nodiscard]] ExponentEstimate theta_as_exponent_quadrature(const ModelParams& p, double theta, double dt,
                                                            int nodes = kDefaultHermiteNodes);

// ---------------------------------------------------------------------------
// Step-size sweeps

struct EstimatorOptions {
    int nodes = kDefaultHermiteNodes;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
    double theta = 0.0;            ///< theta-methods only
    std::size_t steps = 10'000;    ///< path slope only
    std::size_t paths = 50;        ///< path slope only
    InitialDatum initial;          ///< path slope only
    unsigned threads = 0;
};

/// Runs one estimator at one step size.
[[nodiscard]] ExponentEstimate estimate_exponent(const ModelParams& p, double dt, ExponentMethod method,
                                                 const EstimatorOptions& opts = {});

/// Continuum exponent that `method` approximates.
[[nodiscard]] double continuum_target(const ModelParams& p, ExponentMethod method);

/// Least-squares fit of log(errors) against log(dts). Requires >= 3 points
/// and strictly positive errors.
[[nodiscard]] ConvergenceFit fit_convergence(std::span<const double> dts, std::span<const double> errors);

/// Estimates the exponent at every step size, then fits
/// |estimate - continuum| ~ C dt^p. Throws PreconditionError if any error is
/// exactly zero (below resolution).
[[nodiscard]] ConvergenceFit sweep_dt(const ModelParams& p, std::span<const double> dts, ExponentMethod method,
                                      const EstimatorOptions& opts = {});

} // namespace mlyap
