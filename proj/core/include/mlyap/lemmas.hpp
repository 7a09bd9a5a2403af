#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlyap/model.hpp"

namespace mlyap {

enum class LogBoundKind {
    Upper, ///< valid for x > -gamma
    Lower, ///< valid for x > -2 gamma / 3
};

struct LogBoundDomain {
    double gamma = 1.0;
    LogBoundKind kind = LogBoundKind::Upper;

    /// Open left endpoint of the domain: -gamma or -2 gamma / 3.
    [[nodiscard]] double left_endpoint() const;
    [[nodiscard]] bool contains(double x) const { return x > left_endpoint(); }
};

/// Correction term of the lower log bound:
///   -x^4 / (4 gamma^4)   for x >= 0,
///    9 x^3 / gamma^3     for -2 gamma / 3 < x < 0.
[[nodiscard]] double xi_gamma(double gamma, double x);

/// log gamma + x/gamma - x^2/(2 gamma^2) + x^3/(3 gamma^3); >= log(gamma + x)
/// for x > -gamma.
[[nodiscard]] double log_upper_surrogate(double gamma, double x);

/// log gamma + x/gamma - x^2/(2 gamma^2) + xi_gamma(x); <= log(gamma + x)
/// for x > -2 gamma / 3.
[[nodiscard]] double log_lower_surrogate(double gamma, double x);

struct SandwichGrid {
    std::size_t points_per_bound = 100'000;
    double right_extent = 10.0; ///< grid reaches x = right_extent * gamma
    double closest_approach = 1e-12; ///< nearest relative distance to the open endpoint and to 0
};

/// Grid points for one bound: log-spaced clusters at the left endpoint and
/// on both sides of 0, plus uniform interior coverage and x = 0 itself.
[[nodiscard]] std::vector<double> sandwich_grid(const LogBoundDomain& domain, const SandwichGrid& grid);

struct SandwichBoundResult {
    LogBoundDomain domain;
    std::size_t points = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0; ///< min over the grid of the signed margin
    double worst_x = 0.0;
};

struct SandwichReport {
    double tolerance = -1e-12;
    std::vector<SandwichBoundResult> bounds;

    [[nodiscard]] std::size_t total_violations() const;
    [[nodiscard]] bool passed() const { return total_violations() == 0; }
};

/// Evaluates lower <= log(gamma + x) <= upper on explicit points. Margins
/// are upper - log and log - lower; a margin below `tolerance` is a
/// violation. Points outside a bound's domain throw PreconditionError.
[[nodiscard]] SandwichBoundResult check_log_bound(const LogBoundDomain& domain, std::span<const double> xs,
                                                  double tolerance = -1e-12, unsigned threads = 0);

/// Runs check_log_bound for both bounds at every gamma on sandwich_grid.
[[nodiscard]] SandwichReport verify_log_sandwich(std::span<const double> gammas, const SandwichGrid& grid = {},
                                                 double tolerance = -1e-12, unsigned threads = 0);

/// E[dB^order] for dB ~ N(0, dt): 0 for odd order, (order-1)!! dt^(order/2)
/// for even order. Requires order >= 1 and dt > 0.
[[nodiscard]] double gaussian_moment(int order, double dt);

struct IncrementMoments {
    double mean = 0.0;          ///< E[sigma dB + (sigma^2/2) dB^2] = sigma^2 dt / 2
    double second_moment = 0.0; ///< sigma^2 dt + 3 sigma^4 dt^2 / 4
};

[[nodiscard]] IncrementMoments composite_increment_moments(double sigma, double dt);

/// E[xi_{gamma_dt}(sigma dB + (sigma^2/2) dB^2)]. The integrand is a
/// polynomial in y = dB / sqrt(dt) on each side of the sign changes of the
/// argument (y = 0 and y = -2 / (sigma sqrt(dt))), so each piece is
/// integrated exactly against the normal density. Requires gamma_dt > 3/4.
[[nodiscard]] double xi_expectation(const ModelParams& p, double dt);

/// |sigma sqrt(dt)|^3 / gamma^3 + |sigma sqrt(dt)|^4 / gamma^4, the shape of
/// the lower bound on xi_expectation.
[[nodiscard]] double xi_expectation_scale(const ModelParams& p, double dt);

} // namespace mlyap
