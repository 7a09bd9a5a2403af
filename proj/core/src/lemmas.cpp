#include "mlyap/lemmas.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mlyap/error.hpp"
#include "mlyap/parallel.hpp"
#include "mlyap/scheme.hpp"

namespace mlyap {

double LogBoundDomain::left_endpoint() const
{
    return kind == LogBoundKind::Upper ? -gamma : -2.0 * gamma / 3.0;
}

namespace {

void require_gamma(double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw PreconditionError("gamma must be positive and finite");
}

double quadratic_part(double gamma, double x)
{
    return std::log(gamma) + x / gamma - x * x / (2.0 * gamma * gamma);
}

} // namespace

double xi_gamma(double gamma, double x)
{
    require_gamma(gamma);
    if (!(x > -2.0 * gamma / 3.0))
        throw PreconditionError("xi_gamma: x must exceed -2 gamma / 3");
    const double r = x / gamma;
    if (x >= 0.0)
        return -(r * r) * (r * r) / 4.0;
    return 9.0 * r * r * r;
}

double log_upper_surrogate(double gamma, double x)
{
    require_gamma(gamma);
    if (!(x > -gamma))
        throw PreconditionError("log_upper_surrogate: x must exceed -gamma");
    return quadratic_part(gamma, x) + x * x * x / (3.0 * gamma * gamma * gamma);
}

double log_lower_surrogate(double gamma, double x)
{
    return quadratic_part(gamma, x) + xi_gamma(gamma, x);
}

// ---------------------------------------------------------------------------
// Grid verification

std::vector<double> sandwich_grid(const LogBoundDomain& domain, const SandwichGrid& grid)
{
    require_gamma(domain.gamma);
    const double g = domain.gamma;
    const double left = domain.left_endpoint();
    const double right = grid.right_extent * g;
    const std::size_t n = std::max<std::size_t>(grid.points_per_bound, 8);
    const std::size_t cluster = n / 4;
    const double lo_exp = std::log10(grid.closest_approach);
    const double half_left_exp = std::log10(std::abs(left) / (2.0 * g));

    std::vector<double> xs;
    xs.reserve(n);
    auto log_cluster = [&](double e0, double e1, auto&& place) {
        for (std::size_t i = 0; i < cluster; ++i) {
            const double e = e0 + (e1 - e0) * static_cast<double>(i) / static_cast<double>(cluster - 1);
            xs.push_back(place(g * std::pow(10.0, e)));
        }
    };
    log_cluster(lo_exp, half_left_exp, [&](double d) { return left + d; });
    log_cluster(lo_exp, half_left_exp, [](double d) { return -d; });
    log_cluster(lo_exp, std::log10(grid.right_extent), [](double d) { return d; });
    xs.push_back(0.0);
    const std::size_t uniform = n - xs.size();
    for (std::size_t i = 1; i <= uniform; ++i)
        xs.push_back(left + (right - left) * static_cast<double>(i) / static_cast<double>(uniform + 1));
    std::sort(xs.begin(), xs.end());
    return xs;
}

SandwichBoundResult check_log_bound(const LogBoundDomain& domain, std::span<const double> xs, double tolerance,
                                    unsigned threads)
{
    require_gamma(domain.gamma);
    for (double x : xs) {
        if (!domain.contains(x))
            throw PreconditionError("check_log_bound: point " + std::to_string(x) + " outside the bound's domain");
    }

    constexpr std::size_t kChunk = 8192;
    const std::size_t chunks = (xs.size() + kChunk - 1) / kChunk;
    std::vector<SandwichBoundResult> partial(chunks);
    const double g = domain.gamma;
    parallel_for(chunks, threads, [&](std::size_t c) {
        SandwichBoundResult r;
        r.worst_margin = INFINITY;
        const std::size_t end = std::min(xs.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            const double x = xs[i];
            const double exact = std::log(g + x);
            const double margin = domain.kind == LogBoundKind::Upper ? log_upper_surrogate(g, x) - exact
                                                                     : exact - log_lower_surrogate(g, x);
            if (margin < tolerance)
                ++r.violations;
            if (margin < r.worst_margin) {
                r.worst_margin = margin;
                r.worst_x = x;
            }
            ++r.points;
        }
        partial[c] = r;
    });

    SandwichBoundResult out;
    out.domain = domain;
    out.worst_margin = INFINITY;
    for (const auto& r : partial) {
        out.points += r.points;
        out.violations += r.violations;
        if (r.worst_margin < out.worst_margin) {
            out.worst_margin = r.worst_margin;
            out.worst_x = r.worst_x;
        }
    }
    return out;
}

std::size_t SandwichReport::total_violations() const
{
    std::size_t n = 0;
    for (const auto& b : bounds)
        n += b.violations;
    return n;
}

SandwichReport verify_log_sandwich(std::span<const double> gammas, const SandwichGrid& grid, double tolerance,
                                   unsigned threads)
{
    SandwichReport report;
    report.tolerance = tolerance;
    for (double g : gammas) {
        for (auto kind : {LogBoundKind::Upper, LogBoundKind::Lower}) {
            const LogBoundDomain domain{g, kind};
            const auto xs = sandwich_grid(domain, grid);
            report.bounds.push_back(check_log_bound(domain, xs, tolerance, threads));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Moments

double gaussian_moment(int order, double dt)
{
    if (order < 1)
        throw PreconditionError("gaussian_moment: order must be >= 1");
    if (!(dt > 0.0))
        throw PreconditionError("gaussian_moment: dt must be positive");
    if (order % 2 == 1)
        return 0.0;
    double double_factorial = 1.0;
    for (int k = order - 1; k > 1; k -= 2)
        double_factorial *= k;
    return double_factorial * std::pow(dt, order / 2);
}

IncrementMoments composite_increment_moments(double sigma, double dt)
{
    if (!(dt > 0.0))
        throw PreconditionError("composite_increment_moments: dt must be positive");
    const double s2 = sigma * sigma;
    return {s2 * dt / 2.0, s2 * dt + 0.75 * s2 * s2 * dt * dt};
}

// ---------------------------------------------------------------------------
// E[xi(sigma dB + sigma^2 dB^2 / 2)]

namespace {

constexpr int kMaxDegree = 8;
using MomentTable = std::array<double, kMaxDegree + 1>;

double normal_pdf(double y)
{
    return std::isinf(y) ? 0.0 : std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double y)
{
    return 0.5 * std::erfc(-y / std::numbers::sqrt2);
}

// T_k = int_lo^hi y^k phi(y) dy for k = 0..8, via
//   T_k = lo^(k-1) phi(lo) - hi^(k-1) phi(hi) + (k-1) T_{k-2}.
MomentTable truncated_moments(double lo, double hi)
{
    const double plo = normal_pdf(lo);
    const double phi = normal_pdf(hi);
    auto edge = [](double y, double pdf, int power) { return pdf == 0.0 ? 0.0 : std::pow(y, power) * pdf; };
    MomentTable t{};
    t[0] = normal_cdf(hi) - normal_cdf(lo);
    t[1] = plo - phi;
    for (int k = 2; k <= kMaxDegree; ++k)
        t[k] = edge(lo, plo, k - 1) - edge(hi, phi, k - 1) + (k - 1) * t[k - 2];
    return t;
}

// int (a y + b y^2)^power phi(y) dy over the interval described by `t`.
double power_integral(double a, double b, int power, const MomentTable& t)
{
    double sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= power; ++k) {
        sum += binom * std::pow(a, power - k) * std::pow(b, k) * t[power + k];
        binom = binom * (power - k) / (k + 1);
    }
    return sum;
}

} // namespace

double xi_expectation(const ModelParams& p, double dt)
{
    p.validate();
    if (!(dt > 0.0 && dt < 1.0))
        throw PreconditionError("xi_expectation: dt must satisfy 0 < dt < 1");
    const double gamma = gamma_dt(p, dt);
    if (!(gamma > 0.75))
        throw PreconditionError("xi_expectation: requires gamma_dt > 3/4");
    // y -> -y leaves N(0,1) invariant, so the sign of sigma does not matter.
    const double a = std::abs(p.sigma) * std::sqrt(dt);
    if (a == 0.0)
        return 0.0;
    const double b = a * a / 2.0;
    const double root = -2.0 / a; // a y + b y^2 < 0 exactly on (root, 0)

    const MomentTable negative = truncated_moments(root, 0.0);
    const MomentTable left_tail = truncated_moments(-INFINITY, root);
    const MomentTable right_tail = truncated_moments(0.0, INFINITY);

    const double g3 = gamma * gamma * gamma;
    const double g4 = g3 * gamma;
    const double cubic = 9.0 / g3 * power_integral(a, b, 3, negative);
    const double quartic = -(power_integral(a, b, 4, left_tail) + power_integral(a, b, 4, right_tail)) / (4.0 * g4);
    return cubic + quartic;
}

double xi_expectation_scale(const ModelParams& p, double dt)
{
    const double gamma = gamma_dt(p, dt);
    const double r = std::abs(p.sigma) * std::sqrt(dt) / gamma;
    return r * r * r + r * r * r * r;
}

} // namespace mlyap
