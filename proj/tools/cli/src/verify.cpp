#include "verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "mlyap/error.hpp"
#include "mlyap/exponents.hpp"
#include "mlyap/lemmas.hpp"
#include "mlyap/scheme.hpp"
#include "mlyap/stochastics.hpp"

namespace mlyap::cli {

namespace {

std::string fmt(const char* f, double a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Sample mean and its standard error.
struct Mean {
    double sum = 0.0;
    double sum2 = 0.0;
    std::size_t n = 0;

    void add(double x)
    {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    [[nodiscard]] double mean() const { return sum / static_cast<double>(n); }
    [[nodiscard]] double se() const
    {
        const double m = mean();
        const double var = std::max(0.0, sum2 / static_cast<double>(n) - m * m);
        return std::sqrt(var / static_cast<double>(n));
    }
};

constexpr std::array<double, 4> kGammas{0.75, 1.0, 2.0, 10.0};

std::vector<std::pair<ModelParams, double>> lemma_cases()
{
    std::vector<std::pair<ModelParams, double>> cases;
    for (double l : {-5.0, 0.0, 6.0, 8.0})
        for (double e : {0.0, 2.0})
            for (double s : {0.5, 4.0, 8.0})
                for (double dt : {1e-2, 1e-3, 1e-4})
                    if (gamma_dt({l, e, s}, dt) > 0.75)
                        cases.push_back({{l, e, s}, dt});
    return cases;
}

void lemmas_suite(const VerifySettings& s, std::vector<CheckResult>& out)
{
    const std::string suite = "lemmas";
    {
        const auto report = verify_log_sandwich(kGammas, {}, -1e-12, s.threads);
        std::size_t points = 0;
        double worst = INFINITY;
        for (const auto& b : report.bounds) {
            points += b.points;
            worst = std::min(worst, b.worst_margin);
        }
        out.push_back({suite, "sandwich", report.passed(),
                       std::to_string(report.total_violations()) + " violations over " + std::to_string(points) +
                           " points, worst margin " + fmt("%.3e", worst)});
    }
    {
        double worst = 0.0;
        for (double g : {1.0, 2.0, 10.0})
            worst = std::max({worst, std::abs(xi_gamma(g, 1e-12)), std::abs(xi_gamma(g, -1e-12))});
        out.push_back({suite, "xi-continuity", worst < 1e-35, fmt("gamma >= 1: max |xi(+-1e-12)| = %.3e", worst)});
    }
    {
        const auto cases = lemma_cases();
        std::size_t positive = 0;
        double k_fit = 0.0;
        for (const auto& [p, dt] : cases) {
            const double v = xi_expectation(p, dt);
            positive += v > 0.0;
            const double scale = xi_expectation_scale(p, dt);
            if (scale > 0.0)
                k_fit = std::max(k_fit, -v / scale);
        }
        out.push_back({suite, "xi-sign", positive == 0,
                       std::to_string(positive) + " of " + std::to_string(cases.size()) + " expectations positive"});
        out.push_back({suite, "xi-bound", std::isfinite(k_fit), fmt("fitted constant K = %.4g", k_fit)});
    }
    {
        bool threw = false;
        try {
            const std::array<double, 1> x{-1.0 - 1e-9};
            (void)check_log_bound({1.0, LogBoundKind::Upper}, x);
        } catch (const PreconditionError&) {
            threw = true;
        }
        out.push_back({suite, "domain-guard", threw, threw ? "out-of-domain point rejected" : "accepted"});
    }
}

void moments_suite(const VerifySettings& s, std::vector<CheckResult>& out)
{
    const std::string suite = "moments";
    const double dt = s.dt;
    {
        RngStream rng(s.seed, 0);
        std::array<Mean, 3> m;
        const double sd = std::sqrt(dt);
        for (std::size_t i = 0; i < s.samples; ++i) {
            const double b = sd * standard_normal(rng);
            const double b2 = b * b;
            m[0].add(b2);
            m[1].add(b2 * b2);
            m[2].add(b2 * b2 * b2);
        }
        double worst = 0.0;
        for (int k = 0; k < 3; ++k)
            worst = std::max(worst, std::abs(m[k].mean() - gaussian_moment(2 * (k + 1), dt)) / m[k].se());
        out.push_back({suite, "gaussian-ladder", worst <= 4.0, fmt("orders 2,4,6: worst deviation %.2f SE", worst)});
    }
    {
        double worst = 0.0;
        std::uint64_t stream = 1;
        for (double sigma : {s.params.sigma, 2.0})
            for (double h : {dt, 1e-2}) {
                RngStream rng(s.seed, stream++);
                Mean m1, m2;
                for (std::size_t i = 0; i < s.samples; ++i) {
                    const double x = increment_term(sigma, std::sqrt(h) * standard_normal(rng));
                    m1.add(x);
                    m2.add(x * x);
                }
                const auto ref = composite_increment_moments(sigma, h);
                if (m1.se() > 0.0)
                    worst = std::max(worst, std::abs(m1.mean() - ref.mean) / m1.se());
                if (m2.se() > 0.0)
                    worst = std::max(worst, std::abs(m2.mean() - ref.second_moment) / m2.se());
            }
        out.push_back({suite, "composite-increment", worst <= 4.0, fmt("worst deviation %.2f SE", worst)});
    }
    {
        double worst = 0.0;
        for (double sigma : {0.25, 1.0, 4.0, 8.0})
            for (double h : {1e-1, 1e-3, 1e-5}) {
                const auto m = composite_increment_moments(sigma, h);
                const double s2 = sigma * sigma;
                const double mean = (s2 / 2.0) * gaussian_moment(2, h);
                const double second = s2 * gaussian_moment(2, h) + (s2 * s2 / 4.0) * gaussian_moment(4, h);
                worst = std::max({worst, std::abs(m.mean - mean) / mean, std::abs(m.second_moment - second) / second});
            }
        out.push_back({suite, "moment-consistency", worst <= 1e-14, fmt("max relative gap %.2e", worst)});
    }
    {
        double worst = 0.0;
        for (int n = 3; n <= 40; ++n) {
            const auto& rule = gauss_hermite_rule(n);
            double exact = 1.0;
            for (int k = 1; 2 * k <= 2 * n - 2; ++k) {
                exact *= 2 * k - 1;
                const double q = rule.integrate([&](double y) { return std::pow(y, 2 * k); });
                worst = std::max(worst, std::abs(q - exact) / exact);
            }
        }
        out.push_back({suite, "hermite-exactness", worst <= 1e-12, fmt("n = 3..40, max relative error %.2e", worst)});
    }
}

void closedform_suite(const VerifySettings& s, std::vector<CheckResult>& out)
{
    const std::string suite = "closedform";
    const ModelParams& p = s.params;
    {
        const double exact = ms_second_moment_exact(p, s.dt, s.steps, s.initial);
        const auto mc = ms_second_moment_mc(p, s.dt, s.steps, s.initial, s.paths, s.seed, s.threads);
        const double z = mc.std_error > 0.0 ? std::abs(mc.mean - exact) / mc.std_error : 0.0;
        out.push_back({suite, "second-moment", mc.std_error > 0.0 ? z <= 3.0 : mc.mean == exact,
                       fmt("exact %.10g, deviation %.2f SE", exact, z)});
    }
    if (ms_remainder_contraction(p, s.dt) < 1.0) {
        const auto r = ms_remainder(p, s.dt);
        const double lhs = 2.0 * continuum_ms_exponent(p) + r.value;
        const double rhs = 2.0 * ms_exponent_exact(p, s.dt).value;
        const double scale = std::max({std::abs(2.0 * continuum_ms_exponent(p)), std::abs(r.value), std::abs(rhs)});
        const double gap = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
        out.push_back({suite, "remainder-identity", gap <= 1e-10, fmt("relative gap %.2e", gap)});
        out.push_back({suite, "remainder-bound", std::abs(r.value) <= r.bound,
                       fmt("|R| = %.6g, bound %.6g", std::abs(r.value), r.bound)});
    } else {
        out.push_back({suite, "remainder-identity", true, "not applicable: series contraction q >= 1"});
    }
    if (gamma_dt(p, s.dt) > 0.75) {
        try {
            const auto quad = as_exponent_quadrature(p, s.dt, s.nodes);
            out.push_back({suite, "quadrature-doubling", true, fmt("value %.12g", quad.value)});
            const auto mc = as_exponent_mc(p, s.dt, s.samples, s.seed, s.threads);
            const double z = mc.std_error.value() > 0.0 ? std::abs(mc.value - quad.value) / *mc.std_error : 0.0;
            out.push_back({suite, "mc-vs-quadrature", mc.std_error.value() > 0.0 ? z <= 3.0 : mc.value == quad.value,
                           fmt("deviation %.2f SE", z)});
        } catch (const ConvergenceError& e) {
            out.push_back({suite, "quadrature-doubling", false, e.what()});
        }
    } else {
        out.push_back({suite, "quadrature-doubling", true, "not applicable: gamma_dt <= 3/4"});
    }
}

} // namespace

std::vector<CheckResult> run_verify(const VerifySettings& s)
{
    std::vector<CheckResult> out;
    if (s.suite == "lemmas" || s.suite == "all")
        lemmas_suite(s, out);
    if (s.suite == "moments" || s.suite == "all")
        moments_suite(s, out);
    if (s.suite == "closedform" || s.suite == "all")
        closedform_suite(s, out);
    return out;
}

} // namespace mlyap::cli
