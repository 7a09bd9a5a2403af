// Acceptance suite: one PASS/FAIL line per criterion.
//
//   mlyap_acceptance            run all criteria
//   mlyap_acceptance c03 c07    run a subset
//
// Exit status is 0 iff every selected criterion passed.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mlyap/cli/cli.hpp"
#include "mlyap/exponents.hpp"
#include "mlyap/lemmas.hpp"
#include "mlyap/scheme.hpp"

using namespace mlyap;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kMsOrderLo = 0.9;
constexpr double kMsOrderHi = 1.1;
constexpr double kMsResidualMax = 0.05; // decades
constexpr double kAsOrderMin = 0.45;
constexpr double kSigmaBand = 3.0; // standard errors
constexpr double kDoublingRel = 1e-10;
constexpr double kSandwichTol = -1e-12;
constexpr double kXiOrderMin = 1.4;
constexpr double kThetaReductionRel = 1e-12;
constexpr double kIdentityRel = 1e-10;
constexpr double kContractionMax = 0.5;

const std::vector<double> kSweepDts{1e-2, 1e-3, 1e-4, 1e-5};

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    const char* id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome c01_ms_sharpness()
{
    const auto fit = sweep_dt({8, 2, 4}, kSweepDts, ExponentMethod::MsExact);
    const bool ok = fit.order_p >= kMsOrderLo && fit.order_p <= kMsOrderHi && fit.residual < kMsResidualMax;
    return {ok, fmt("order %.4f in [%.1f, %.1f], residual %.4f decades < %.2f", fit.order_p, kMsOrderLo, kMsOrderHi,
                    fit.residual, kMsResidualMax)};
}

Outcome c02_as_sharpness()
{
    bool ok = true;
    std::string detail;
    for (const ModelParams p : {ModelParams{6, 0.5, 4}, ModelParams{8, 2, 4}}) {
        EstimatorOptions eo;
        eo.nodes = 201;
        const auto fit = sweep_dt(p, kSweepDts, ExponentMethod::AsQuadrature, eo);
        ok = ok && fit.order_p >= kAsOrderMin;
        detail += fmt("(%g,%g,%g) order %.4f; ", p.lambda, p.epsilon, p.sigma, fit.order_p);
    }
    return {ok, detail + fmt("required >= %.2f", kAsOrderMin)};
}

Outcome c03_oracle_triangle()
{
    std::mt19937_64 gen(20240301);
    std::uniform_real_distribution<double> lam(-10, 10), noise(-6, 6);
    constexpr double dt = 1e-3;
    bool ok = true;
    double worst_z = 0.0;
    double worst_doubling = 0.0;
    int done = 0;
    while (done < 10) {
        const ModelParams p{lam(gen), noise(gen), noise(gen)};
        if (!(gamma_dt(p, dt) > 0.9))
            continue;
        ++done;
        const double quad = as_exponent_quadrature(p, dt, 201).value;
        const double quad2 = as_exponent_quadrature(p, dt, 402).value;
        const auto mc = as_exponent_mc(p, dt, 1'000'000, 1000 + static_cast<std::uint64_t>(done));
        const double z = std::abs(mc.value - quad) / *mc.std_error;
        const double rel = std::abs(quad2 - quad) / std::abs(quad2);
        worst_z = std::max(worst_z, z);
        worst_doubling = std::max(worst_doubling, rel);
        ok = ok && z <= kSigmaBand && rel <= kDoublingRel;
    }
    return {ok, fmt("10 triples: worst MC deviation %.2f SE (<= %.0f), worst 201/402-node gap %.2e (<= %.0e)", worst_z,
                    kSigmaBand, worst_doubling, kDoublingRel)};
}

Outcome c04_second_moment()
{
    const ModelParams p{8, 2, 4};
    const InitialDatum z0{1.0, 0.0};
    const double exact = ms_second_moment_exact(p, 1e-3, 10, z0);
    const auto mc = ms_second_moment_mc(p, 1e-3, 10, z0, 100'000, 4);
    const double z = std::abs(mc.mean - exact) / mc.std_error;
    return {z <= kSigmaBand,
            fmt("exact %.10f, MC %.10f +- %.2e, deviation %.2f SE", exact, mc.mean, mc.std_error, z)};
}

Outcome c05_sandwich()
{
    const std::array<double, 4> gammas{0.75, 1.0, 2.0, 10.0};
    SandwichGrid grid;
    grid.points_per_bound = 100'000;
    const auto report = verify_log_sandwich(gammas, grid, kSandwichTol);
    double worst = INFINITY;
    std::size_t points = 0;
    for (const auto& b : report.bounds) {
        worst = std::min(worst, b.worst_margin);
        points += b.points;
    }
    return {report.passed(), fmt("%zu violations over %zu points, worst margin %.3e (tolerance %.0e)",
                                 report.total_violations(), points, worst, kSandwichTol)};
}

Outcome c06_xi_order()
{
    std::vector<double> dts;
    for (double dt = 1e-2; dt > 1e-4 * (1 + 1e-9); dt /= 2.0)
        dts.push_back(dt);
    dts.push_back(1e-4);
    std::vector<double> mags;
    for (double dt : dts)
        mags.push_back(std::abs(xi_expectation({8, 2, 4}, dt)));
    const auto fit = fit_convergence(dts, mags);
    return {fit.order_p >= kXiOrderMin,
            fmt("%zu step sizes 1e-2..1e-4: order %.4f, required >= %.1f", dts.size(), fit.order_p, kXiOrderMin)};
}

Outcome c07_figures()
{
    const std::array<ModelParams, 8> triples{ModelParams{7, 2, 4},   ModelParams{8, 2, 4},   ModelParams{30, 6, 8},
                                             ModelParams{2, -10, 8}, ModelParams{0.2, 3.5, 4}, ModelParams{6, 0.5, 4},
                                             ModelParams{6, 0.5, 8}, ModelParams{0.5, 4, 8}};
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 10'000;
    cfg.seed = 42;
    bool ok = true;
    std::string detail;
    double worst_z = 0.0;
    for (const ModelParams& p : triples) {
        const auto paths = simulate_paths(p, cfg, 50);
        const auto slope = as_exponent_path_slope(paths);
        const double quad = as_exponent_quadrature(p, cfg.dt).value;
        const bool blow_up = classify(p, Sense::AlmostSure).behaviour == Behaviour::BlowUp;
        const bool sign_ok = blow_up ? slope.value > 0.0 : slope.value < 0.0;
        const double z = std::abs(slope.value - quad) / *slope.std_error;
        worst_z = std::max(worst_z, z);
        ok = ok && sign_ok && z <= kSigmaBand;
        if (!sign_ok || z > kSigmaBand)
            detail += fmt("(%g,%g,%g) slope %.4f quad %.4f z %.2f; ", p.lambda, p.epsilon, p.sigma, slope.value, quad, z);
    }
    return {ok, detail + fmt("8 triples, signs %s, worst deviation %.2f SE", ok ? "match" : "checked", worst_z)};
}

Outcome c08_theta()
{
    bool ok = true;
    std::string detail;

    bool identical = true;
    for (const ModelParams p : {ModelParams{6, 0, 4}, ModelParams{8, 0, 4}, ModelParams{-2, 0, 1}}) {
        SchemeConfig ex;
        ex.n_steps = 10'000;
        ex.seed = 42;
        SchemeConfig th = ex;
        th.theta = 0.0;
        const auto a = simulate_paths(p, ex, 8);
        const auto b = simulate_paths(p, th, 8);
        for (std::size_t i = 0; i < a.size(); ++i)
            identical = identical && a[i].log_values == b[i].log_values;
    }
    ok = ok && identical;
    detail += identical ? "theta=0 paths bit-identical; " : "theta=0 paths DIFFER; ";

    double worst = 0.0;
    for (const ModelParams p : {ModelParams{6, 0, 4}, ModelParams{8, 0, 4}, ModelParams{-2, 0, 1}})
        for (double dt : kSweepDts) {
            const double a = theta_ms_exponent(p, 0.0, dt).value;
            const double b = ms_exponent_exact(p, dt).value;
            worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
    ok = ok && worst <= kThetaReductionRel;
    detail += fmt("ms reduction gap %.2e; ", worst);

    const ModelParams p{6, 0, 4};
    for (double theta : {0.5, 1.0}) {
        EstimatorOptions eo;
        eo.theta = theta;
        const auto as = sweep_dt(p, kSweepDts, ExponentMethod::ThetaAsQuadrature, eo);
        const auto ms = sweep_dt(p, kSweepDts, ExponentMethod::ThetaMsExact, eo);
        ok = ok && as.order_p >= kAsOrderMin && ms.order_p >= kMsOrderLo && ms.order_p <= kMsOrderHi;
        detail += fmt("theta %.1f: a.s. order %.4f, m.s. order %.4f; ", theta, as.order_p, ms.order_p);
    }
    return {ok, detail};
}

Outcome c09_remainder()
{
    std::mt19937_64 gen(9090);
    std::uniform_real_distribution<double> lam(-10, 10), noise(-5, 5), ldt(-6, -1);
    int tested = 0;
    double worst = 0.0;
    bool bound_ok = true;
    while (tested < 100) {
        const ModelParams p{lam(gen), noise(gen), noise(gen)};
        const double dt = std::pow(10.0, ldt(gen));
        if (ms_remainder_contraction(p, dt) >= kContractionMax)
            continue;
        ++tested;
        const auto r = ms_remainder(p, dt);
        const double lhs = 2.0 * continuum_ms_exponent(p) + r.value;
        const double rhs = 2.0 * ms_exponent_exact(p, dt).value;
        const double scale = std::max({std::abs(2.0 * continuum_ms_exponent(p)), std::abs(r.value), std::abs(rhs)});
        if (scale > 0.0)
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        bound_ok = bound_ok && std::abs(r.value) <= r.bound;
    }
    return {worst <= kIdentityRel && bound_ok,
            fmt("100 cases: identity gap %.2e (<= %.0e), bound %s", worst, kIdentityRel, bound_ok ? "holds" : "VIOLATED")};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome c10_reproducibility()
{
    const fs::path dir = fs::temp_directory_path() / fmt("mlyap_acceptance_%lld",
                                                         static_cast<long long>(std::chrono::steady_clock::now()
                                                                                    .time_since_epoch()
                                                                                    .count()));
    fs::create_directories(dir);
    std::ostringstream sink;
    bool ok = true;
    int files = 0;
    auto run_variants = [&](const std::vector<std::string>& base, const char* stem, bool with_fit) {
        std::string reference, reference_fit;
        for (int rep = 0; rep < 2; ++rep)
            for (const char* threads : {"1", "4", "8"}) {
                const fs::path out = dir / fmt("%s_%s_%d.csv", stem, threads, rep);
                std::vector<std::string> args = base;
                args.insert(args.end(), {"--threads", threads, "--out", out.string()});
                if (cli::run(args, sink, sink) != 0) {
                    ok = false;
                    continue;
                }
                const std::string body = slurp(out);
                const std::string fit = with_fit ? slurp(out.string() + ".fit.json") : std::string{};
                ++files;
                if (reference.empty()) {
                    reference = body;
                    reference_fit = fit;
                }
                ok = ok && !body.empty() && body == reference && fit == reference_fit;
            }
    };
    run_variants({"simulate", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--seed", "42"}, "simulate", false);
    run_variants({"sweep-dt", "--lambda", "8", "--epsilon", "2", "--sigma", "4", "--method", "as-mc", "--samples",
                  "1000000", "--seed", "42", "--dts", "1e-2,1e-3,1e-4"},
                 "sweep_mc", true);
    run_variants({"sweep-dt", "--lambda", "6", "--epsilon", "0.5", "--sigma", "4"}, "sweep_quad", true);
    fs::remove_all(dir);
    return {ok, fmt("%d outputs (simulate, sweep-dt as-mc, sweep-dt as-quadrature) x threads {1,4,8} x 2 runs %s",
                    files, ok ? "byte-identical" : "DIFFER")};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {"c01", "mean-square sharpness", 1.0, c01_ms_sharpness},
        {"c02", "almost-sure sharpness", 1.0, c02_as_sharpness},
        {"c03", "oracle triangle", 30.0, c03_oracle_triangle},
        {"c04", "closed-form second moment", 10.0, c04_second_moment},
        {"c05", "log sandwich", 5.0, c05_sandwich},
        {"c06", "xi expectation order", 5.0, c06_xi_order},
        {"c07", "figure 1/2 reproduction", 30.0, c07_figures},
        {"c08", "theta-scheme reduction", 20.0, c08_theta},
        {"c09", "remainder identity and bound", 1.0, c09_remainder},
        {"c10", "reproducibility", 30.0, c10_reproducibility},
    };

    std::vector<std::string> selected(argv + 1, argv + argc);
    for (const auto& s : selected) {
        if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return s == c.id; })) {
            std::cerr << "unknown criterion '" << s << "'\n";
            return 2;
        }
    }

    int failed = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = secs <= c.budget_s;
        const bool passed = o.passed && in_budget;
        failed += !passed;
        std::cout << (passed ? "PASS " : "FAIL ") << c.id << "  " << c.title << ": " << o.detail
                  << fmt(" [%.2f s, budget %.0f s%s]", secs, c.budget_s, in_budget ? "" : ", OVER BUDGET") << '\n';
        std::cout.flush();
    }
    return failed == 0 ? 0 : 1;
}
