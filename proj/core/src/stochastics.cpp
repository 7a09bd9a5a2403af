#include "mlyap/stochastics.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "mlyap/error.hpp"

namespace mlyap {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k)
{
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// 53 random bits mapped to the open interval (0, 1).
double to_open_unit(std::uint32_t lo, std::uint32_t hi)
{
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

} // namespace

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key)
{
    counter = philox_round(counter, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
        counter = philox_round(counter, key);
    }
    return counter;
}

std::array<double, 2> RngStream::uniform_pair(std::uint64_t block) const
{
    const PhiloxCounter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                            static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(root_seed_), static_cast<std::uint32_t>(root_seed_ >> 32)};
    const PhiloxCounter out = philox4x32(ctr, key);
    return {to_open_unit(out[0], out[1]), to_open_unit(out[2], out[3])};
}

namespace {

std::array<double, 2> box_muller(const std::array<double, 2>& u)
{
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    return {r * std::cos(angle), r * std::sin(angle)};
}

} // namespace

double RngStream::normal_at(std::uint64_t position) const
{
    const auto pair = box_muller(uniform_pair(position / 2));
    return pair[position % 2];
}

double RngStream::next_normal()
{
    const std::uint64_t block = position_ / 2;
    if (block != cached_block_) {
        cached_ = box_muller(uniform_pair(block));
        cached_block_ = block;
    }
    return cached_[position_++ % 2];
}

// ---------------------------------------------------------------------------
// Gauss-Hermite rules

namespace {

struct HermiteEval {
    double ratio;         // p_n(x) / p_{n-1}(x)
    double log_abs_prev;  // log |p_{n-1}(x)|
};

// Orthonormal probabilists' Hermite recurrence
//   p_{k+1} = (x p_k - sqrt(k) p_{k-1}) / sqrt(k+1),
// rescaled on the fly so that large |x| and n do not overflow.
HermiteEval hermite_eval(int n, double x)
{
    constexpr double kBig = 1e150;
    double prev = 0.0;
    double cur = 1.0;
    double log_scale = 0.0;
    for (int k = 0; k < n; ++k) {
        const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
        prev = cur;
        cur = next;
        if (std::abs(cur) > kBig) {
            prev /= kBig;
            cur /= kBig;
            log_scale += std::log(kBig);
        }
    }
    return {cur / prev, std::log(std::abs(prev)) + log_scale};
}

QuadratureRule build_rule(int n)
{
    // Jacobi matrix: zero diagonal, off-diagonal sqrt(k).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k)
        sub[k - 1] = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("Gauss-Hermite eigenvalue solve failed for n = " + std::to_string(n));
    const Eigen::VectorXd& eig = solver.eigenvalues();

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        double x = eig[i];
        for (int it = 0; it < 8; ++it) {
            const double dx = hermite_eval(n, x).ratio / sqrt_n;
            x -= dx;
            if (std::abs(dx) <= 1e-16 * (1.0 + std::abs(x)))
                break;
        }
        rule.nodes[i] = x;
        // Christoffel weight 1 / sum_k p_k(x)^2 = 1 / (n p_{n-1}(x)^2).
        rule.weights[i] = std::exp(-2.0 * hermite_eval(n, x).log_abs_prev) / n;
    }

    for (int i = 0; i < n / 2; ++i) {
        const int j = n - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;

    // Sum small weights first.
    double total = 0.0;
    for (int i = 0; i < n / 2; ++i)
        total += rule.weights[i] + rule.weights[n - 1 - i];
    if (n % 2 == 1)
        total += rule.weights[n / 2];
    for (double& w : rule.weights)
        w /= total;
    return rule;
}

} // namespace

const QuadratureRule& gauss_hermite_rule(int n)
{
    if (n < kMinHermiteNodes || n > kMaxHermiteNodes)
        throw PreconditionError("Gauss-Hermite node count must lie in [" + std::to_string(kMinHermiteNodes) + ", " +
                                std::to_string(kMaxHermiteNodes) + "], got " + std::to_string(n));
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<const QuadratureRule>(build_rule(n));
    return *slot;
}

} // namespace mlyap
