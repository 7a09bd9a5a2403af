#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mlyap {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A pure function of (counter, key); no hidden state.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

[[nodiscard]] PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// A reproducible stream of standard normal variates addressed by
/// (root_seed, stream_id, position). Two streams with the same triple yield
/// the same numbers; distinct stream ids are independent. Streams are
/// cheap values: copy one per worker, never share a stream mutably.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t root_seed, std::uint64_t stream_id, std::uint64_t position = 0)
        : root_seed_(root_seed), stream_id_(stream_id), position_(position) {}

    [[nodiscard]] std::uint64_t root_seed() const { return root_seed_; }
    [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }
    [[nodiscard]] std::uint64_t position() const { return position_; }

    /// The variate at an arbitrary position; does not move the stream.
    [[nodiscard]] double normal_at(std::uint64_t position) const;

    /// The variate at the current position, then advance by one.
    double next_normal();

    /// Two uniforms in the open interval (0,1) for counter block `block`.
    [[nodiscard]] std::array<double, 2> uniform_pair(std::uint64_t block) const;

private:
    std::uint64_t root_seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t position_ = 0;
    // Box-Muller yields variates in pairs; keep the partner of the last block.
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<double, 2> cached_{};
};

/// Draws a standard normal variate from `stream` and advances it.
inline double standard_normal(RngStream& stream) { return stream.next_normal(); }

/// Nodes and weights for integrals against the standard normal density,
///   sum_i w_i f(x_i) ~ int f(y) phi(y) dy.
struct QuadratureRule {
    std::vector<double> nodes;   ///< ascending, symmetric about 0
    std::vector<double> weights; ///< sum to 1

    [[nodiscard]] std::size_t size() const { return nodes.size(); }

    template <class F>
    [[nodiscard]] double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

inline constexpr int kMinHermiteNodes = 3;
inline constexpr int kMaxHermiteNodes = 1024;

/// Gauss-Hermite rule for the standard normal weight, exact for polynomials
/// of degree <= 2n-1. Rules are computed once per n and cached; the returned
/// reference stays valid for the life of the program.
[[nodiscard]] const QuadratureRule& gauss_hermite_rule(int n);

} // namespace mlyap
