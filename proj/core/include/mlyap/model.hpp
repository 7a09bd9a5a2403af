#pragma once

#include <string_view>
#include <vector>

namespace mlyap {

/// Coefficients of the 2x2 linear system
///   dZ = lambda Z dt + sigma Z dB1 + epsilon J Z dB2,   J = [[0,-1],[1,0]].
struct ModelParams {
    double lambda = 0.0;  ///< drift rate
    double epsilon = 0.0; ///< rotational noise intensity
    double sigma = 0.0;   ///< scalar noise intensity

    /// Throws PreconditionError naming the first non-finite field.
    void validate() const;
};

struct InitialDatum {
    double x0 = 1.0;
    double y0 = 0.0;

    void validate() const;
    /// log|Z_0| = 0.5 * log(x0^2 + y0^2), computed without overflow.
    [[nodiscard]] double log_modulus() const;
    [[nodiscard]] double squared_modulus() const { return x0 * x0 + y0 * y0; }
};

enum class Sense { MeanSquare, AlmostSure };
enum class Behaviour { Stable, BlowUp, Boundary };

struct RegionClass {
    Sense sense = Sense::AlmostSure;
    Behaviour behaviour = Behaviour::Boundary;

    friend bool operator==(const RegionClass&, const RegionClass&) = default;
};

/// Absolute tolerance on the continuum exponent below which a parameter
/// triple is reported as lying on the stability boundary.
inline constexpr double kBoundaryTolerance = 1e-12;

/// lambda + epsilon^2/2 + sigma^2/2: growth rate of [E|Z(t)|^2]^{1/2}.
[[nodiscard]] double continuum_ms_exponent(const ModelParams& p);

/// lambda + epsilon^2/2 - sigma^2/2: almost-sure growth rate of |Z(t)|.
[[nodiscard]] double continuum_as_exponent(const ModelParams& p);

[[nodiscard]] double continuum_exponent(const ModelParams& p, Sense sense);

[[nodiscard]] RegionClass classify(const ModelParams& p, Sense sense);

/// Values of epsilon on the almost-sure boundary lambda + e^2/2 - sigma^2/2 = 0
/// for fixed (lambda, sigma), sorted ascending. Empty when sigma^2 < 2 lambda,
/// a single 0 when sigma^2 == 2 lambda.
[[nodiscard]] std::vector<double> as_boundary_epsilon(double lambda, double sigma);

[[nodiscard]] std::string_view to_string(Sense s);
[[nodiscard]] std::string_view to_string(Behaviour b);

} // namespace mlyap
