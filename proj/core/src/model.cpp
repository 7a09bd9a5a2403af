#include "mlyap/model.hpp"

#include <cmath>
#include <string>

#include "mlyap/error.hpp"

namespace mlyap {

namespace {

void require_finite(double v, const char* name)
{
    if (!std::isfinite(v))
        throw PreconditionError(std::string(name) + " must be finite");
}

} // namespace

void ModelParams::validate() const
{
    require_finite(lambda, "lambda");
    require_finite(epsilon, "epsilon");
    require_finite(sigma, "sigma");
}

void InitialDatum::validate() const
{
    require_finite(x0, "x0");
    require_finite(y0, "y0");
    if (x0 == 0.0 && y0 == 0.0)
        throw PreconditionError("initial datum (x0, y0) must not be (0, 0)");
}

double InitialDatum::log_modulus() const
{
    return std::log(std::hypot(x0, y0));
}

double continuum_ms_exponent(const ModelParams& p)
{
    return p.lambda + p.epsilon * p.epsilon / 2.0 + p.sigma * p.sigma / 2.0;
}

double continuum_as_exponent(const ModelParams& p)
{
    return p.lambda + p.epsilon * p.epsilon / 2.0 - p.sigma * p.sigma / 2.0;
}

double continuum_exponent(const ModelParams& p, Sense sense)
{
    return sense == Sense::MeanSquare ? continuum_ms_exponent(p) : continuum_as_exponent(p);
}

RegionClass classify(const ModelParams& p, Sense sense)
{
    const double rate = continuum_exponent(p, sense);
    Behaviour b = Behaviour::Boundary;
    if (rate < -kBoundaryTolerance)
        b = Behaviour::Stable;
    else if (rate > kBoundaryTolerance)
        b = Behaviour::BlowUp;
    return {sense, b};
}

std::vector<double> as_boundary_epsilon(double lambda, double sigma)
{
    const double disc = sigma * sigma - 2.0 * lambda;
    if (disc < 0.0)
        return {};
    if (disc == 0.0)
        return {0.0};
    const double e = std::sqrt(disc);
    return {-e, e};
}

std::string_view to_string(Sense s)
{
    return s == Sense::MeanSquare ? "mean-square" : "almost-sure";
}

std::string_view to_string(Behaviour b)
{
    switch (b) {
    case Behaviour::Stable: return "stable";
    case Behaviour::BlowUp: return "blow-up";
    case Behaviour::Boundary: return "boundary";
    }
    return "unknown";
}

} // namespace mlyap
