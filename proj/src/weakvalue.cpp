#include "wvpe/weakvalue.hpp"

#include <cmath>
#include <numbers>

#include "wvpe/errors.hpp"
#include "wvpe/polarization.hpp"

namespace wvpe {

namespace {

constexpr double denominator_floor = 1e-14;

void require_not_orthogonal(double alpha, double beta)
{
    if (alpha == 0.0 && beta == 0.0) {
        throw OrthogonalPostselection("alpha = beta = 0: post-selection probability is zero");
    }
}

WeakValue from_ratio(Complex num, Complex den)
{
    if (std::abs(den) <= denominator_floor) {
        throw OrthogonalPostselection("weak value undefined: pre- and post-selected states are orthogonal");
    }
    const Complex w = num / den;
    return {w.real(), w.imag()};
}

}  // namespace

WeakValue weak_value_exact(double alpha, double beta)
{
    const PolarizationState post = post_state(beta);
    const Complex turn = std::polar(1.0, alpha);
    return from_ratio(post.h - turn * post.v, post.h + turn * post.v);
}

WeakValue weak_value_two_state(double alpha, double beta, double x_fraction)
{
    // Forward state after the first x of the plate, backward state after the remaining L - x.
    const OpticalElement before = retarder(alpha * x_fraction, 1.0);
    const OpticalElement remaining = retarder(alpha * (1.0 - x_fraction), 1.0);
    const PolarizationState forward = before.at(1.0) * pre_state();
    const PolarizationState backward = remaining.at(1.0).adjoint() * post_state(beta);
    const PolarizationState a_forward = polarization_observable() * forward;
    return from_ratio(inner(backward, a_forward), inner(backward, forward));
}

WeakValue weak_value_smallangle(double alpha, double beta)
{
    require_not_orthogonal(alpha, beta);
    const Complex w = 1.0 / Complex(beta, -alpha);
    return {w.real(), w.imag()};
}

double im_weak_value_smallangle(double alpha, double beta)
{
    require_not_orthogonal(alpha, beta);
    return alpha / (beta * beta + alpha * alpha);
}

CouplingParams CouplingParams::make(double alpha, double beta, double lambda0, CouplingPairing pairing)
{
    if (!(lambda0 > 0.0)) throw InvalidConfiguration("coupling: lambda0 must be positive");
    const double p0 = 2.0 * std::numbers::pi / lambda0;
    const double k = pairing == CouplingPairing::printed ? alpha / p0 : alpha / (2.0 * p0);
    return {alpha, beta, k, lambda0, pairing};
}

double CouplingParams::im_weak_value() const
{
    const double im = im_weak_value_smallangle(alpha, beta);
    return pairing == CouplingPairing::printed ? im : 2.0 * im;
}

double momentum_shift(const CouplingParams& cp, double delta_p)
{
    return 2.0 * cp.k * delta_p * delta_p * cp.im_weak_value();
}

double wavelength_shift_analytic(double alpha, double beta, const SourceParams& src)
{
    require_not_orthogonal(alpha, beta);
    const double a2 = alpha * alpha;
    return 2.0 * src.delta_lambda * src.delta_lambda * a2 / (src.lambda0 * (beta * beta + a2));
}

double wavelength_shift_slope(double alpha, double beta, const SourceParams& src)
{
    require_not_orthogonal(alpha, beta);
    const double s = beta * beta + alpha * alpha;
    return 2.0 * src.delta_lambda * src.delta_lambda / src.lambda0 * 2.0 * alpha * beta * beta / (s * s);
}

}  // namespace wvpe
