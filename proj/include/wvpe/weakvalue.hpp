#pragma once

#include "wvpe/spectral.hpp"

namespace wvpe {

struct WeakValue {
    double re;
    double im;
};

/// <phi_post(beta)| A U(alpha)|psi_pre> / <phi_post(beta)| U(alpha) |psi_pre>, in the
/// pole-free form (s - e^{i alpha} c) / (s + e^{i alpha} c) with s, c the post-state
/// components. Throws OrthogonalPostselection when the denominator vanishes.
WeakValue weak_value_exact(double alpha, double beta);

/// Same weak value assembled from the two-state vector at a point a fraction
/// `x_fraction` of the way through the plate. Independent of x_fraction.
WeakValue weak_value_two_state(double alpha, double beta, double x_fraction);

/// Small-angle form 1 / (beta - i alpha).
WeakValue weak_value_smallangle(double alpha, double beta);

/// Im A_w ~ alpha / (beta^2 + alpha^2).
double im_weak_value_smallangle(double alpha, double beta);

/// Which (coupling, imaginary weak value) pairing feeds the pointer-shift formula.
/// Both give the same momentum shift.
enum class CouplingPairing {
    // k = alpha / P0 with Im A_w = alpha / (beta^2 + alpha^2).
    printed,
    // k = alpha / (2 P0) with Im A_w = 2 alpha / (beta^2 + alpha^2), the first-order
    // expansion of the exact weak value for a plate of relative phase alpha.
    jones,
};

struct CouplingParams {
    double alpha;    // rad
    double beta;     // rad
    double k;        // nm/rad
    double lambda0;  // nm
    CouplingPairing pairing = CouplingPairing::printed;

    static CouplingParams make(double alpha, double beta, double lambda0,
                               CouplingPairing pairing = CouplingPairing::printed);

    /// The imaginary weak value this pairing uses.
    double im_weak_value() const;
};

/// dP = 2 k dP^2 Im A_w, rad/nm.
double momentum_shift(const CouplingParams& cp, double delta_p);

/// dl = 2 dl^2 alpha^2 / (lambda0 (beta^2 + alpha^2)), nm (magnitude).
double wavelength_shift_analytic(double alpha, double beta, const SourceParams& src);

/// d(dl)/d(alpha) of wavelength_shift_analytic.
double wavelength_shift_slope(double alpha, double beta, const SourceParams& src);

}  // namespace wvpe
