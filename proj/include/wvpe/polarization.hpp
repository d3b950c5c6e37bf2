#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wvpe {

using Complex = std::complex<double>;

/// Jones vector in the |H>, |V> basis.
struct PolarizationState {
    Complex h;
    Complex v;

    /// Unit-norm state along (h, v). Throws DomainError for the zero vector.
    static PolarizationState normalized(Complex h, Complex v);

    double norm_squared() const { return std::norm(h) + std::norm(v); }
};

/// <a|b>
Complex inner(const PolarizationState& a, const PolarizationState& b);

/// 2x2 complex matrix, row-major [[hh, hv], [vh, vv]].
struct JonesMatrix {
    Complex hh{1.0, 0.0};
    Complex hv{0.0, 0.0};
    Complex vh{0.0, 0.0};
    Complex vv{1.0, 0.0};

    static JonesMatrix identity() { return {}; }
    static JonesMatrix diagonal(Complex h, Complex v) { return {h, 0.0, 0.0, v}; }

    JonesMatrix adjoint() const { return {std::conj(hh), std::conj(vh), std::conj(hv), std::conj(vv)}; }
    Complex determinant() const { return hh * vv - hv * vh; }
    bool finite() const;
};

JonesMatrix operator*(const JonesMatrix& a, const JonesMatrix& b);
PolarizationState operator*(const JonesMatrix& m, const PolarizationState& s);

/// Largest elementwise deviation of U^dagger U from the identity.
double unitarity_defect(const JonesMatrix& m);

/// max |a - e^{i g} b| with the global phase g chosen from the largest element of b.
double distance_up_to_global_phase(const JonesMatrix& a, const JonesMatrix& b);

/// A = |H><H| - |V><V|
JonesMatrix polarization_observable();

/// Optical element whose Jones matrix depends on wavelength (nm).
class OpticalElement {
public:
    using Fn = std::function<JonesMatrix(double)>;

    explicit OpticalElement(Fn fn) : fn_(std::move(fn)) {}

    /// Throws DomainError for lambda <= 0.
    JonesMatrix at(double lambda) const;

    /// Element equivalent to `first` followed by `*this`.
    OpticalElement after(const OpticalElement& first) const;

private:
    Fn fn_;
};

/// Wavelength -> dimensionless index; nullopt where the model is undefined.
class IndexModel {
public:
    using Fn = std::function<std::optional<double>(double)>;

    IndexModel(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

    static IndexModel constant(double n);
    /// Linear interpolation of (wavelength_nm, index) samples; undefined outside their span.
    static IndexModel table(std::vector<std::pair<double, double>> samples);
    /// Two-column CSV `wavelength_nm,index`.
    static IndexModel from_csv(const std::filesystem::path& path);
    /// Single-pole Sellmeier fit for ZnSe: n^2 = 4.00 + 1.90 L^2 / (L^2 - 0.113), L in um.
    static IndexModel znse_single_pole();

    std::optional<double> operator()(double lambda) const { return fn_(lambda); }
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
    Fn fn_;
};

struct PlateParams {
    double theta = 0.0;             // rad
    double n0 = 1.54;
    double lambda0_design = 808.0;  // nm

    void validate() const;
};

struct PostSelectionParams {
    double beta = 0.0;    // rad
    double spread = 0.0;  // rad

    void validate() const;
};

/// (|H> + |V>)/sqrt(2)
PolarizationState pre_state();

/// sin(beta/2 - pi/4)|H> + cos(beta/2 - pi/4)|V>
PolarizationState post_state(double beta);

/// diag(e^{-i phi/2}, e^{+i phi/2}) with phi(lambda) = alpha * lambda0 / lambda.
OpticalElement retarder(double alpha, double lambda0);

/// As retarder(), with the phase additionally scaled by delta_n(lambda) / delta_n(lambda0).
OpticalElement retarder(double alpha, double lambda0, IndexModel birefringence);

double alpha_from_tilt(const PlateParams& p);
double alpha_from_tilt_approx(const PlateParams& p);

/// Crossed zero-order half-wave plates, the second tilted by p.theta, as an explicit
/// product of the two plate matrices.
OpticalElement hwp_pair_composed(const PlateParams& p);

/// Single thin retarder equivalent to hwp_pair_composed().
OpticalElement hwp_pair(const PlateParams& p);

/// Polarization-independent phase e^{i 2 pi n(lambda) d / lambda}; thickness in mm.
OpticalElement dispersive_slab(double thickness_mm, IndexModel index);

}  // namespace wvpe
