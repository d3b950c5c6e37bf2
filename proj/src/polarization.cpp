#include "wvpe/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wvpe/errors.hpp"
#include "wvpe/io.hpp"

namespace wvpe {

namespace {

constexpr double pi = std::numbers::pi;

Complex phase(double angle) { return std::polar(1.0, angle); }

}  // namespace

PolarizationState PolarizationState::normalized(Complex h, Complex v)
{
    const double n = std::sqrt(std::norm(h) + std::norm(v));
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("polarization state: zero or non-finite vector");
    return {h / n, v / n};
}

Complex inner(const PolarizationState& a, const PolarizationState& b)
{
    return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

bool JonesMatrix::finite() const
{
    for (const Complex& z : {hh, hv, vh, vv}) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

JonesMatrix operator*(const JonesMatrix& a, const JonesMatrix& b)
{
    return {a.hh * b.hh + a.hv * b.vh, a.hh * b.hv + a.hv * b.vv,
            a.vh * b.hh + a.vv * b.vh, a.vh * b.hv + a.vv * b.vv};
}

PolarizationState operator*(const JonesMatrix& m, const PolarizationState& s)
{
    return {m.hh * s.h + m.hv * s.v, m.vh * s.h + m.vv * s.v};
}

double unitarity_defect(const JonesMatrix& m)
{
    const JonesMatrix p = m.adjoint() * m;
    return std::max({std::abs(p.hh - 1.0), std::abs(p.hv), std::abs(p.vh), std::abs(p.vv - 1.0)});
}

double distance_up_to_global_phase(const JonesMatrix& a, const JonesMatrix& b)
{
    const Complex ea[] = {a.hh, a.hv, a.vh, a.vv};
    const Complex eb[] = {b.hh, b.hv, b.vh, b.vv};
    std::size_t k = 0;
    for (std::size_t i = 1; i < 4; ++i) {
        if (std::abs(eb[i]) > std::abs(eb[k])) k = i;
    }
    Complex g{1.0, 0.0};
    if (std::abs(ea[k]) > 0.0 && std::abs(eb[k]) > 0.0) {
        g = (ea[k] / std::abs(ea[k])) / (eb[k] / std::abs(eb[k]));
    }
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(ea[i] - g * eb[i]));
    return d;
}

JonesMatrix polarization_observable() { return JonesMatrix::diagonal(1.0, -1.0); }

JonesMatrix OpticalElement::at(double lambda) const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("optical element evaluated at non-positive wavelength");
    }
    return fn_(lambda);
}

OpticalElement OpticalElement::after(const OpticalElement& first) const
{
    return OpticalElement([second = fn_, first = first.fn_](double lambda) { return second(lambda) * first(lambda); });
}

IndexModel IndexModel::constant(double n)
{
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidConfiguration("index model: constant index must be positive");
    return IndexModel("constant " + io::sig9(n), [n](double) { return std::optional<double>(n); });
}

IndexModel IndexModel::table(std::vector<std::pair<double, double>> samples)
{
    if (samples.size() < 2) throw InvalidConfiguration("index table: need at least two samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first)) {
            throw InvalidConfiguration("index table: wavelengths must be strictly increasing");
        }
    }
    auto data = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(samples));
    return IndexModel("table", [data](double lambda) -> std::optional<double> {
        const auto& s = *data;
        if (lambda < s.front().first || lambda > s.back().first) return std::nullopt;
        auto hi = std::lower_bound(s.begin(), s.end(), lambda, [](const auto& p, double v) { return p.first < v; });
        if (hi->first == lambda) return hi->second;
        auto lo = hi - 1;
        const double f = (lambda - lo->first) / (hi->first - lo->first);
        return lo->second + f * (hi->second - lo->second);
    });
}

IndexModel IndexModel::from_csv(const std::filesystem::path& path)
{
    auto model = table(io::read_two_column(path, "wavelength_nm,index"));
    return IndexModel("table " + path.filename().string(), [model](double l) { return model(l); });
}

IndexModel IndexModel::znse_single_pole()
{
    return IndexModel("znse_single_pole", [](double lambda) -> std::optional<double> {
        const double um2 = (lambda * 1e-3) * (lambda * 1e-3);
        if (um2 <= 0.113) return std::nullopt;
        return std::sqrt(4.00 + 1.90 * um2 / (um2 - 0.113));
    });
}

void PlateParams::validate() const
{
    if (!std::isfinite(theta) || !(std::abs(theta) < pi / 2)) {
        throw InvalidConfiguration("plate: |theta| must be below pi/2");
    }
    if (!(n0 > 1.0) || !std::isfinite(n0)) throw InvalidConfiguration("plate: n0 must exceed 1");
    if (!(lambda0_design > 0.0)) throw InvalidConfiguration("plate: design wavelength must be positive");
}

void PostSelectionParams::validate() const
{
    if (!std::isfinite(beta) || std::abs(beta) > pi / 2) {
        throw InvalidConfiguration("postselection: |beta| must not exceed pi/2");
    }
    if (!(spread >= 0.0) || !std::isfinite(spread)) {
        throw InvalidConfiguration("postselection: spread must be >= 0");
    }
}

PolarizationState pre_state()
{
    const double s = std::sin(pi / 4);
    const double c = std::cos(pi / 4);
    return {s, c};
}

PolarizationState post_state(double beta)
{
    const double x = beta / 2 - pi / 4;
    return {std::sin(x), std::cos(x)};
}

OpticalElement retarder(double alpha, double lambda0)
{
    if (!std::isfinite(alpha)) throw DomainError("retarder: alpha must be finite");
    if (!(lambda0 > 0.0)) throw DomainError("retarder: reference wavelength must be positive");
    return OpticalElement([alpha, lambda0](double lambda) {
        const double phi = alpha * lambda0 / lambda;
        return JonesMatrix::diagonal(phase(-phi / 2), phase(phi / 2));
    });
}

OpticalElement retarder(double alpha, double lambda0, IndexModel birefringence)
{
    if (!std::isfinite(alpha)) throw DomainError("retarder: alpha must be finite");
    if (!(lambda0 > 0.0)) throw DomainError("retarder: reference wavelength must be positive");
    const auto dn0 = birefringence(lambda0);
    if (!dn0 || *dn0 == 0.0) throw InvalidConfiguration("retarder: birefringence undefined at reference wavelength");
    return OpticalElement([alpha, lambda0, dn0 = *dn0, birefringence](double lambda) {
        const auto dn = birefringence(lambda);
        if (!dn) throw InvalidConfiguration("retarder: birefringence undefined at " + io::sig9(lambda) + " nm");
        const double phi = alpha * (lambda0 / lambda) * (*dn / dn0);
        return JonesMatrix::diagonal(phase(-phi / 2), phase(phi / 2));
    });
}

namespace {

// 1/sqrt(1 - sin^2(theta)/n0^2) - 1 without cancellation at small theta.
double path_excess(const PlateParams& p)
{
    const double s = std::sin(p.theta) / p.n0;
    return std::expm1(-0.5 * std::log1p(-s * s));
}

}  // namespace

double alpha_from_tilt(const PlateParams& p)
{
    p.validate();
    return pi * path_excess(p);
}

double alpha_from_tilt_approx(const PlateParams& p)
{
    p.validate();
    return pi * p.theta * p.theta / (2 * p.n0 * p.n0);
}

OpticalElement hwp_pair_composed(const PlateParams& p)
{
    p.validate();
    const double design = p.lambda0_design;
    const double tilt_factor = 1.0 + path_excess(p);
    // Upright plate with its slow axis along V, tilted plate crossed with it.
    const OpticalElement upright([design](double lambda) {
        const double g = pi * design / lambda;
        return JonesMatrix::diagonal(phase(g / 2), phase(-g / 2));
    });
    const OpticalElement tilted([design, tilt_factor](double lambda) {
        const double g = pi * design / lambda * tilt_factor;
        return JonesMatrix::diagonal(phase(-g / 2), phase(g / 2));
    });
    return tilted.after(upright);
}

OpticalElement hwp_pair(const PlateParams& p) { return retarder(alpha_from_tilt(p), p.lambda0_design); }

OpticalElement dispersive_slab(double thickness_mm, IndexModel index)
{
    if (!(thickness_mm >= 0.0) || !std::isfinite(thickness_mm)) {
        throw InvalidConfiguration("dispersive slab: thickness must be >= 0");
    }
    const double thickness_nm = thickness_mm * 1e6;
    return OpticalElement([thickness_nm, index](double lambda) {
        const auto n = index(lambda);
        if (!n) {
            throw InvalidConfiguration("dispersive slab: index model '" + index.name() + "' undefined at " +
                                       io::sig9(lambda) + " nm");
        }
        const Complex common = phase(2 * pi * *n * thickness_nm / lambda);
        return JonesMatrix::diagonal(common, common);
    });
}

}  // namespace wvpe
