#include "wvpe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wvpe/errors.hpp"
#include "wvpe/io.hpp"

namespace wvpe {

WavelengthGrid::WavelengthGrid(double start, double step, std::size_t count)
    : start_(start), step_(step), count_(count)
{
    if (!std::isfinite(start) || !std::isfinite(step) || step <= 0.0) {
        throw InvalidConfiguration("wavelength grid: step must be positive and finite");
    }
    if (count < 2) throw InvalidConfiguration("wavelength grid: need at least two points");
}

WavelengthGrid WavelengthGrid::spanning(double start, double stop, double step)
{
    if (!(stop > start)) throw InvalidConfiguration("wavelength grid: stop must exceed start");
    if (!(step > 0.0)) throw InvalidConfiguration("wavelength grid: step must be positive and finite");
    const auto count = static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
    return WavelengthGrid(start, step, count);
}

void SourceParams::validate() const
{
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
        throw InvalidConfiguration("source: lambda0 must be positive");
    }
    if (!(delta_lambda > 0.0) || !(delta_lambda < lambda0)) {
        throw InvalidConfiguration("source: delta_lambda must satisfy 0 < delta_lambda < lambda0");
    }
}

Spectrum::Spectrum(WavelengthGrid grid, std::vector<double> density)
    : grid_(grid), density_(std::move(density))
{
    if (density_.size() != grid_.size()) {
        throw InvalidConfiguration("spectrum: density length does not match grid");
    }
    for (double v : density_) {
        if (!std::isfinite(v) || v < 0.0) throw InvalidConfiguration("spectrum: density must be finite and >= 0");
    }
}

double trapezoid(std::span<const double> values, double step)
{
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * step;
}

double Spectrum::integral() const { return trapezoid(density_, grid_.step()); }

Spectrum Spectrum::normalized() const
{
    const double total = integral();
    if (!(total > 0.0)) throw DegenerateSpectrum("spectrum has zero total intensity");
    return scaled(1.0 / total);
}

Spectrum Spectrum::scaled(double factor) const
{
    std::vector<double> out(density_);
    for (double& v : out) v *= factor;
    return Spectrum(grid_, std::move(out));
}

double Spectrum::value_at(double lambda) const
{
    const double t = (lambda - grid_.start()) / grid_.step();
    const double last = static_cast<double>(grid_.size() - 1);
    if (!(t >= 0.0) || t > last) return 0.0;
    const auto i = static_cast<std::size_t>(t);
    if (i + 1 >= grid_.size()) return density_.back();
    const double f = t - static_cast<double>(i);
    return density_[i] + f * (density_[i + 1] - density_[i]);
}

Spectrum Spectrum::translated(double d) const
{
    std::vector<double> out(grid_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value_at(grid_.at(i) - d);
    return Spectrum(grid_, std::move(out));
}

Spectrum Spectrum::resampled(const WavelengthGrid& target) const
{
    if (target == grid_) return *this;
    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value_at(target.at(i));
    return Spectrum(target, std::move(out));
}

Spectrum gaussian_spectrum(const SourceParams& params, const WavelengthGrid& grid)
{
    params.validate();
    const double lo = params.lambda0 - 5.0 * params.delta_lambda;
    const double hi = params.lambda0 + 5.0 * params.delta_lambda;
    if (grid.stop() < lo || grid.start() > hi) {
        throw InvalidConfiguration("gaussian spectrum: grid lies entirely outside lambda0 +- 5 delta_lambda");
    }
    std::vector<double> density(grid.size());
    const double norm = 1.0 / (params.delta_lambda * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < density.size(); ++i) {
        const double z = (grid.at(i) - params.lambda0) / params.delta_lambda;
        density[i] = norm * std::exp(-0.5 * z * z);
    }
    return Spectrum(grid, std::move(density)).normalized();
}

std::optional<std::string> coverage_warning(const SourceParams& params, const WavelengthGrid& grid)
{
    const double lo = params.lambda0 - 2.5 * params.delta_lambda;
    const double hi = params.lambda0 + 2.5 * params.delta_lambda;
    if (grid.start() <= lo && grid.stop() >= hi) return std::nullopt;
    std::ostringstream msg;
    msg << "grid [" << grid.start() << ", " << grid.stop() << "] nm does not cover lambda0 +- 2.5 delta_lambda = ["
        << lo << ", " << hi << "] nm; moments will be biased by truncation";
    return msg.str();
}

namespace {

struct Moments {
    double total;
    double mean;
};

Moments first_moment(const Spectrum& s)
{
    const auto d = s.density();
    const auto& g = s.grid();
    std::vector<double> weighted(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) weighted[i] = g.at(i) * d[i];
    const double total = trapezoid(d, g.step());
    if (!(total > 0.0)) throw DegenerateSpectrum("spectrum has zero total intensity");
    return {total, trapezoid(weighted, g.step()) / total};
}

}  // namespace

double centroid(const Spectrum& s) { return first_moment(s).mean; }

double rms_width(const Spectrum& s)
{
    const auto [total, mean] = first_moment(s);
    const auto d = s.density();
    const auto& g = s.grid();
    std::vector<double> weighted(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double u = g.at(i) - mean;
        weighted[i] = u * u * d[i];
    }
    return std::sqrt(trapezoid(weighted, g.step()) / total);
}

double shift_between(const Spectrum& reference, const Spectrum& measured)
{
    if (!(reference.grid() == measured.grid())) {
        throw IncompatibleGrids("shift_between: spectra are sampled on different grids");
    }
    return centroid(measured) - centroid(reference);
}

MomentumStats momentum_stats(const SourceParams& params)
{
    if (!(params.lambda0 > 0.0)) throw InvalidConfiguration("source: lambda0 must be positive");
    if (params.delta_lambda < 0.0) throw InvalidConfiguration("source: delta_lambda must be >= 0");
    const double two_pi = 2.0 * std::numbers::pi;
    return {two_pi / params.lambda0, two_pi * params.delta_lambda / (params.lambda0 * params.lambda0)};
}

Spectrum load_spectrum_csv(const std::filesystem::path& path, const WavelengthGrid& grid)
{
    const auto rows = io::read_two_column(path, "wavelength_nm,intensity");
    if (rows.size() < 2) throw InvalidConfiguration(path.string() + ": need at least two samples");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].second < 0.0 || !std::isfinite(rows[i].second)) {
            throw InvalidConfiguration(path.string() + ": negative or non-finite intensity at row " +
                                       std::to_string(i + 1));
        }
        if (i > 0 && !(rows[i].first > rows[i - 1].first)) {
            throw InvalidConfiguration(path.string() + ": wavelengths must be strictly increasing");
        }
    }
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.at(i);
        if (x < rows.front().first || x > rows.back().first) continue;
        auto hi = std::lower_bound(rows.begin(), rows.end(), x,
                                   [](const auto& r, double v) { return r.first < v; });
        if (hi->first == x) {
            density[i] = hi->second;
            continue;
        }
        auto lo = hi - 1;
        const double f = (x - lo->first) / (hi->first - lo->first);
        density[i] = lo->second + f * (hi->second - lo->second);
    }
    return Spectrum(grid, std::move(density));
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s)
{
    std::string text = "wavelength_nm,intensity\n";
    const auto d = s.density();
    for (std::size_t i = 0; i < d.size(); ++i) {
        text += io::sig9(s.grid().at(i));
        text += ',';
        text += io::sig9(d[i]);
        text += '\n';
    }
    io::write_text(path, text);
}

}  // namespace wvpe
