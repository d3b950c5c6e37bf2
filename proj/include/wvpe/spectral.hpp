#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wvpe {

/// Uniform wavelength sampling, in nm. Point i is start + i*step.
class WavelengthGrid {
public:
    WavelengthGrid(double start, double step, std::size_t count);

    /// Grid covering [start, stop] with the given step; stop is rounded to the nearest sample.
    static WavelengthGrid spanning(double start, double stop, double step);

    double start() const noexcept { return start_; }
    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return count_; }
    double at(std::size_t i) const noexcept { return start_ + static_cast<double>(i) * step_; }
    double stop() const noexcept { return at(count_ - 1); }

    bool operator==(const WavelengthGrid&) const = default;

private:
    double start_;
    double step_;
    std::size_t count_;
};

/// Gaussian source characterised by centre and RMS width, both in nm.
struct SourceParams {
    double lambda0;
    double delta_lambda;

    void validate() const;
    bool operator==(const SourceParams&) const = default;
};

/// Non-negative intensity density sampled on a WavelengthGrid.
class Spectrum {
public:
    Spectrum(WavelengthGrid grid, std::vector<double> density);

    const WavelengthGrid& grid() const noexcept { return grid_; }
    std::span<const double> density() const noexcept { return density_; }

    double integral() const;
    Spectrum normalized() const;
    Spectrum scaled(double factor) const;

    /// Shift the whole spectrum by d nm (linear interpolation, zero outside the grid).
    Spectrum translated(double d) const;

    /// Linear interpolation onto another grid, zero outside this spectrum's support.
    Spectrum resampled(const WavelengthGrid& target) const;

    /// Linear interpolation of the density at an arbitrary wavelength (zero outside).
    double value_at(double lambda) const;

private:
    WavelengthGrid grid_;
    std::vector<double> density_;
};

/// Trapezoidal integral of samples on a uniform grid.
double trapezoid(std::span<const double> values, double step);

Spectrum gaussian_spectrum(const SourceParams& params, const WavelengthGrid& grid);

/// Message when the grid does not cover lambda0 +- 2.5 delta_lambda, otherwise nullopt.
std::optional<std::string> coverage_warning(const SourceParams& params, const WavelengthGrid& grid);

double centroid(const Spectrum& s);
double rms_width(const Spectrum& s);

/// centroid(measured) - centroid(reference); positive means a redshift.
double shift_between(const Spectrum& reference, const Spectrum& measured);

struct MomentumStats {
    double p0;       // rad/nm
    double delta_p;  // rad/nm
};

MomentumStats momentum_stats(const SourceParams& params);

/// Two-column CSV `wavelength_nm,intensity`, resampled onto `grid`.
Spectrum load_spectrum_csv(const std::filesystem::path& path, const WavelengthGrid& grid);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);

}  // namespace wvpe
