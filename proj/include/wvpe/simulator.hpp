#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wvpe/polarization.hpp"
#include "wvpe/spectral.hpp"

namespace wvpe {

/// How the polarizer-angle ensemble is weighted.
enum class SpreadWeighting {
    // Gaussian prior on beta' times the post-selection probability computed by the simulator.
    exact,
    // beta'^2 times the Gaussian prior, averaging per-angle centroids directly.
    paper,
};

struct SlabSpec {
    double thickness_mm;
    IndexModel index;
    std::string label;
};

struct SpectrometerParams {
    WavelengthGrid grid = WavelengthGrid::spanning(715.0, 915.0, 0.02);
    double centroid_noise_nm = 0.0;
    double bin_relative_noise = 0.0;
    // Report moments over the spectrometer window instead of the extended simulation grid.
    bool truncate = false;
};

struct SimulationGrid {
    double half_width_sigma = 5.0;
    double step_nm = 0.02;
};

struct SetupConfig {
    SourceParams source{808.0, 38.8};
    PlateParams plate{0.0, 1.54, 808.0};
    std::optional<double> alpha_override;
    PostSelectionParams postsel;
    SpreadWeighting weighting = SpreadWeighting::exact;
    std::optional<SlabSpec> dispersion;
    SpectrometerParams spectrometer;
    SimulationGrid simulation;
    std::uint64_t seed = 1;

    /// Plate phase: the override when set, otherwise derived from the tilt.
    double alpha() const;

    /// Source-centred grid of +- half_width_sigma RMS widths.
    WavelengthGrid internal_grid() const;

    void validate() const;
};

struct SimulationResult {
    Spectrum output_spectrum;
    Spectrum reference_spectrum;
    double postselection_probability;
    double delta_lambda;  // nm, signed: centroid(output) - centroid(reference)
    double reference_centroid;
    double centroid_noise = 0.0;
};

/// |<phi_post(beta)| U(lambda) |psi_pre>|^2 for the plate retarder referenced to lambda0.
double postselection_probability_at(double lambda, double alpha, double beta, double lambda0);

/// Ideal polarizers at postsel.beta. The reference is the alpha = 0 run at the same beta.
SimulationResult run(const SetupConfig& config);

/// Ensemble over the polarizer angle; delegates to run() when the spread is zero.
SimulationResult run_with_polarizer_spread(const SetupConfig& config);

/// Spectrometer sampling, optional window truncation and seeded noise.
SimulationResult apply_spectrometer(const SimulationResult& result, const SetupConfig& config);

/// run / run_with_polarizer_spread followed by apply_spectrometer.
SimulationResult simulate(const SetupConfig& config);

struct SweepPoint {
    std::optional<double> theta;
    double alpha;
    double beta;
};

struct SweepRow {
    SweepPoint point;
    double delta_lambda;  // signed, NaN on error
    double postselection_probability;
    std::string error;

    bool ok() const { return error.empty(); }
};

std::vector<SweepPoint> sweep_over_alpha(std::span<const double> betas, std::span<const double> alphas);
std::vector<SweepPoint> sweep_over_theta(std::span<const double> betas, std::span<const double> thetas,
                                         const PlateParams& plate);

/// Seed for row `index`, derived from the master seed only.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// One row per point, in input order. Row failures are recorded, not thrown.
std::vector<SweepRow> sweep(const SetupConfig& base, std::span<const SweepPoint> points, unsigned threads = 1);

}  // namespace wvpe
