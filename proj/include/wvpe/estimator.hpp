#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wvpe/simulator.hpp"
#include "wvpe/spectral.hpp"

namespace wvpe {

/// Shape-preserving piecewise-cubic Hermite interpolant through strictly increasing
/// (x, y) nodes; the interpolant is monotone wherever the data are.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double value(double x) const;
    double derivative(double x) const;

    /// x with value(x) == y, for increasing data and y inside [y.front(), y.back()].
    double inverse(double y) const;

    const std::vector<double>& xs() const noexcept { return x_; }
    const std::vector<double>& ys() const noexcept { return y_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slope_;
};

enum class CurveMode { analytic, simulated, simulated_with_spread };

std::string_view to_string(CurveMode mode);
CurveMode curve_mode_from_string(std::string_view name);

struct CalibrationPoint {
    double alpha;         // rad
    double delta_lambda;  // nm, magnitude of the shift
};

struct AlphaRange {
    double lo;
    double hi;
};

/// Monotone table of expected shift versus phase at fixed beta and source.
class CalibrationCurve {
public:
    /// Throws CalibrationDomainError when alpha or the shift is not strictly increasing.
    CalibrationCurve(double beta, SourceParams source, CurveMode mode, std::vector<CalibrationPoint> points);

    double beta() const noexcept { return beta_; }
    const SourceParams& source() const noexcept { return source_; }
    CurveMode mode() const noexcept { return mode_; }
    const std::vector<CalibrationPoint>& points() const noexcept { return points_; }

    AlphaRange alpha_range() const { return {points_.front().alpha, points_.back().alpha}; }
    double min_shift() const { return points_.front().delta_lambda; }
    double max_shift() const { return points_.back().delta_lambda; }

    double shift_at(double alpha) const { return interp_.value(alpha); }
    double slope_at(double alpha) const { return interp_.derivative(alpha); }
    /// Inverse of shift_at; no range checking (see invert_shift).
    double alpha_at(double delta_lambda) const { return interp_.inverse(delta_lambda); }

private:
    double beta_;
    SourceParams source_;
    CurveMode mode_;
    std::vector<CalibrationPoint> points_;
    MonotoneCubic interp_;
};

/// Samples n_points phases uniformly over `range`. Simulated modes take every setting
/// other than source, beta and phase from `simulation`; measurement noise is ignored.
CalibrationCurve build_calibration(double beta, const SourceParams& source, AlphaRange range,
                                   std::size_t n_points, CurveMode mode, const SetupConfig& simulation = {},
                                   unsigned threads = 1);

/// Phase whose calibrated shift equals `measured_dl`. Refuses to extrapolate.
double invert_shift(const CalibrationCurve& curve, double measured_dl);

/// sigma_dl / |d(dl)/d(alpha)| from the analytic shift. At beta = alpha this is
/// lambda0 * alpha * sigma_dl / delta_lambda^2. Returns +inf at alpha = 0 (zero slope)
/// and throws InfinitePrecision for beta = 0, where the analytic shift is flat in alpha.
double precision(double alpha, double beta, const SourceParams& source, double sigma_dl);

/// sigma_dl / |slope| of the calibration curve at alpha.
double precision(const CalibrationCurve& curve, double alpha, double sigma_dl);

/// Best post-selection angle for a phase near alpha_prior: beta = alpha_prior.
double optimal_beta(double alpha_prior);

/// Numeric argmin of precision() over beta in [alpha/4, 4 alpha] (log-spaced scan).
double scan_optimal_beta(double alpha, const SourceParams& source, double sigma_dl, std::size_t samples = 4001);

enum class EstimateMethod { curve_inversion, closed_form };

std::string_view to_string(EstimateMethod method);

struct Estimate {
    double alpha_hat;
    double sigma_alpha;
    double beta_used;
    EstimateMethod method;
};

Estimate estimate(const CalibrationCurve& curve, double measured_dl, double sigma_dl);

/// Direct inverse of the analytic shift at beta > 0.
Estimate estimate_closed_form(double beta, const SourceParams& source, double measured_dl, double sigma_dl);

/// `alpha_rad,delta_lambda_nm` CSV at `csv_path` plus a JSON sidecar next to it.
void save_calibration(const CalibrationCurve& curve, const std::filesystem::path& csv_path);
CalibrationCurve load_calibration(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace wvpe
