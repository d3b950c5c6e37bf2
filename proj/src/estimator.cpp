#include "wvpe/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "wvpe/errors.hpp"
#include "wvpe/io.hpp"
#include "wvpe/weakvalue.hpp"

namespace wvpe {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw InvalidConfiguration("interpolant: need >= 2 nodes of matching size");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        if (!(h[k] > 0.0)) throw InvalidConfiguration("interpolant: nodes must be strictly increasing");
        delta[k] = (y_[k + 1] - y_[k]) / h[k];
    }

    slope_.assign(n, 0.0);
    if (n == 2) {
        slope_[0] = slope_[1] = delta[0];
        return;
    }
    // Fritsch-Carlson weighted harmonic mean in the interior.
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) continue;
        const double w1 = 2 * h[k] + h[k - 1];
        const double w2 = h[k] + 2 * h[k - 1];
        slope_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    // One-sided three-point ends, clipped to keep the shape.
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (std::signbit(d) != std::signbit(d0) || d0 == 0.0) return 0.0;
        if (std::signbit(d0) != std::signbit(d1) && std::abs(d) > 3 * std::abs(d0)) d = 3 * d0;
        return d;
    };
    slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t MonotoneCubic::segment(double x) const
{
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(it - x_.begin()) - 1, x_.size() - 2);
}

double MonotoneCubic::value(double x) const
{
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * slope_[k] + (-2 * t3 + 3 * t2) * y_[k + 1] +
           (t3 - t2) * h * slope_[k + 1];
}

double MonotoneCubic::derivative(double x) const
{
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[k] + (6 * t - 6 * t2) * y_[k + 1]) / h + (3 * t2 - 4 * t + 1) * slope_[k] +
           (3 * t2 - 2 * t) * slope_[k + 1];
}

double MonotoneCubic::inverse(double y) const
{
    if (y <= y_.front()) return x_.front();
    if (y >= y_.back()) return x_.back();
    auto it = std::upper_bound(y_.begin(), y_.end(), y);
    const std::size_t k = static_cast<std::size_t>(it - y_.begin()) - 1;
    if (y_[k] == y) return x_[k];
    double lo = x_[k];
    double hi = x_[k + 1];
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (value(mid) < y) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::string_view to_string(CurveMode mode)
{
    switch (mode) {
    case CurveMode::analytic: return "analytic";
    case CurveMode::simulated: return "simulated";
    case CurveMode::simulated_with_spread: return "spread";
    }
    return "analytic";
}

CurveMode curve_mode_from_string(std::string_view name)
{
    if (name == "analytic") return CurveMode::analytic;
    if (name == "simulated") return CurveMode::simulated;
    if (name == "spread" || name == "simulated_with_spread") return CurveMode::simulated_with_spread;
    throw InvalidConfiguration("unknown calibration mode '" + std::string(name) +
                               "' (expected analytic, simulated or spread)");
}

namespace {

std::vector<double> column(const std::vector<CalibrationPoint>& pts, double CalibrationPoint::*field)
{
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.*field);
    return out;
}

}  // namespace

CalibrationCurve::CalibrationCurve(double beta, SourceParams source, CurveMode mode,
                                   std::vector<CalibrationPoint> points)
    : beta_(beta), source_(source), mode_(mode), points_(std::move(points))
{
    if (points_.size() < 3) throw CalibrationDomainError("calibration needs at least 3 points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!std::isfinite(p.alpha) || !std::isfinite(p.delta_lambda)) {
            throw CalibrationDomainError("calibration point " + std::to_string(i) + " is not finite");
        }
        if (i == 0) continue;
        const auto& q = points_[i - 1];
        if (!(p.alpha > q.alpha)) throw CalibrationDomainError("calibration phases must be strictly increasing");
        if (!(p.delta_lambda > q.delta_lambda)) {
            std::ostringstream msg;
            msg << "calibration curve is not monotone on alpha in [" << io::sig9(q.alpha) << ", "
                << io::sig9(p.alpha) << "] rad (shift " << io::sig9(q.delta_lambda) << " -> "
                << io::sig9(p.delta_lambda) << " nm); the shift is non-invertible there";
            throw CalibrationDomainError(msg.str());
        }
    }
    interp_ = MonotoneCubic(column(points_, &CalibrationPoint::alpha), column(points_, &CalibrationPoint::delta_lambda));
}

CalibrationCurve build_calibration(double beta, const SourceParams& source, AlphaRange range, std::size_t n_points,
                                   CurveMode mode, const SetupConfig& simulation, unsigned threads)
{
    source.validate();
    if (!(range.lo >= 0.0) || !(range.hi > range.lo)) {
        throw CalibrationDomainError("calibration range must satisfy 0 <= lo < hi");
    }
    if (n_points < 3) throw CalibrationDomainError("calibration needs at least 3 points");
    if (beta == 0.0 && mode != CurveMode::simulated_with_spread) {
        throw CalibrationDomainError(
            "beta = 0 with ideal polarizers gives a shift independent of alpha (non-invertible); "
            "use the spread mode");
    }

    std::vector<double> alphas(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        alphas[i] = range.lo + (range.hi - range.lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    }
    alphas.back() = range.hi;

    std::vector<CalibrationPoint> points;
    points.reserve(n_points);
    if (mode == CurveMode::analytic) {
        for (double a : alphas) points.push_back({a, wavelength_shift_analytic(a, beta, source)});
        return CalibrationCurve(beta, source, mode, std::move(points));
    }

    SetupConfig cfg = simulation;
    cfg.source = source;
    cfg.postsel.beta = beta;
    cfg.spectrometer.centroid_noise_nm = 0.0;
    cfg.spectrometer.bin_relative_noise = 0.0;
    if (mode == CurveMode::simulated) {
        cfg.postsel.spread = 0.0;
    } else if (!(cfg.postsel.spread > 0.0)) {
        throw CalibrationDomainError("spread mode requires a positive polarizer spread");
    }

    const double b[] = {beta};
    const auto rows = sweep(cfg, sweep_over_alpha(b, alphas), threads);
    for (const auto& row : rows) {
        if (!row.ok()) {
            throw CalibrationDomainError("simulation failed at alpha = " + io::sig9(row.point.alpha) + ": " + row.error);
        }
        // The transmitted port shifts toward shorter wavelengths; the curve stores magnitudes.
        points.push_back({row.point.alpha, -row.delta_lambda});
    }
    return CalibrationCurve(beta, source, mode, std::move(points));
}

double invert_shift(const CalibrationCurve& curve, double measured_dl)
{
    if (!std::isfinite(measured_dl) || measured_dl < curve.min_shift() || measured_dl > curve.max_shift()) {
        std::ostringstream msg;
        msg << "shift " << io::sig9(measured_dl) << " nm is outside the calibrated range [" << io::sig9(curve.min_shift())
            << ", " << io::sig9(curve.max_shift()) << "] nm";
        throw ExtrapolationRefused(msg.str(), curve.min_shift(), curve.max_shift());
    }
    return curve.alpha_at(measured_dl);
}

double precision(double alpha, double beta, const SourceParams& source, double sigma_dl)
{
    if (beta == 0.0) {
        throw InfinitePrecision("beta = 0: the analytic shift does not depend on alpha; calibrate in spread mode");
    }
    if (sigma_dl == 0.0) return 0.0;
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    return sigma_dl / std::abs(wavelength_shift_slope(alpha, beta, source));
}

double precision(const CalibrationCurve& curve, double alpha, double sigma_dl)
{
    if (sigma_dl == 0.0) return 0.0;
    const double slope = std::abs(curve.slope_at(alpha));
    if (!(slope > 0.0)) throw InfinitePrecision("calibration slope vanishes at alpha = " + io::sig9(alpha));
    return sigma_dl / slope;
}

double optimal_beta(double alpha_prior)
{
    if (!(alpha_prior > 0.0)) throw InvalidConfiguration("optimal_beta: alpha prior must be positive");
    return alpha_prior;
}

double scan_optimal_beta(double alpha, const SourceParams& source, double sigma_dl, std::size_t samples)
{
    if (!(alpha > 0.0)) throw InvalidConfiguration("scan_optimal_beta: alpha must be positive");
    const double lo = std::log(alpha / 4);
    const double hi = std::log(alpha * 4);
    double best_beta = alpha;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        const double beta = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1));
        const double s = precision(alpha, beta, source, sigma_dl);
        if (s < best) {
            best = s;
            best_beta = beta;
        }
    }
    return best_beta;
}

std::string_view to_string(EstimateMethod method)
{
    return method == EstimateMethod::curve_inversion ? "curve-inversion" : "closed-form";
}

Estimate estimate(const CalibrationCurve& curve, double measured_dl, double sigma_dl)
{
    const double alpha = invert_shift(curve, measured_dl);
    double sigma = 0.0;
    if (sigma_dl > 0.0) {
        const double slope = std::abs(curve.slope_at(alpha));
        sigma = slope > 0.0 ? sigma_dl / slope : std::numeric_limits<double>::infinity();
    }
    return {alpha, sigma, curve.beta(), EstimateMethod::curve_inversion};
}

Estimate estimate_closed_form(double beta, const SourceParams& source, double measured_dl, double sigma_dl)
{
    if (beta == 0.0) throw InfinitePrecision("beta = 0: the analytic shift cannot be inverted");
    const double ceiling = 2.0 * source.delta_lambda * source.delta_lambda / source.lambda0;
    if (!(measured_dl >= 0.0) || !(measured_dl < ceiling)) {
        throw ExtrapolationRefused("shift " + io::sig9(measured_dl) + " nm is outside [0, " + io::sig9(ceiling) + ") nm",
                                   0.0, ceiling);
    }
    const double alpha = std::abs(beta) * std::sqrt(measured_dl / (ceiling - measured_dl));
    return {alpha, precision(alpha, beta, source, sigma_dl), beta, EstimateMethod::closed_form};
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path)
{
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

namespace {

constexpr int calibration_schema_version = 1;

std::string calibration_csv(const CalibrationCurve& curve)
{
    std::string text = "alpha_rad,delta_lambda_nm\n";
    for (const auto& p : curve.points()) {
        text += io::exact(p.alpha);
        text += ',';
        text += io::exact(p.delta_lambda);
        text += '\n';
    }
    return text;
}

}  // namespace

void save_calibration(const CalibrationCurve& curve, const std::filesystem::path& csv_path)
{
    const std::string csv = calibration_csv(curve);
    nlohmann::ordered_json meta;
    meta["schema_version"] = calibration_schema_version;
    meta["beta_rad"] = curve.beta();
    meta["source"] = {{"lambda0_nm", curve.source().lambda0}, {"delta_lambda_nm", curve.source().delta_lambda}};
    meta["mode"] = std::string(to_string(curve.mode()));
    meta["n_points"] = curve.points().size();
    meta["alpha_min_rad"] = curve.alpha_range().lo;
    meta["alpha_max_rad"] = curve.alpha_range().hi;
    meta["build_hash"] = io::fnv1a_hex(csv);
    io::write_text(csv_path, csv);
    io::write_text(sidecar_path(csv_path), meta.dump(2) + "\n");
}

CalibrationCurve load_calibration(const std::filesystem::path& csv_path)
{
    const auto side = sidecar_path(csv_path);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(io::read_text(side));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfiguration(side.string() + ": " + e.what());
    }
    const std::string csv = io::read_text(csv_path);
    try {
        if (meta.at("schema_version").get<int>() != calibration_schema_version) {
            throw InvalidConfiguration(side.string() + ": unsupported schema_version");
        }
        if (meta.at("build_hash").get<std::string>() != io::fnv1a_hex(csv)) {
            throw CalibrationDomainError(csv_path.string() + ": contents do not match the sidecar build_hash");
        }
        const auto rows = io::read_two_column(csv_path, "alpha_rad,delta_lambda_nm");
        std::vector<CalibrationPoint> points;
        points.reserve(rows.size());
        for (const auto& [a, d] : rows) points.push_back({a, d});
        const SourceParams source{meta.at("source").at("lambda0_nm").get<double>(),
                                  meta.at("source").at("delta_lambda_nm").get<double>()};
        return CalibrationCurve(meta.at("beta_rad").get<double>(), source,
                                curve_mode_from_string(meta.at("mode").get<std::string>()), std::move(points));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfiguration(side.string() + ": " + e.what());
    }
}

}  // namespace wvpe
