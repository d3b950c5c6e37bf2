#include "wvpe/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "wvpe/errors.hpp"

namespace wvpe {

namespace {

constexpr double min_photon_fraction = 1e-30;
constexpr std::size_t spread_nodes = 241;
constexpr double spread_half_width = 6.0;

// Everything about the optical chain that does not depend on the post-selection angle:
// the normalized source and M(lambda)|psi_pre> at every grid wavelength.
class Chain {
public:
    Chain(const SetupConfig& config, double alpha)
        : source_(gaussian_spectrum(config.source, config.internal_grid()))
    {
        OpticalElement element = alpha == 0.0 ? OpticalElement([](double) { return JonesMatrix::identity(); })
                                 : config.alpha_override ? retarder(alpha, config.plate.lambda0_design)
                                                         : hwp_pair(config.plate);
        const auto& grid = source_.grid();
        const PolarizationState pre = pre_state();
        field_.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) field_.push_back(element.at(grid.at(i)) * pre);

        // The slab is a scalar phase; it multiplies the projected amplitude.
        if (config.dispersion) {
            const auto slab = dispersive_slab(config.dispersion->thickness_mm, config.dispersion->index);
            slab_phase_.reserve(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) slab_phase_.push_back(slab.at(grid.at(i)).hh);
        }
    }

    const Spectrum& source() const { return source_; }
    const WavelengthGrid& grid() const { return source_.grid(); }

    /// Source density times the post-selection probability at beta.
    std::vector<double> transmit(double beta) const
    {
        const PolarizationState post = post_state(beta);
        const auto s = source_.density();
        std::vector<double> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            Complex amplitude = inner(post, field_[i]);
            if (!slab_phase_.empty()) amplitude *= slab_phase_[i];
            out[i] = s[i] * std::norm(amplitude);
        }
        return out;
    }

private:
    Spectrum source_;
    std::vector<PolarizationState> field_;
    std::vector<Complex> slab_phase_;
};

double first_moment_ratio(std::span<const double> d, const WavelengthGrid& g, double& total)
{
    std::vector<double> weighted(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) weighted[i] = g.at(i) * d[i];
    total = trapezoid(d, g.step());
    return trapezoid(weighted, g.step()) / total;
}

struct Ensemble {
    std::vector<double> density;
    double probability;
};

// Ideal polarizers: one angle, unit weight.
Ensemble ideal(const Chain& chain, double beta)
{
    auto d = chain.transmit(beta);
    const double p = trapezoid(d, chain.grid().step());
    return {std::move(d), p};
}

std::vector<double> spread_angles(const PostSelectionParams& ps)
{
    std::vector<double> angles(spread_nodes);
    const double lo = ps.beta - spread_half_width * ps.spread;
    const double h = 2.0 * spread_half_width * ps.spread / static_cast<double>(spread_nodes - 1);
    for (std::size_t i = 0; i < spread_nodes; ++i) angles[i] = lo + static_cast<double>(i) * h;
    return angles;
}

Ensemble averaged(const Chain& chain, const PostSelectionParams& ps, SpreadWeighting weighting)
{
    const auto angles = spread_angles(ps);
    const std::size_t n = chain.grid().size();
    const double step = chain.grid().step();

    std::vector<double> exact_mix(n, 0.0);
    std::vector<double> shape_mix(n, 0.0);
    double prior_sum = 0.0;
    double shape_weight_sum = 0.0;
    for (double b : angles) {
        const double z = (b - ps.beta) / ps.spread;
        const double prior = std::exp(-0.5 * z * z);
        const auto d = chain.transmit(b);
        for (std::size_t i = 0; i < n; ++i) exact_mix[i] += prior * d[i];
        prior_sum += prior;

        if (weighting == SpreadWeighting::paper) {
            const double w = b * b * prior;
            const double p = trapezoid(d, step);
            if (w == 0.0 || !(p > 0.0)) continue;
            for (std::size_t i = 0; i < n; ++i) shape_mix[i] += w * d[i] / p;
            shape_weight_sum += w;
        }
    }
    for (double& v : exact_mix) v /= prior_sum;
    const double probability = trapezoid(exact_mix, step);
    if (weighting == SpreadWeighting::exact) return {std::move(exact_mix), probability};

    if (!(shape_weight_sum > 0.0)) return {std::vector<double>(n, 0.0), 0.0};
    for (double& v : shape_mix) v *= probability / shape_weight_sum;
    return {std::move(shape_mix), probability};
}

SimulationResult assemble(const Chain& chain, Ensemble out, Ensemble ref)
{
    if (!(out.probability >= min_photon_fraction)) {
        throw NoPhotons("post-selected intensity vanishes (total " + std::to_string(out.probability) + ")");
    }
    // A dark alpha = 0 run (beta = 0) falls back to the source shape.
    std::vector<double> ref_density = ref.probability >= min_photon_fraction
                                          ? std::move(ref.density)
                                          : std::vector<double>(chain.source().density().begin(),
                                                                chain.source().density().end());
    const auto& g = chain.grid();
    double out_total = 0.0;
    double ref_total = 0.0;
    const double c_out = first_moment_ratio(out.density, g, out_total);
    const double c_ref = first_moment_ratio(ref_density, g, ref_total);
    return SimulationResult{Spectrum(g, std::move(out.density)),
                            Spectrum(g, std::move(ref_density)),
                            std::clamp(out.probability, 0.0, 1.0),
                            c_out - c_ref,
                            c_ref};
}

}  // namespace

double SetupConfig::alpha() const { return alpha_override ? *alpha_override : alpha_from_tilt(plate); }

WavelengthGrid SetupConfig::internal_grid() const
{
    const double half = simulation.half_width_sigma * source.delta_lambda;
    const double start = std::max(source.lambda0 - half, simulation.step_nm);
    return WavelengthGrid::spanning(start, source.lambda0 + half, simulation.step_nm);
}

void SetupConfig::validate() const
{
    source.validate();
    plate.validate();
    postsel.validate();
    if (alpha_override && !std::isfinite(*alpha_override)) throw InvalidConfiguration("alpha must be finite");
    if (!(simulation.half_width_sigma > 0.0)) throw InvalidConfiguration("simulation: half width must be positive");
    if (!(simulation.step_nm > 0.0)) throw InvalidConfiguration("simulation: step must be positive");
    if (!(spectrometer.centroid_noise_nm >= 0.0)) throw InvalidConfiguration("spectrometer: noise must be >= 0");
    if (!(spectrometer.bin_relative_noise >= 0.0)) throw InvalidConfiguration("spectrometer: noise must be >= 0");
}

double postselection_probability_at(double lambda, double alpha, double beta, double lambda0)
{
    const PolarizationState out = retarder(alpha, lambda0).at(lambda) * pre_state();
    return std::clamp(std::norm(inner(post_state(beta), out)), 0.0, 1.0);
}

SimulationResult run(const SetupConfig& config)
{
    config.validate();
    const Chain chain(config, config.alpha());
    const Chain reference(config, 0.0);
    return assemble(chain, ideal(chain, config.postsel.beta), ideal(reference, config.postsel.beta));
}

SimulationResult run_with_polarizer_spread(const SetupConfig& config)
{
    config.validate();
    if (config.postsel.spread == 0.0) return run(config);
    const Chain chain(config, config.alpha());
    const Chain reference(config, 0.0);
    return assemble(chain, averaged(chain, config.postsel, config.weighting),
                    averaged(reference, config.postsel, config.weighting));
}

SimulationResult apply_spectrometer(const SimulationResult& result, const SetupConfig& config)
{
    const auto& sp = config.spectrometer;
    const auto& internal = result.output_spectrum.grid();
    const WavelengthGrid target =
        sp.truncate ? sp.grid : WavelengthGrid::spanning(internal.start(), internal.stop(), sp.grid.step());

    Spectrum reference = result.reference_spectrum.resampled(target);
    Spectrum output = result.output_spectrum.resampled(target);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    if (sp.bin_relative_noise > 0.0) {
        std::vector<double> noisy(output.density().begin(), output.density().end());
        for (double& v : noisy) v *= std::max(0.0, 1.0 + sp.bin_relative_noise * normal(rng));
        output = Spectrum(target, std::move(noisy));
    }
    const double jitter = sp.centroid_noise_nm > 0.0 ? sp.centroid_noise_nm * normal(rng) : 0.0;

    const double c_ref = centroid(reference);
    const double c_out = centroid(output);
    return SimulationResult{std::move(output), std::move(reference), result.postselection_probability,
                            c_out - c_ref + jitter, c_ref, jitter};
}

SimulationResult simulate(const SetupConfig& config)
{
    return apply_spectrometer(run_with_polarizer_spread(config), config);
}

std::vector<SweepPoint> sweep_over_alpha(std::span<const double> betas, std::span<const double> alphas)
{
    std::vector<SweepPoint> points;
    points.reserve(betas.size() * alphas.size());
    for (double b : betas) {
        for (double a : alphas) points.push_back({std::nullopt, a, b});
    }
    return points;
}

std::vector<SweepPoint> sweep_over_theta(std::span<const double> betas, std::span<const double> thetas,
                                         const PlateParams& plate)
{
    std::vector<SweepPoint> points;
    points.reserve(betas.size() * thetas.size());
    for (double b : betas) {
        for (double t : thetas) {
            PlateParams p = plate;
            p.theta = t;
            points.push_back({t, alpha_from_tilt(p), b});
        }
    }
    return points;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t words[2];
    seq.generate(std::begin(words), std::end(words));
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<SweepRow> sweep(const SetupConfig& base, std::span<const SweepPoint> points, unsigned threads)
{
    std::vector<SweepRow> rows(points.size());
    auto evaluate = [&](std::size_t i) {
        const SweepPoint& pt = points[i];
        SweepRow row{pt, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), {}};
        try {
            SetupConfig cfg = base;
            if (pt.theta) cfg.plate.theta = *pt.theta;
            cfg.alpha_override = pt.alpha;
            cfg.postsel.beta = pt.beta;
            cfg.seed = derive_seed(base.seed, i);
            const SimulationResult r = simulate(cfg);
            row.delta_lambda = r.delta_lambda;
            row.postselection_probability = r.postselection_probability;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows[i] = std::move(row);
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) evaluate(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < points.size(); i = next++) evaluate(i);
            });
        }
    }
    return rows;
}

}  // namespace wvpe
