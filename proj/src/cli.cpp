#include "wvpe/cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "wvpe/config.hpp"
#include "wvpe/errors.hpp"
#include "wvpe/estimator.hpp"
#include "wvpe/io.hpp"
#include "wvpe/simulator.hpp"

namespace wvpe::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::string dispersion;
    std::optional<double> spread;
    std::string weighting;
    std::optional<double> n0;
    std::optional<double> design_wavelength;
    std::optional<double> centroid_noise;
    std::optional<std::uint64_t> seed;
    bool truncate = false;
    bool signed_shift = false;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir = ".";
};

void add_common(CLI::App& app, CommonOptions& o)
{
    app.add_option("--config", o.config_path, "JSON config file (schema_version 1)");
    app.add_option("--preset,--source", o.preset, "Source preset: led808, znse, filtered");
    app.add_option("--dispersion", o.dispersion, "Dispersive slab: none, znse_1mm");
    app.add_option("--spread", o.spread, "Polarizer angular spread (rad)");
    app.add_option("--weighting", o.weighting, "Spread weighting: exact, paper");
    app.add_option("--n0", o.n0, "Refractive index for the tilt-to-phase conversion");
    app.add_option("--design-wavelength", o.design_wavelength, "HWP design wavelength (nm)");
    app.add_option("--centroid-noise", o.centroid_noise, "Spectrometer centroid noise sigma (nm)");
    app.add_option("--seed", o.seed, "Master RNG seed");
    app.add_flag("--truncate-window", o.truncate, "Measure moments over the spectrometer window only");
    app.add_flag("--signed", o.signed_shift, "Report signed shifts instead of magnitudes");
    app.add_option("--threads", o.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", o.out_dir, "Output directory");
}

SetupConfig resolve_config(const CommonOptions& o)
{
    SetupConfig c;
    apply_preset(c, "led808");
    bool design_set = false;
    if (!o.config_path.empty()) apply_config_json(c, read_json_file(o.config_path), design_set);
    std::optional<double> design = design_set ? std::optional(c.plate.lambda0_design) : std::nullopt;

    if (!o.preset.empty()) apply_preset(c, o.preset);
    if (!o.dispersion.empty()) c.dispersion = named_dispersion(o.dispersion);
    if (o.spread) c.postsel.spread = *o.spread;
    if (!o.weighting.empty()) {
        if (o.weighting == "exact") c.weighting = SpreadWeighting::exact;
        else if (o.weighting == "paper") c.weighting = SpreadWeighting::paper;
        else throw InvalidConfiguration("--weighting: expected exact or paper");
    }
    if (o.n0) c.plate.n0 = *o.n0;
    if (o.design_wavelength) design = *o.design_wavelength;
    if (o.centroid_noise) c.spectrometer.centroid_noise_nm = *o.centroid_noise;
    if (o.seed) c.seed = *o.seed;
    if (o.truncate) c.spectrometer.truncate = true;
    c.plate.lambda0_design = design ? *design : c.source.lambda0;
    return c;
}

struct Range {
    double lo;
    double hi;
    std::size_t count;

    std::vector<double> values() const
    {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) {
            v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        if (count > 1) v.back() = hi;
        return v;
    }
};

Range parse_range(const std::string& text, const std::string& flag)
{
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
        throw InvalidConfiguration(flag + ": expected lo:hi:count, got '" + text + "'");
    }
    try {
        std::size_t used = 0;
        const std::string count_text = text.substr(b + 1);
        const double lo = std::stod(text.substr(0, a));
        const double hi = std::stod(text.substr(a + 1, b - a - 1));
        const long count = std::stol(count_text, &used);
        if (used != count_text.size() || count < 1) throw std::invalid_argument("count");
        if (count > 1 && !(hi > lo)) throw std::invalid_argument("order");
        return {lo, hi, static_cast<std::size_t>(count)};
    } catch (const std::logic_error&) {
        throw InvalidConfiguration(flag + ": expected lo:hi:count with lo < hi and count >= 1, got '" + text + "'");
    }
}

// Command-line tokens needed to re-run, minus config and output locations.
std::vector<std::string> rerun_arguments(const std::vector<std::string>& args)
{
    static const std::set<std::string> dropped{"--config", "--out-dir", "--out"};
    std::vector<std::string> out;
    for (std::size_t i = 2; i < args.size(); ++i) {
        const auto& a = args[i];
        const auto eq = a.find('=');
        const std::string name = eq == std::string::npos ? a : a.substr(0, eq);
        if (dropped.contains(name)) {
            if (eq == std::string::npos) ++i;
            continue;
        }
        out.push_back(a);
    }
    return out;
}

void write_json(const fs::path& path, const ojson& doc) { io::write_text(path, doc.dump(2) + "\n"); }

ojson manifest(const std::string& command, const std::vector<std::string>& args, const CommonOptions& o,
               const SetupConfig& config, const std::vector<fs::path>& outputs)
{
    ojson m;
    m["tool"] = tool_name;
    m["version"] = tool_version;
    m["command"] = command;
    m["arguments"] = rerun_arguments(args);
    m["config_path"] = o.config_path;
    m["resolved_config"] = to_json(config);
    m["seed"] = config.seed;
    ojson files = ojson::array();
    for (const auto& p : outputs) files.push_back(p.filename().string());
    m["outputs"] = files;
    return m;
}

class Warnings {
public:
    Warnings(std::ostream& err, bool color) : err_(err), color_(color) {}
    void operator()(const std::string& msg) const
    {
        err_ << (color_ ? "\033[33mwarning:\033[0m " : "warning: ") << msg << '\n';
    }

private:
    std::ostream& err_;
    bool color_;
};

void warn_coverage(const SetupConfig& c, const Warnings& warn)
{
    if (!c.spectrometer.truncate) return;
    if (auto w = coverage_warning(c.source, c.spectrometer.grid)) warn(*w);
}

double reported(double signed_shift, bool keep_sign) { return keep_sign ? signed_shift : std::abs(signed_shift); }

int cmd_simulate(const std::vector<std::string>& args, const CommonOptions& o, std::optional<double> alpha,
                 std::optional<double> theta, std::optional<double> beta, const Warnings& warn)
{
    SetupConfig c = resolve_config(o);
    if (theta) {
        c.plate.theta = *theta;
        c.alpha_override.reset();
    }
    if (alpha) c.alpha_override = *alpha;
    if (beta) c.postsel.beta = *beta;
    c.validate();
    warn_coverage(c, warn);

    const SimulationResult r = simulate(c);
    const fs::path dir = o.out_dir;
    const fs::path spectrum_path = dir / "spectrum.csv";
    const fs::path result_path = dir / "result.json";
    write_spectrum_csv(spectrum_path, r.output_spectrum);
    ojson result;
    result["delta_lambda_nm"] = reported(r.delta_lambda, o.signed_shift);
    result["postselect_prob"] = r.postselection_probability;
    result["reference_centroid_nm"] = r.reference_centroid;
    result["alpha_rad"] = c.alpha();
    result["beta_rad"] = c.postsel.beta;
    write_json(result_path, result);
    write_json(dir / "manifest.json", manifest("simulate", args, o, c, {spectrum_path, result_path}));
    return exit_ok;
}

int cmd_sweep(const std::vector<std::string>& args, const CommonOptions& o, const std::vector<double>& betas,
              const std::string& alpha_range, const std::string& theta_range, std::ostream& out, const Warnings& warn)
{
    if (betas.empty()) throw InvalidConfiguration("--beta: at least one value required");
    if (alpha_range.empty() == theta_range.empty()) {
        throw InvalidConfiguration("sweep: give exactly one of --alpha or --theta");
    }
    SetupConfig c = resolve_config(o);
    c.validate();
    warn_coverage(c, warn);

    const bool by_theta = !theta_range.empty();
    const auto values = by_theta ? parse_range(theta_range, "--theta").values()
                                 : parse_range(alpha_range, "--alpha").values();
    const auto points = by_theta ? sweep_over_theta(betas, values, c.plate) : sweep_over_alpha(betas, values);
    const auto rows = sweep(c, points, o.threads);

    const fs::path dir = o.out_dir;
    std::vector<fs::path> outputs;
    std::map<double, std::string> tables;
    std::vector<double> order;
    ojson row_errors = ojson::array();
    std::size_t failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        auto [it, inserted] = tables.try_emplace(row.point.beta, "theta_rad,alpha_rad,beta_rad,delta_lambda_nm,postselect_prob\n");
        if (inserted) order.push_back(row.point.beta);
        std::string& t = it->second;
        t += row.point.theta ? io::sig9(*row.point.theta) : std::string();
        t += ',' + io::sig9(row.point.alpha) + ',' + io::sig9(row.point.beta) + ',';
        if (row.ok()) {
            t += io::sig9(reported(row.delta_lambda, o.signed_shift)) + ',' + io::sig9(row.postselection_probability);
        } else {
            t += "nan,nan";
            ++failures;
            warn("row " + std::to_string(i) + " (alpha=" + io::sig9(row.point.alpha) + ", beta=" +
                 io::sig9(row.point.beta) + "): " + row.error);
            row_errors.push_back({{"row", i}, {"alpha_rad", row.point.alpha}, {"beta_rad", row.point.beta},
                                  {"error", row.error}});
        }
        t += '\n';
    }
    for (double b : order) {
        const fs::path p = dir / ("sweep_beta_" + io::sig9(b) + ".csv");
        io::write_text(p, tables[b]);
        outputs.push_back(p);
        out << p.string() << '\n';
    }
    ojson m = manifest("sweep", args, o, c, outputs);
    m["row_errors"] = row_errors;
    write_json(dir / "manifest.json", m);
    return !rows.empty() && failures == rows.size() ? exit_physics : exit_ok;
}

int cmd_calibrate(const std::vector<std::string>& args, const CommonOptions& o, double beta, const std::string& mode,
                  const std::string& alpha_range, const std::string& out_path, std::ostream& out)
{
    SetupConfig c = resolve_config(o);
    c.postsel.beta = beta;
    c.validate();
    const Range r = parse_range(alpha_range, "--alpha");
    if (r.count < 3) throw InvalidConfiguration("--alpha: calibration needs at least 3 points");
    const fs::path csv = out_path.empty() ? fs::path(o.out_dir) / "calibration.csv" : fs::path(out_path);

    const auto curve = build_calibration(beta, c.source, {r.lo, r.hi}, r.count, curve_mode_from_string(mode), c,
                                         o.threads);
    save_calibration(curve, csv);
    fs::path manifest_path = csv;
    manifest_path.replace_extension(".manifest.json");
    write_json(manifest_path, manifest("calibrate", args, o, c, {csv, sidecar_path(csv)}));
    out << csv.string() << '\n';
    return exit_ok;
}

struct EstimateInputs {
    std::string calibration;
    std::optional<double> delta_lambda;
    std::string spectrum;
    std::string reference;
    double sigma_dl = 0.1;
};

int cmd_estimate(const std::vector<std::string>& args, const CommonOptions& o, const EstimateInputs& in,
                 bool write_files, std::ostream& out)
{
    const bool scalar = in.delta_lambda.has_value();
    const bool spectra = !in.spectrum.empty() || !in.reference.empty();
    if (scalar == spectra) {
        throw InvalidConfiguration("estimate: give either --delta-lambda or both --spectrum and --reference");
    }
    if (spectra && (in.spectrum.empty() || in.reference.empty())) {
        throw InvalidConfiguration("estimate: --spectrum and --reference must be given together");
    }
    if (!(in.sigma_dl >= 0.0)) throw InvalidConfiguration("--sigma-dl must be >= 0");

    const SetupConfig c = resolve_config(o);
    const CalibrationCurve curve = load_calibration(in.calibration);
    double measured = 0.0;
    if (scalar) {
        measured = *in.delta_lambda;
    } else {
        // Spectra are compared on the reference file's span unless the window is requested.
        WavelengthGrid grid = c.spectrometer.grid;
        if (!c.spectrometer.truncate) {
            const auto rows = io::read_two_column(in.reference, "wavelength_nm,intensity");
            if (rows.size() < 2) throw InvalidConfiguration(in.reference + ": need at least 2 samples");
            grid = WavelengthGrid::spanning(rows.front().first, rows.back().first, c.spectrometer.grid.step());
        }
        measured = std::abs(shift_between(load_spectrum_csv(in.reference, grid), load_spectrum_csv(in.spectrum, grid)));
    }
    const Estimate e = estimate(curve, measured, in.sigma_dl);

    ojson doc;
    doc["alpha_hat_rad"] = e.alpha_hat;
    doc["sigma_alpha_rad"] = e.sigma_alpha;
    doc["beta_used_rad"] = e.beta_used;
    doc["method"] = std::string(to_string(e.method));
    out << doc.dump(2) << '\n';
    if (write_files) {
        const fs::path dir = o.out_dir;
        const fs::path p = dir / "estimate.json";
        write_json(p, doc);
        ojson m = manifest("estimate", args, o, c, {p});
        m["calibration"] = in.calibration;
        write_json(dir / "manifest.json", m);
    }
    return exit_ok;
}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::config: return exit_config;
    case ErrorKind::physics: return exit_physics;
    case ErrorKind::calibration: return exit_calibration;
    case ErrorKind::estimation_range: return exit_estimation_range;
    }
    return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color)
{
    const Warnings warn(err, color);
    CLI::App app{"White-light weak-measurement phase estimation: simulate, sweep, calibrate, estimate", tool_name};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    CommonOptions common;

    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one configuration");
    std::optional<double> sim_alpha, sim_theta, sim_beta;
    add_common(*simulate_cmd, common);
    simulate_cmd->add_option("--alpha", sim_alpha, "Plate phase (rad), overrides the tilt");
    simulate_cmd->add_option("--theta", sim_theta, "Plate tilt (rad)");
    simulate_cmd->add_option("--beta", sim_beta, "Post-selection angle (rad)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Shift versus phase for one or more post-selection angles");
    std::vector<double> sweep_betas;
    std::string sweep_alpha, sweep_theta;
    add_common(*sweep_cmd, common);
    sweep_cmd->add_option("--beta", sweep_betas, "Post-selection angles (rad)")->required()->expected(1, -1);
    sweep_cmd->add_option("--alpha", sweep_alpha, "Phase range lo:hi:count (rad)");
    sweep_cmd->add_option("--theta", sweep_theta, "Tilt range lo:hi:count (rad)");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "Build a calibration curve");
    double cal_beta = 0.0;
    std::string cal_mode = "analytic";
    std::string cal_alpha = "0:0.013:121";
    std::string cal_out;
    add_common(*calibrate_cmd, common);
    calibrate_cmd->add_option("--beta", cal_beta, "Post-selection angle (rad)")->required();
    calibrate_cmd->add_option("--mode", cal_mode, "analytic, simulated or spread");
    calibrate_cmd->add_option("--alpha", cal_alpha, "Phase nodes lo:hi:count (rad)");
    calibrate_cmd->add_option("--out", cal_out, "Calibration CSV path (sidecar JSON written alongside)");

    auto* estimate_cmd = app.add_subcommand("estimate", "Invert a measured shift into a phase estimate");
    EstimateInputs est;
    add_common(*estimate_cmd, common);
    estimate_cmd->add_option("--calibration", est.calibration, "Calibration CSV")->required();
    estimate_cmd->add_option("--delta-lambda", est.delta_lambda, "Measured shift magnitude (nm)");
    estimate_cmd->add_option("--spectrum", est.spectrum, "Measured spectrum CSV");
    estimate_cmd->add_option("--reference", est.reference, "Reference spectrum CSV");
    estimate_cmd->add_option("--sigma-dl", est.sigma_dl, "Shift uncertainty (nm)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(args, common, sim_alpha, sim_theta, sim_beta, warn);
        if (*sweep_cmd) return cmd_sweep(args, common, sweep_betas, sweep_alpha, sweep_theta, out, warn);
        if (*calibrate_cmd) return cmd_calibrate(args, common, cal_beta, cal_mode, cal_alpha, cal_out, out);
        if (*estimate_cmd) return cmd_estimate(args, common, est, estimate_cmd->count("--out-dir") > 0, out);
    } catch (const ExtrapolationRefused& e) {
        ojson range{{"min_delta_lambda_nm", e.lo}, {"max_delta_lambda_nm", e.hi}};
        err << "error: " << e.what() << '\n' << "valid range: " << range.dump() << '\n';
        return exit_estimation_range;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_config;
}

}  // namespace wvpe::cli
