#include "wvpe/config.hpp"

#include <initializer_list>
#include <set>

#include "wvpe/errors.hpp"
#include "wvpe/io.hpp"

namespace wvpe {

using nlohmann::json;

namespace {

constexpr double znse_index = 2.48;

SlabSpec constant_slab(double thickness_mm, double n)
{
    return {thickness_mm, IndexModel::constant(n), "constant:" + io::exact(n)};
}

// Typed access to one JSON object with field paths in every error message.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) fail(path_, "expected an object");
    }

    void allow(std::initializer_list<std::string_view> keys) const
    {
        const std::set<std::string_view> allowed(keys);
        for (const auto& [key, value] : obj_.items()) {
            if (!allowed.contains(key)) fail(child(key), "unknown field");
        }
    }

    std::optional<double> number(std::string_view key) const
    {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) fail(child(key), "expected a number");
        return v->get<double>();
    }

    std::optional<bool> boolean(std::string_view key) const
    {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) fail(child(key), "expected true or false");
        return v->get<bool>();
    }

    std::optional<std::string> string(std::string_view key) const
    {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) fail(child(key), "expected a string");
        return v->get<std::string>();
    }

    const json* find(std::string_view key) const
    {
        auto it = obj_.find(std::string(key));
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string child(std::string_view key) const
    {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what)
    {
        throw InvalidConfiguration((path.empty() ? std::string("config") : path) + ": " + what);
    }

private:
    const json& obj_;
    std::string path_;
};

SlabSpec parse_slab(const json& v, const std::string& path)
{
    if (v.is_string()) {
        auto slab = named_dispersion(v.get<std::string>());
        if (!slab) Fields::fail(path, "expected a slab description, got 'none'");
        return *slab;
    }
    Fields f(v, path);
    f.allow({"thickness_mm", "index"});
    const auto thickness = f.number("thickness_mm");
    if (!thickness) Fields::fail(f.child("thickness_mm"), "required");
    const json* index = f.find("index");
    if (!index || index->is_number()) {
        return constant_slab(*thickness, index ? index->get<double>() : znse_index);
    }
    if (index->is_string()) {
        if (index->get<std::string>() != "znse_single_pole") {
            Fields::fail(f.child("index"), "expected a number, \"znse_single_pole\" or {\"table\": path}");
        }
        return {*thickness, IndexModel::znse_single_pole(), "znse_single_pole"};
    }
    Fields t(*index, f.child("index"));
    t.allow({"table"});
    const auto table = t.string("table");
    if (!table) Fields::fail(t.child("table"), "required");
    return {*thickness, IndexModel::from_csv(*table), "table:" + *table};
}

json slab_to_json(const SlabSpec& slab)
{
    json index;
    if (slab.label.starts_with("constant:")) {
        index = slab.index(1.0).value();
    } else if (slab.label.starts_with("table:")) {
        index = json{{"table", slab.label.substr(6)}};
    } else {
        index = slab.label;
    }
    return json{{"thickness_mm", slab.thickness_mm}, {"index", index}};
}

}  // namespace

void apply_preset(SetupConfig& config, std::string_view name)
{
    if (name == "led808") {
        config.source = {808.0, 38.8};
        config.dispersion.reset();
    } else if (name == "znse") {
        config.source = {805.0, 41.6};
        config.dispersion = named_dispersion("znse_1mm");
    } else if (name == "filtered") {
        config.source = {795.0, 18.9};
        config.dispersion = named_dispersion("znse_1mm");
    } else {
        throw InvalidConfiguration("unknown preset '" + std::string(name) + "' (expected led808, znse or filtered)");
    }
    config.plate.lambda0_design = config.source.lambda0;
}

std::optional<SlabSpec> named_dispersion(std::string_view name)
{
    if (name == "none") return std::nullopt;
    if (name == "znse_1mm") return constant_slab(1.0, znse_index);
    throw InvalidConfiguration("unknown dispersion '" + std::string(name) + "' (expected none or znse_1mm)");
}

void apply_config_json(SetupConfig& config, const json& doc, bool& design_wavelength_set)
{
    Fields root(doc, "");
    root.allow({"schema_version", "preset", "source", "plate", "postselection", "dispersion", "spectrometer",
                "simulation", "seed"});

    const json* version = root.find("schema_version");
    if (!version) Fields::fail("schema_version", "required");
    if (!version->is_number_integer() || version->get<int>() != config_schema_version) {
        Fields::fail("schema_version", "unsupported version (expected " + std::to_string(config_schema_version) + ")");
    }

    if (auto preset = root.string("preset")) apply_preset(config, *preset);

    if (const json* v = root.find("source")) {
        Fields f(*v, "source");
        f.allow({"lambda0_nm", "delta_lambda_nm"});
        if (auto x = f.number("lambda0_nm")) config.source.lambda0 = *x;
        if (auto x = f.number("delta_lambda_nm")) config.source.delta_lambda = *x;
    }
    if (const json* v = root.find("plate")) {
        Fields f(*v, "plate");
        f.allow({"theta_rad", "n0", "design_wavelength_nm", "alpha_rad"});
        if (auto x = f.number("theta_rad")) config.plate.theta = *x;
        if (auto x = f.number("n0")) config.plate.n0 = *x;
        if (auto x = f.number("design_wavelength_nm")) {
            config.plate.lambda0_design = *x;
            design_wavelength_set = true;
        }
        if (const json* a = f.find("alpha_rad")) {
            if (a->is_null()) config.alpha_override.reset();
            else if (a->is_number()) config.alpha_override = a->get<double>();
            else Fields::fail("plate.alpha_rad", "expected a number or null");
        }
    }
    if (const json* v = root.find("postselection")) {
        Fields f(*v, "postselection");
        f.allow({"beta_rad", "spread_rad", "weighting"});
        if (auto x = f.number("beta_rad")) config.postsel.beta = *x;
        if (auto x = f.number("spread_rad")) config.postsel.spread = *x;
        if (auto w = f.string("weighting")) {
            if (*w == "exact") config.weighting = SpreadWeighting::exact;
            else if (*w == "paper") config.weighting = SpreadWeighting::paper;
            else Fields::fail("postselection.weighting", "expected \"exact\" or \"paper\"");
        }
    }
    if (const json* v = root.find("dispersion")) {
        if (v->is_null()) config.dispersion.reset();
        else if (v->is_string() && v->get<std::string>() == "none") config.dispersion.reset();
        else config.dispersion = parse_slab(*v, "dispersion");
    }
    if (const json* v = root.find("spectrometer")) {
        Fields f(*v, "spectrometer");
        f.allow({"start_nm", "stop_nm", "step_nm", "centroid_noise_nm", "bin_relative_noise", "truncate"});
        const auto& g = config.spectrometer.grid;
        const double start = f.number("start_nm").value_or(g.start());
        const double stop = f.number("stop_nm").value_or(g.stop());
        const double step = f.number("step_nm").value_or(g.step());
        config.spectrometer.grid = WavelengthGrid::spanning(start, stop, step);
        if (auto x = f.number("centroid_noise_nm")) config.spectrometer.centroid_noise_nm = *x;
        if (auto x = f.number("bin_relative_noise")) config.spectrometer.bin_relative_noise = *x;
        if (auto x = f.boolean("truncate")) config.spectrometer.truncate = *x;
    }
    if (const json* v = root.find("simulation")) {
        Fields f(*v, "simulation");
        f.allow({"half_width_sigma", "step_nm"});
        if (auto x = f.number("half_width_sigma")) config.simulation.half_width_sigma = *x;
        if (auto x = f.number("step_nm")) config.simulation.step_nm = *x;
    }
    if (const json* v = root.find("seed")) {
        if (!v->is_number_unsigned()) Fields::fail("seed", "expected a non-negative integer");
        config.seed = v->get<std::uint64_t>();
    }
}

nlohmann::ordered_json to_json(const SetupConfig& c)
{
    nlohmann::ordered_json out;
    out["schema_version"] = config_schema_version;
    out["source"] = {{"lambda0_nm", c.source.lambda0}, {"delta_lambda_nm", c.source.delta_lambda}};
    nlohmann::ordered_json plate;
    plate["theta_rad"] = c.plate.theta;
    plate["n0"] = c.plate.n0;
    plate["design_wavelength_nm"] = c.plate.lambda0_design;
    plate["alpha_rad"] = c.alpha_override ? nlohmann::ordered_json(*c.alpha_override) : nlohmann::ordered_json();
    out["plate"] = plate;
    out["postselection"] = {{"beta_rad", c.postsel.beta},
                            {"spread_rad", c.postsel.spread},
                            {"weighting", c.weighting == SpreadWeighting::exact ? "exact" : "paper"}};
    out["dispersion"] = c.dispersion ? nlohmann::ordered_json(slab_to_json(*c.dispersion)) : nlohmann::ordered_json();
    out["spectrometer"] = {{"start_nm", c.spectrometer.grid.start()},
                           {"stop_nm", c.spectrometer.grid.stop()},
                           {"step_nm", c.spectrometer.grid.step()},
                           {"centroid_noise_nm", c.spectrometer.centroid_noise_nm},
                           {"bin_relative_noise", c.spectrometer.bin_relative_noise},
                           {"truncate", c.spectrometer.truncate}};
    out["simulation"] = {{"half_width_sigma", c.simulation.half_width_sigma}, {"step_nm", c.simulation.step_nm}};
    out["seed"] = c.seed;
    return out;
}

json read_json_file(const std::filesystem::path& path)
{
    try {
        return json::parse(io::read_text(path));
    } catch (const json::parse_error& e) {
        throw InvalidConfiguration(path.string() + ": " + e.what());
    }
}

}  // namespace wvpe
