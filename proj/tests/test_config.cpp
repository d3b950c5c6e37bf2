#include <doctest.h>

#include <filesystem>
#include <string>

#include "wvpe/config.hpp"
#include "wvpe/errors.hpp"
#include "wvpe/io.hpp"

using namespace wvpe;
using nlohmann::json;

namespace {

SetupConfig apply(const json& doc)
{
    SetupConfig c;
    bool design_set = false;
    apply_config_json(c, doc, design_set);
    return c;
}

std::string error_of(const json& doc)
{
    try {
        apply(doc);
    } catch (const InvalidConfiguration& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("presets")
{
    SetupConfig c;
    apply_preset(c, "znse");
    CHECK(c.source.lambda0 == 805.0);
    CHECK(c.source.delta_lambda == 41.6);
    REQUIRE(c.dispersion.has_value());
    CHECK(c.dispersion->thickness_mm == 1.0);

    apply_preset(c, "filtered");
    CHECK(c.source.lambda0 == 795.0);
    CHECK(c.source.delta_lambda == 18.9);

    apply_preset(c, "led808");
    CHECK(c.source.lambda0 == 808.0);
    CHECK(c.source.delta_lambda == 38.8);
    CHECK_FALSE(c.dispersion.has_value());

    CHECK_THROWS_AS(apply_preset(c, "laser"), InvalidConfiguration);
}

TEST_CASE("named dispersion")
{
    CHECK_FALSE(named_dispersion("none").has_value());
    const auto slab = named_dispersion("znse_1mm");
    REQUIRE(slab.has_value());
    CHECK(slab->index(808.0).value() == 2.48);
    CHECK_THROWS_AS(named_dispersion("bk7"), InvalidConfiguration);
}

TEST_CASE("config document")
{
    const auto c = apply(json::parse(R"({
        "schema_version": 1,
        "source": {"lambda0_nm": 800, "delta_lambda_nm": 30},
        "plate": {"theta_rad": 0.1, "n0": 1.5, "alpha_rad": 0.004},
        "postselection": {"beta_rad": 0.002, "spread_rad": 0.001, "weighting": "paper"},
        "dispersion": {"thickness_mm": 2, "index": 2.5},
        "spectrometer": {"start_nm": 700, "stop_nm": 900, "step_nm": 0.05, "centroid_noise_nm": 0.1,
                         "truncate": true},
        "simulation": {"half_width_sigma": 6},
        "seed": 12345
    })"));
    CHECK(c.source.lambda0 == 800.0);
    CHECK(c.plate.theta == 0.1);
    CHECK(c.plate.n0 == 1.5);
    CHECK(c.alpha() == 0.004);
    CHECK(c.postsel.spread == 0.001);
    CHECK(c.weighting == SpreadWeighting::paper);
    REQUIRE(c.dispersion.has_value());
    CHECK(c.dispersion->thickness_mm == 2.0);
    CHECK(c.spectrometer.grid.size() == 4001);
    CHECK(c.spectrometer.truncate);
    CHECK(c.simulation.half_width_sigma == 6.0);
    CHECK(c.seed == 12345u);
}

TEST_CASE("design wavelength follows whether the document sets it")
{
    SetupConfig c;
    bool design_set = false;
    apply_config_json(c, json::parse(R"({"schema_version": 1, "preset": "znse"})"), design_set);
    CHECK_FALSE(design_set);
    apply_config_json(c, json::parse(R"({"schema_version": 1, "plate": {"design_wavelength_nm": 790}})"), design_set);
    CHECK(design_set);
    CHECK(c.plate.lambda0_design == 790.0);
}

TEST_CASE("config errors name the field")
{
    CHECK(error_of(json::parse(R"({"source": {}})")).find("schema_version: required") != std::string::npos);
    CHECK(error_of(json::parse(R"({"schema_version": 2})")).find("schema_version") != std::string::npos);
    CHECK(error_of(json::parse(R"({"schema_version": 1, "postselection": {"beta_rad": "x"}})")) ==
          "postselection.beta_rad: expected a number");
    CHECK(error_of(json::parse(R"({"schema_version": 1, "plate": {"tilt": 0.1}})")) == "plate.tilt: unknown field");
    CHECK(error_of(json::parse(R"({"schema_version": 1, "colour": 1})")) == "colour: unknown field");
    CHECK(error_of(json::parse(R"({"schema_version": 1, "seed": -4})")).starts_with("seed:"));
    CHECK(error_of(json::parse(R"({"schema_version": 1, "postselection": {"weighting": "mean"}})"))
              .starts_with("postselection.weighting"));
    CHECK(error_of(json::parse(R"({"schema_version": 1, "dispersion": {"index": 2.4}})")) ==
          "dispersion.thickness_mm: required");
    CHECK(error_of(json::parse(R"({"schema_version": 1, "dispersion": {"thickness_mm": 1, "index": "glass"}})"))
              .starts_with("dispersion.index"));
    CHECK(error_of(json::parse(R"({"schema_version": 1, "spectrometer": {"truncate": 1}})")) ==
          "spectrometer.truncate: expected true or false");
    CHECK(error_of(json::parse(R"([1, 2])")).starts_with("config: expected an object"));
}

TEST_CASE("dispersion forms")
{
    CHECK_FALSE(apply(json::parse(R"({"schema_version": 1, "preset": "znse", "dispersion": null})")).dispersion);
    CHECK_FALSE(apply(json::parse(R"({"schema_version": 1, "preset": "znse", "dispersion": "none"})")).dispersion);
    CHECK(apply(json::parse(R"({"schema_version": 1, "dispersion": "znse_1mm"})")).dispersion.has_value());
    const auto sellmeier =
        apply(json::parse(R"({"schema_version": 1, "dispersion": {"thickness_mm": 1, "index": "znse_single_pole"}})"));
    CHECK(sellmeier.dispersion->index(808.0).value() == doctest::Approx(2.5095).epsilon(1e-3));

    const auto table = std::filesystem::temp_directory_path() / "wvpe_config_index.csv";
    io::write_text(table, "wavelength_nm,index\n600,2.55\n1100,2.44\n");
    json doc{{"schema_version", 1}, {"dispersion", {{"thickness_mm", 1}, {"index", {{"table", table.string()}}}}}};
    const auto tabulated = apply(doc);
    REQUIRE(tabulated.dispersion.has_value());
    CHECK(tabulated.dispersion->index(850.0).value() == doctest::Approx(2.495));
}

TEST_CASE("resolved config round trip")
{
    const auto table = std::filesystem::temp_directory_path() / "wvpe_config_index2.csv";
    io::write_text(table, "wavelength_nm,index\n600,2.55\n1100,2.44\n");
    for (const char* dispersion : {"null", "\"znse_1mm\"", "{\"thickness_mm\": 0.5, \"index\": \"znse_single_pole\"}"}) {
        const auto original = apply(json::parse(std::string(R"({"schema_version": 1, "preset": "filtered",
            "plate": {"theta_rad": 0.12, "alpha_rad": null},
            "postselection": {"beta_rad": 0.003, "spread_rad": 0.002},
            "spectrometer": {"centroid_noise_nm": 0.2}, "seed": 99, "dispersion": )") + dispersion + "}"));
        const auto dumped = to_json(original);
        const auto again = apply(json::parse(dumped.dump()));
        CHECK(to_json(again).dump() == dumped.dump());
        CHECK(again.alpha() == original.alpha());
        CHECK(again.spectrometer.grid == original.spectrometer.grid);
    }
    json doc{{"schema_version", 1}, {"dispersion", {{"thickness_mm", 1}, {"index", {{"table", table.string()}}}}}};
    const auto dumped = to_json(apply(doc));
    CHECK(to_json(apply(json::parse(dumped.dump()))).dump() == dumped.dump());
}

TEST_CASE("reading config files")
{
    const auto path = std::filesystem::temp_directory_path() / "wvpe_bad.json";
    io::write_text(path, "{ not json");
    CHECK_THROWS_AS(read_json_file(path), InvalidConfiguration);
    CHECK_THROWS_AS(read_json_file(path.string() + ".missing"), InvalidConfiguration);
}
