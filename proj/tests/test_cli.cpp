#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "wvpe/cli.hpp"
#include "wvpe/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome wvpe_run(std::vector<std::string> args)
{
    args.insert(args.begin(), "wvpe");
    std::ostringstream out, err;
    const int code = wvpe::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "wvpe_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json read_json(const fs::path& p) { return json::parse(wvpe::io::read_text(p)); }

}  // namespace

TEST_CASE("version and help")
{
    const auto v = wvpe_run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out == "0.1.0\n");
    const auto h = wvpe_run({"sweep", "--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("--beta") != std::string::npos);
}

TEST_CASE("usage errors exit with 2")
{
    CHECK(wvpe_run({}).code == 2);
    CHECK(wvpe_run({"simulate", "--bogus"}).code == 2);
    CHECK(wvpe_run({"sweep", "--alpha", "0:0.01:3"}).code == 2);
    const auto both = wvpe_run({"sweep", "--beta", "0.004", "--alpha", "0:0.01:3", "--theta", "0:0.1:3"});
    CHECK(both.code == 2);
    const auto range = wvpe_run({"sweep", "--beta", "0.004", "--alpha", "0.01:0:3", "--out-dir",
                                 fresh_dir("range").string()});
    CHECK(range.code == 2);
    CHECK(range.err.find("--alpha") != std::string::npos);
    CHECK(wvpe_run({"simulate", "--preset", "laser", "--out-dir", fresh_dir("preset").string()}).code == 2);
}

TEST_CASE("config errors name the field")
{
    const auto dir = fresh_dir("config");
    wvpe::io::write_text(dir / "c.json", R"({"schema_version": 1, "postselection": {"beta_rad": "x"}})");
    const auto r = wvpe_run({"simulate", "--config", (dir / "c.json").string(), "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("postselection.beta_rad: expected a number") != std::string::npos);
}

TEST_CASE("simulate")
{
    const auto dir = fresh_dir("simulate");
    const auto r = wvpe_run({"simulate", "--alpha", "0.004", "--beta", "0.004", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    const auto result = read_json(dir / "result.json");
    CHECK(result["delta_lambda_nm"].get<double>() == doctest::Approx(1.882771445).epsilon(1e-8));
    CHECK(result["postselect_prob"].get<double>() > 0.0);
    CHECK(result["reference_centroid_nm"].get<double>() == doctest::Approx(808.0));
    CHECK(fs::exists(dir / "spectrum.csv"));
    CHECK(wvpe::io::read_text(dir / "spectrum.csv").starts_with("wavelength_nm,intensity\n"));

    const auto m = read_json(dir / "manifest.json");
    CHECK(m["tool"] == "wvpe");
    CHECK(m["version"] == "0.1.0");
    CHECK(m["command"] == "simulate");
    CHECK(m["seed"] == 1);
    CHECK(m["outputs"] == json::array({"spectrum.csv", "result.json"}));
    CHECK(m["arguments"] == json::array({"--alpha", "0.004", "--beta", "0.004"}));

    const auto s = wvpe_run({"simulate", "--alpha", "0.004", "--beta", "0.004", "--signed", "--out-dir", dir.string()});
    REQUIRE(s.code == 0);
    CHECK(read_json(dir / "result.json")["delta_lambda_nm"].get<double>() < 0.0);
}

TEST_CASE("simulate with tilt and presets")
{
    const auto dir = fresh_dir("tilt");
    REQUIRE(wvpe_run({"simulate", "--theta", "0.14", "--beta", "0.013", "--out-dir", dir.string()}).code == 0);
    CHECK(read_json(dir / "result.json")["alpha_rad"].get<double>() == doctest::Approx(0.012977162526911895));

    REQUIRE(wvpe_run({"simulate", "--preset", "filtered", "--alpha", "0.004", "--beta", "0.004", "--out-dir",
                      dir.string()})
                .code == 0);
    CHECK(read_json(dir / "result.json")["delta_lambda_nm"].get<double>() ==
          doctest::Approx(0.450458670).epsilon(1e-7));
    const auto resolved = read_json(dir / "manifest.json")["resolved_config"];
    CHECK(resolved["plate"]["design_wavelength_nm"] == 795.0);
    CHECK(resolved["dispersion"]["thickness_mm"] == 1.0);
}

TEST_CASE("no photons exits with 3")
{
    const auto r = wvpe_run({"simulate", "--alpha", "0", "--beta", "0", "--out-dir", fresh_dir("dark").string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("sweep writes one table per beta")
{
    const auto dir = fresh_dir("sweep");
    const auto r = wvpe_run({"sweep", "--beta", "0", "0.004", "--alpha", "0:0.013:5", "--out-dir", dir.string(),
                             "--threads", "2"});
    REQUIRE(r.code == 0);
    const auto text = wvpe::io::read_text(dir / "sweep_beta_0.004.csv");
    CHECK(text.starts_with("theta_rad,alpha_rad,beta_rad,delta_lambda_nm,postselect_prob\n,0,0.004,0,"));
    const auto zero = wvpe::io::read_text(dir / "sweep_beta_0.csv");
    CHECK(zero.find(",0,0,nan,nan\n") != std::string::npos);
    const auto m = read_json(dir / "manifest.json");
    CHECK(m["row_errors"].size() == 1);
    CHECK(m["outputs"] == json::array({"sweep_beta_0.csv", "sweep_beta_0.004.csv"}));
    CHECK(r.err.find("warning:") != std::string::npos);

    const auto all_bad = wvpe_run({"sweep", "--beta", "0", "--alpha", "0:0:1", "--out-dir", dir.string()});
    CHECK(all_bad.code == 3);
}

TEST_CASE("sweep over tilt fills the theta column")
{
    const auto dir = fresh_dir("sweep_theta");
    REQUIRE(wvpe_run({"sweep", "--beta", "0.004", "--theta", "0:0.14:3", "--out-dir", dir.string()}).code == 0);
    const auto text = wvpe::io::read_text(dir / "sweep_beta_0.004.csv");
    CHECK(text.find("\n0.14,0.0129771625,0.004,") != std::string::npos);
}

TEST_CASE("sweep output is identical across runs and thread counts")
{
    const std::vector<std::string> base{"sweep", "--beta", "0.004", "0.014", "--alpha", "0:0.013:14",
                                        "--centroid-noise", "0.1", "--seed", "42"};
    std::vector<std::string> contents;
    for (const char* threads : {"1", "3", "1"}) {
        const auto dir = fresh_dir(std::string("det_") + threads + std::to_string(contents.size()));
        auto args = base;
        args.insert(args.end(), {"--threads", threads, "--out-dir", dir.string()});
        REQUIRE(wvpe_run(args).code == 0);
        contents.push_back(wvpe::io::read_text(dir / "sweep_beta_0.004.csv") +
                           wvpe::io::read_text(dir / "sweep_beta_0.014.csv"));
    }
    CHECK(contents[0] == contents[1]);
    CHECK(contents[0] == contents[2]);
}

TEST_CASE("calibrate and estimate")
{
    const auto dir = fresh_dir("calibrate");
    const auto cal = dir / "cal.csv";
    const auto c = wvpe_run({"calibrate", "--beta", "0.004", "--out", cal.string()});
    REQUIRE(c.code == 0);
    CHECK(fs::exists(cal));
    CHECK(fs::exists(dir / "cal.json"));
    CHECK(fs::exists(dir / "cal.manifest.json"));

    const auto e = wvpe_run({"estimate", "--calibration", cal.string(), "--delta-lambda", "1.863168316831683"});
    REQUIRE(e.code == 0);
    const auto doc = json::parse(e.out);
    CHECK(doc["alpha_hat_rad"].get<double>() == doctest::Approx(0.004).epsilon(1e-6));
    CHECK(doc["sigma_alpha_rad"].get<double>() == doctest::Approx(2.1468806e-4).epsilon(1e-3));
    CHECK(doc["beta_used_rad"] == 0.004);
    CHECK(doc["method"] == "curve-inversion");

    const auto out_dir = fresh_dir("estimate_out");
    REQUIRE(wvpe_run({"estimate", "--calibration", cal.string(), "--delta-lambda", "1.0", "--out-dir",
                      out_dir.string()})
                .code == 0);
    CHECK(fs::exists(out_dir / "estimate.json"));
    CHECK(read_json(out_dir / "manifest.json")["command"] == "estimate");
}

TEST_CASE("estimate from spectra")
{
    const auto cal_dir = fresh_dir("spectra_cal");
    const auto cal = cal_dir / "cal.csv";
    REQUIRE(wvpe_run({"calibrate", "--beta", "0.004", "--mode", "simulated", "--out", cal.string()}).code == 0);
    const auto measured = fresh_dir("spectra_measured");
    const auto reference = fresh_dir("spectra_reference");
    REQUIRE(wvpe_run({"simulate", "--alpha", "0.008", "--beta", "0.004", "--out-dir", measured.string()}).code == 0);
    REQUIRE(wvpe_run({"simulate", "--alpha", "0", "--beta", "0.004", "--out-dir", reference.string()}).code == 0);
    const auto e = wvpe_run({"estimate", "--calibration", cal.string(), "--spectrum",
                             (measured / "spectrum.csv").string(), "--reference",
                             (reference / "spectrum.csv").string()});
    REQUIRE(e.code == 0);
    CHECK(std::abs(json::parse(e.out)["alpha_hat_rad"].get<double>() - 0.008) < 1e-4);

    CHECK(wvpe_run({"estimate", "--calibration", cal.string(), "--spectrum", (measured / "spectrum.csv").string()})
              .code == 2);
}

TEST_CASE("calibration and range errors exit with 4 and 5")
{
    const auto dir = fresh_dir("errors");
    const auto bad = wvpe_run({"calibrate", "--beta", "0", "--out", (dir / "zero.csv").string()});
    CHECK(bad.code == 4);
    CHECK(bad.err.find("spread") != std::string::npos);

    const auto cal = dir / "cal.csv";
    REQUIRE(wvpe_run({"calibrate", "--beta", "0.004", "--out", cal.string()}).code == 0);
    const auto far = wvpe_run({"estimate", "--calibration", cal.string(), "--delta-lambda", "9"});
    CHECK(far.code == 5);
    CHECK(far.err.find("valid range") != std::string::npos);
    CHECK(far.err.find("max_delta_lambda_nm") != std::string::npos);

    wvpe::io::write_text(cal, wvpe::io::read_text(cal) + "0.02,3.7\n");
    CHECK(wvpe_run({"estimate", "--calibration", cal.string(), "--delta-lambda", "1"}).code == 4);
}

TEST_CASE("manifest reproduces the run")
{
    const auto first = fresh_dir("rerun_first");
    REQUIRE(wvpe_run({"sweep", "--preset", "znse", "--beta", "0.004", "--alpha", "0:0.013:6", "--spread", "0.001",
                      "--centroid-noise", "0.1", "--seed", "7", "--out-dir", first.string()})
                .code == 0);
    const auto m = read_json(first / "manifest.json");

    const auto second = fresh_dir("rerun_second");
    wvpe::io::write_text(second / "config.json", m["resolved_config"].dump(2));
    std::vector<std::string> args{m["command"].get<std::string>()};
    for (const auto& a : m["arguments"]) args.push_back(a.get<std::string>());
    args.insert(args.end(), {"--config", (second / "config.json").string(), "--out-dir", second.string()});
    REQUIRE(wvpe_run(args).code == 0);
    CHECK(wvpe::io::read_text(first / "sweep_beta_0.004.csv") == wvpe::io::read_text(second / "sweep_beta_0.004.csv"));
    CHECK(read_json(second / "manifest.json")["resolved_config"] == m["resolved_config"]);
}

TEST_CASE("executable")
{
    const auto dir = fresh_dir("exe");
    const std::string cmd = std::string("\"") + WVPE_CLI_PATH + "\" simulate --alpha 0.004 --beta 0.004 --out-dir \"" +
                            dir.string() + "\" > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(read_json(dir / "result.json")["delta_lambda_nm"].get<double>() == doctest::Approx(1.882771445).epsilon(1e-8));

    const std::string bad = std::string("\"") + WVPE_CLI_PATH + "\" estimate > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 2);
}
