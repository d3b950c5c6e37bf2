#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wvpe/errors.hpp"
#include "wvpe/weakvalue.hpp"

using namespace wvpe;

namespace {

const SourceParams led{808.0, 38.8};

}  // namespace

TEST_CASE("exact weak value")
{
    const auto pole = weak_value_exact(0.0, std::numbers::pi / 2);
    CHECK(pole.re == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(pole.im) < 1e-15);

    // References from 40-digit evaluation of the cotangent form.
    const auto real_only = weak_value_exact(0.0, 0.02);
    CHECK(real_only.re == doctest::Approx(-99.99666664444423).epsilon(1e-12));
    CHECK(std::abs(real_only.im) < 1e-12);

    const auto complex_wv = weak_value_exact(0.01, 0.01);
    CHECK(complex_wv.re == doctest::Approx(-100.00166668611132).epsilon(1e-11));
    CHECK(complex_wv.im == doctest::Approx(99.99666664444423).epsilon(1e-11));

    CHECK_THROWS_AS(weak_value_exact(0.0, 0.0), OrthogonalPostselection);
}

TEST_CASE("property: weak value is the same at every point inside the plate")
{
    oracle::Gen gen(42);
    for (int i = 0; i < 200; ++i) {
        const double alpha = gen.uniform(-0.5, 0.5);
        const double beta = gen.uniform(0.001, 1.5);
        const auto ref = weak_value_exact(alpha, beta);
        for (double x : {0.0, 1.0 / 3.0, 1.0}) {
            const auto w = weak_value_two_state(alpha, beta, x);
            const double scale = std::max(1.0, std::hypot(ref.re, ref.im));
            REQUIRE(std::abs(w.re - ref.re) < 1e-12 * scale);
            REQUIRE(std::abs(w.im - ref.im) < 1e-12 * scale);
        }
    }
}

TEST_CASE("small-angle weak value")
{
    const auto w = weak_value_smallangle(0.0, 0.01);
    CHECK(w.re == doctest::Approx(100.0));
    CHECK(w.im == 0.0);
    CHECK(im_weak_value_smallangle(0.004, 0.004) == doctest::Approx(125.0).epsilon(1e-14));
    for (double a : {1e-4, 0.003, 0.2}) CHECK(im_weak_value_smallangle(a, a) == doctest::Approx(1 / (2 * a)));
    CHECK(weak_value_smallangle(0.004, 0.004).im == doctest::Approx(125.0));
    CHECK_THROWS_AS(weak_value_smallangle(0.0, 0.0), OrthogonalPostselection);
    CHECK_THROWS_AS(im_weak_value_smallangle(0.0, 0.0), OrthogonalPostselection);
}

TEST_CASE("exact weak value approaches twice the printed imaginary part")
{
    // Along alpha = beta, Im A_w (beta^2 + alpha^2) / alpha -> 2 (and the printed form gives 1).
    double previous = 1e9;
    for (double a : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const double ratio = weak_value_exact(a, a).im * (2 * a * a) / a;
        const double err = std::abs(ratio - 2.0);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 1e-8);
    CHECK(im_weak_value_smallangle(1e-5, 1e-5) * (2e-10) / 1e-5 == doctest::Approx(1.0));
}

TEST_CASE("momentum shift")
{
    const auto m = momentum_stats(led);
    CHECK(momentum_shift(CouplingParams::make(0.0, 0.004, 808.0), m.delta_p) == 0.0);
    for (double a : {1e-4, 0.004, 0.3}) {
        CHECK(momentum_shift(CouplingParams::make(a, 0.0, 808.0), m.delta_p) ==
              doctest::Approx(2 * m.delta_p * m.delta_p / m.p0).epsilon(1e-13));
    }
    CHECK(momentum_shift(CouplingParams::make(0.004, 0.004, 808.0), m.delta_p) ==
          doctest::Approx(1.793119515415056e-5).epsilon(1e-12));
    CHECK(CouplingParams::make(0.004, 0.004, 808.0).k == doctest::Approx(0.004 / m.p0));
    CHECK_THROWS_AS(momentum_shift(CouplingParams::make(0.0, 0.0, 808.0), m.delta_p), OrthogonalPostselection);
}

TEST_CASE("property: both coupling pairings and the wavelength form agree")
{
    oracle::Gen gen(11);
    for (int i = 0; i < 300; ++i) {
        const double alpha = gen.uniform(1e-5, 0.05);
        const double beta = gen.uniform(0.0, 0.05);
        const SourceParams src{gen.uniform(600.0, 1000.0), gen.uniform(5.0, 60.0)};
        const double dp = momentum_stats(src).delta_p;
        const double printed = momentum_shift(CouplingParams::make(alpha, beta, src.lambda0), dp);
        const double jones =
            momentum_shift(CouplingParams::make(alpha, beta, src.lambda0, CouplingPairing::jones), dp);
        REQUIRE(jones == doctest::Approx(printed).epsilon(1e-14));
        const double in_wavelength = src.lambda0 * src.lambda0 * printed / (2 * std::numbers::pi);
        REQUIRE(std::abs(in_wavelength - wavelength_shift_analytic(alpha, beta, src)) <=
                1e-12 * wavelength_shift_analytic(alpha, beta, src));
    }
}

TEST_CASE("analytic wavelength shift")
{
    CHECK(wavelength_shift_analytic(0.0, 0.004, led) == 0.0);
    CHECK(wavelength_shift_analytic(0.004, 0.004, led) == doctest::Approx(1.863168316831683).epsilon(1e-14));
    CHECK(wavelength_shift_analytic(0.013, 0.014, led) == doctest::Approx(1.725344907093449).epsilon(1e-13));
    CHECK_THROWS_AS(wavelength_shift_analytic(0.0, 0.0, led), OrthogonalPostselection);
}

TEST_CASE("property: analytic shift symmetry, monotonicity and bound")
{
    oracle::Gen gen(5);
    const double ceiling = 2 * led.delta_lambda * led.delta_lambda / led.lambda0;
    for (int i = 0; i < 500; ++i) {
        const double a = gen.uniform(1e-5, 0.05);
        const double b = gen.uniform(1e-5, 0.05);
        const double v = wavelength_shift_analytic(a, b, led);
        REQUIRE(wavelength_shift_analytic(-a, b, led) == v);
        REQUIRE(wavelength_shift_analytic(a, -b, led) == v);
        REQUIRE(wavelength_shift_analytic(a, b * 1.01, led) < v);
        REQUIRE(wavelength_shift_analytic(a * 1.01, b, led) > v);
        REQUIRE(v < ceiling);
        REQUIRE(wavelength_shift_analytic(a, 0.0, led) == doctest::Approx(ceiling).epsilon(1e-15));

        const double h = 1e-7 * a;
        const double fd = (wavelength_shift_analytic(a + h, b, led) - wavelength_shift_analytic(a - h, b, led)) / (2 * h);
        REQUIRE(wavelength_shift_slope(a, b, led) == doctest::Approx(fd).epsilon(1e-5));
    }
}
