#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "thermik/thermal_model.hpp"

using namespace thermik;
using thermal::ThermalParams;

namespace {

ThermalParams make_params(double rc = 100.0, double beta_r = 0.002, double beta_bias_r = 0.01,
                          double t_offset = 27.0) {
    return {rc, beta_r, beta_bias_r, t_offset};
}

}  // namespace

TEST_CASE("joule heating evaluates the effort quadratic") {
    const ThermalParams p = make_params();
    CHECK(thermal::joule_heating(p, 0.0) == 0.0);
    CHECK(thermal::joule_heating(p, 100.0) == doctest::Approx(19.0).epsilon(1e-12));
    CHECK(thermal::joule_heating(p, -100.0) == doctest::Approx(21.0).epsilon(1e-12));
    CHECK_THROWS_AS(thermal::joule_heating(p, std::nan("")), InvalidInputError);
}

TEST_CASE("joule heating is a convex quadratic with the expected vertex") {
    const ThermalParams p = make_params();
    const double vertex = p.beta_bias_r / (2.0 * p.beta_r);
    const double at_vertex = thermal::joule_heating(p, vertex);
    for (double d : {0.5, 1.0, 10.0, 100.0}) {
        CHECK(thermal::joule_heating(p, vertex + d) > at_vertex);
        CHECK(thermal::joule_heating(p, vertex - d) > at_vertex);
    }
}

TEST_CASE("steady state temperature") {
    SUBCASE("zero effort settles at the offset") {
        const ThermalParams p = make_params(120.0, 0.003, -0.02, 31.5);
        CHECK(thermal::steady_state_temperature(p, 0.0) == 31.5);
    }
    SUBCASE("hand evaluated") {
        const ThermalParams p = make_params(100.0, 0.002, 0.0, 27.0);
        CHECK(thermal::steady_state_temperature(p, 100.0) == doctest::Approx(47.0).epsilon(1e-12));
    }
    SUBCASE("matches the long-horizon closed form to 1e-9") {
        const ThermalParams p = make_params(50.0, 0.004, 0.015, 26.0);
        for (double f : {-80.0, 0.0, 35.0, 120.0}) {
            const double ss = thermal::steady_state_temperature(p, f);
            const double far = thermal::predict_temperature(p, 25.0, f, 1000.0 * p.rc_time_constant);
            CHECK(std::abs(ss - far) <= 1e-9);
        }
    }
}

TEST_CASE("closed-form prediction") {
    SUBCASE("identity at dt = 0") {
        const ThermalParams p = make_params();
        CHECK(thermal::predict_temperature(p, 25.0, 42.0, 0.0) == 25.0);
    }
    SUBCASE("hand evaluated one time constant") {
        // steady state 50 via zero effort and t_offset = 50
        const ThermalParams p = make_params(100.0, 0.001, 0.0, 50.0);
        const double expected = 25.0 * std::exp(-1.0) + 50.0 * (1.0 - std::exp(-1.0));
        CHECK(thermal::predict_temperature(p, 25.0, 0.0, 100.0) ==
              doctest::Approx(expected).epsilon(1e-14));
        CHECK(expected == doctest::Approx(40.803).epsilon(1e-4));
    }
    SUBCASE("steady state is a fixed point") {
        const ThermalParams p = make_params(80.0, 0.002, 0.01, 27.0);
        const double ss = thermal::steady_state_temperature(p, 60.0);
        for (double dt : {0.1, 10.0, 500.0})
            CHECK(thermal::predict_temperature(p, ss, 60.0, dt) ==
                  doctest::Approx(ss).epsilon(1e-13));
    }
    SUBCASE("negative dt rejected") {
        CHECK_THROWS_AS(thermal::predict_temperature(make_params(), 25.0, 0.0, -1.0),
                        InvalidInputError);
    }
}

TEST_CASE("superposition of the initial condition") {
    const ThermalParams p = make_params(100.0, 0.002, 0.01, 27.0);
    for (double dt : {1.0, 50.0, 300.0}) {
        const double a = thermal::predict_temperature(p, 40.0, 70.0, dt);
        const double b = thermal::predict_temperature(p, 15.0, 70.0, dt);
        CHECK(std::abs((a - b) - (40.0 - 15.0) * std::exp(-dt / 100.0)) <= 1e-12);
    }
}

TEST_CASE("euler step") {
    SUBCASE("equilibrium unchanged") {
        const ThermalParams p = make_params(100.0, 0.002, 0.01, 27.0);
        const double ss = thermal::steady_state_temperature(p, 45.0);
        CHECK(thermal::step_euler(p, ss, 45.0, 0.5) == doctest::Approx(ss).epsilon(1e-14));
    }
    SUBCASE("hand evaluated step") {
        const ThermalParams p = make_params(100.0, 0.001, 0.0, 50.0);
        CHECK(thermal::step_euler(p, 25.0, 0.0, 1.0) == doctest::Approx(25.25).epsilon(1e-14));
    }
    SUBCASE("non-positive dt rejected") {
        CHECK_THROWS_AS(thermal::step_euler(make_params(), 25.0, 0.0, 0.0), InvalidInputError);
        CHECK_THROWS_AS(thermal::step_euler(make_params(), 25.0, 0.0, -0.1), InvalidInputError);
    }
}

TEST_CASE("euler at RC/100 tracks the closed form within 0.1% over 5 RC") {
    const ThermalParams p = make_params(120.0, 0.002, 0.01, 27.0);
    const double effort = 90.0;
    const double dt = p.rc_time_constant / 100.0;
    double t = 25.0;
    double worst = 0.0;
    for (int k = 1; k <= 500; ++k) {
        t = thermal::step_euler(p, t, effort, dt);
        const double exact = thermal::predict_temperature(p, 25.0, effort, k * dt);
        worst = std::max(worst, std::abs(t - exact) / std::abs(exact));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("constant-effort trajectories approach steady state monotonically") {
    const ThermalParams p = make_params(60.0, 0.003, -0.005, 28.0);
    for (double t0 : {5.0, 28.0, 95.0}) {
        for (double effort : {-40.0, 0.0, 75.0}) {
            const double ss = thermal::steady_state_temperature(p, effort);
            double prev = t0;
            double prev_gap = std::abs(t0 - ss);
            for (int k = 1; k <= 200; ++k) {
                const double cur = thermal::predict_temperature(p, t0, effort, k * 2.0);
                const double gap = std::abs(cur - ss);
                CHECK(gap <= prev_gap + 1e-12);          // never overshoots
                if (t0 < ss) CHECK(cur >= prev - 1e-12);  // monotone rise
                else CHECK(cur <= prev + 1e-12);          // monotone fall
                prev = cur;
                prev_gap = gap;
            }
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(thermal::validate(make_params(0.0)), InvalidInputError);
    CHECK_THROWS_AS(thermal::validate(make_params(-5.0)), InvalidInputError);
    CHECK_THROWS_AS(thermal::validate(make_params(100.0, 0.0)), InvalidInputError);
    CHECK_THROWS_AS(thermal::validate(make_params(100.0, -0.1)), InvalidInputError);
    CHECK_THROWS_AS(thermal::validate(make_params(100.0, 0.002, std::nan(""))),
                    InvalidInputError);
    CHECK_NOTHROW(thermal::validate(make_params(100.0, 0.002, -0.01)));  // bias sign is free
}

TEST_CASE("params serialize through the structured document") {
    const ThermalParams p = make_params(123.456, 0.00789, -0.0123, 26.75);
    const ThermalParams back = thermal::thermal_params_from_json(thermal::thermal_params_to_json(p));
    CHECK(back.rc_time_constant == p.rc_time_constant);
    CHECK(back.beta_r == p.beta_r);
    CHECK(back.beta_bias_r == p.beta_bias_r);
    CHECK(back.t_offset == p.t_offset);

    const std::string path = (std::filesystem::temp_directory_path() / "tk_params.json").string();
    thermal::save_thermal_params(p, path);
    const ThermalParams loaded = thermal::load_thermal_params(path);
    CHECK(loaded.rc_time_constant == p.rc_time_constant);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(thermal::thermal_params_from_json("{\"rc\": 10}"), SchemaError);
    CHECK_THROWS_AS(thermal::thermal_params_from_json("not json"), SchemaError);
}
