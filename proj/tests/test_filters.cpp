#include <doctest.h>

#include <cmath>

#include "thermik/filters.hpp"
#include "thermik/thermal_model.hpp"

using namespace thermik;
using Eigen::VectorXd;

TEST_CASE("lowpass passes constants exactly") {
    const VectorXd x = VectorXd::Constant(500, 3.75);
    const VectorXd y = sysid::lowpass(x, 0.015, 10.0);
    REQUIRE(y.size() == x.size());
    CHECK((y - x).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("lowpass step response follows the analog first-order rise") {
    const double fs = 10.0, fc = 0.015;
    const double tau = sysid::filter_time_constant(fc);
    const int onset = 50;
    const int n = onset + int(8 * tau * fs);
    VectorXd x = VectorXd::Zero(n);
    for (int k = onset; k < n; ++k) x(k) = 1.0;
    const VectorXd y = sysid::lowpass(x, fc, fs);
    double worst = 0.0;
    for (int k = onset; k < n; ++k) {
        const double t = (k - onset) / fs;
        worst = std::max(worst, std::abs(y(k) - (1.0 - std::exp(-t / tau))));
    }
    CHECK(worst <= 0.02);
}

TEST_CASE("lowpass attenuates a sinusoid at 10x cutoff by at least 15 dB") {
    const double fs = 10.0, fc = 0.05, f0 = 10.0 * fc;
    const int n = int(fs * 400);
    VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = std::sin(2.0 * M_PI * f0 * k / fs);
    const VectorXd y = sysid::lowpass(x, fc, fs);
    const double peak = y.tail(n / 2).lpNorm<Eigen::Infinity>();
    CHECK(peak <= std::pow(10.0, -15.0 / 20.0));
}

TEST_CASE("lowpass rejects cutoffs at or above Nyquist") {
    const VectorXd x = VectorXd::Zero(10);
    CHECK_THROWS_AS(sysid::lowpass(x, 5.0, 10.0), InvalidInputError);
    CHECK_THROWS_AS(sysid::lowpass(x, 6.0, 10.0), InvalidInputError);
    CHECK_THROWS_AS(sysid::lowpass(x, 0.0, 10.0), InvalidInputError);
}

TEST_CASE("derivative filter is identically zero for constant input") {
    const VectorXd x = VectorXd::Constant(300, -12.5);
    const VectorXd d = sysid::derivative_filter(x, 0.015, 10.0);
    CHECK(d.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("derivative filter converges to the slope of a ramp") {
    const double fs = 10.0, fc = 0.015, a = 0.37;
    const double tau = sysid::filter_time_constant(fc);
    const int n = int(10 * tau * fs);
    VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = a * k / fs;
    const VectorXd d = sysid::derivative_filter(x, fc, fs);
    for (int k = int(5 * tau * fs); k < n - 1; ++k)
        CHECK(std::abs(d(k) - a) <= 0.02 * a);
}

TEST_CASE("derivative of a first-order trace matches the model rate") {
    // simulated constant-effort response; after the filters settle the
    // estimated rate must match (steady - T)/RC on the filtered trace
    const double fs = 10.0, fc = 0.015;
    const thermal::ThermalParams p{120.0, 0.002, 0.01, 27.0};
    const double effort = 80.0;
    const double ss = thermal::steady_state_temperature(p, effort);
    const int n = int(600 * fs);
    VectorXd temp(n);
    for (int k = 0; k < n; ++k)
        temp(k) = thermal::predict_temperature(p, 25.0, effort, k / fs);
    const VectorXd rate = sysid::derivative_filter(temp, fc, fs);
    const VectorXd temp_filt = sysid::lowpass(temp, fc, fs);
    const double tau = sysid::filter_time_constant(fc);
    for (int k = int(5 * tau * fs); k < n - 1; ++k) {
        const double expected = (ss - temp_filt(k)) / p.rc_time_constant;
        CHECK(std::abs(rate(k) - expected) <= 0.05 * std::abs(expected));
    }
}
