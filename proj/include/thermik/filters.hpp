#pragma once

#include <cmath>

#include <Eigen/Core>

#include "thermik/errors.hpp"

namespace thermik::sysid {

/// Single-pole IIR low-pass (bilinear transform of 1/(s/wc + 1)).
/// State is seeded with the first sample, so a constant signal passes
/// through unchanged and the DC gain is exactly 1.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
lowpass(const Eigen::DenseBase<Derived>& signal, double cutoff_hz, double sample_rate_hz) {
    using Scalar = typename Derived::Scalar;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    if (!(sample_rate_hz > 0.0))
        throw InvalidInputError("lowpass: sample rate must be positive");
    if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * sample_rate_hz)
        throw InvalidInputError("lowpass: cutoff must lie in (0, Nyquist), got " +
                                std::to_string(cutoff_hz) + " Hz at " +
                                std::to_string(sample_rate_hz) + " Hz sampling");
    const Eigen::Index n = signal.size();
    Vec out(n);
    if (n == 0) return out;

    // y[k] = b*(x[k] + x[k-1]) + (1 - 2b)*y[k-1],  b = alpha/(1+alpha);
    // written in increment form so constants pass through bit-exactly
    const double alpha = M_PI * cutoff_hz / sample_rate_hz;
    const Scalar b = Scalar(alpha / (1.0 + alpha));

    Scalar x_prev = signal(0);
    Scalar y_prev = signal(0);
    out(0) = signal(0);
    for (Eigen::Index k = 1; k < n; ++k) {
        const Scalar x = signal(k);
        const Scalar y = y_prev + b * ((x - y_prev) + (x_prev - y_prev));
        out(k) = y;
        x_prev = x;
        y_prev = y;
    }
    return out;
}

/// Low-pass derivative filter: central finite differences followed by
/// lowpass(cutoff). Constant input maps to an identically zero series.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
derivative_filter(const Eigen::DenseBase<Derived>& signal, double cutoff_hz,
                  double sample_rate_hz) {
    using Scalar = typename Derived::Scalar;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = signal.size();
    Vec diff(n);
    if (n == 0) return diff;
    const Scalar dt = Scalar(1.0 / sample_rate_hz);
    if (n == 1) {
        diff(0) = Scalar(0);
    } else {
        // central differences, widened to +-2 samples in the interior to
        // curb sensor-noise amplification ahead of the low-pass
        diff(0) = (signal(1) - signal(0)) / dt;
        diff(n - 1) = (signal(n - 1) - signal(n - 2)) / dt;
        for (Eigen::Index k = 1; k + 1 < n; ++k) {
            if (k >= 2 && k + 2 < n)
                diff(k) = (signal(k + 2) - signal(k - 2)) / (Scalar(4) * dt);
            else
                diff(k) = (signal(k + 1) - signal(k - 1)) / (Scalar(2) * dt);
        }
    }
    return lowpass(diff, cutoff_hz, sample_rate_hz);
}

/// Time constant of the equivalent analog first-order filter, seconds.
inline double filter_time_constant(double cutoff_hz) { return 1.0 / (2.0 * M_PI * cutoff_hz); }

}  // namespace thermik::sysid
