#pragma once

#include <cmath>
#include <string>

#include "thermik/errors.hpp"

namespace thermik::thermal {

/// Lumped parameters of one first-order, effort-driven thermal node.
///
/// The node obeys  RC * dT/dt + T = F^2 * betaR - F * betaBiasR + Toffset,
/// where F is the driving actuator's output effort (N*m rotary, N linear).
/// t_offset is learned and absorbs both ambient temperature and the
/// constant bias-heating term, so the model works in absolute degrees C.
template <class Scalar>
struct ThermalParamsT {
    Scalar rc_time_constant{};  ///< RC product, seconds (> 0)
    Scalar beta_r{};            ///< degC per effort^2 (> 0)
    Scalar beta_bias_r{};       ///< degC per effort (sign free, load-direction dependent)
    Scalar t_offset{};          ///< degC, ambient folded in
};

using ThermalParams = ThermalParamsT<double>;

/// One monitored thermal system. A driver ("bridge") node and a motor
/// ("core") node may share the same actuator.
struct ThermalNodeState {
    double temperature{};    ///< degC
    std::string node_id;
    std::string actuator_id;
};

template <class Scalar>
void validate(const ThermalParamsT<Scalar>& p) {
    if (!(p.rc_time_constant > Scalar(0)) || !std::isfinite(double(p.rc_time_constant)))
        throw InvalidInputError("thermal params: rc_time_constant must be positive, got " +
                                std::to_string(double(p.rc_time_constant)));
    if (!(p.beta_r > Scalar(0)) || !std::isfinite(double(p.beta_r)))
        throw InvalidInputError("thermal params: beta_r must be positive, got " +
                                std::to_string(double(p.beta_r)));
    if (!std::isfinite(double(p.beta_bias_r)) || !std::isfinite(double(p.t_offset)))
        throw InvalidInputError("thermal params: beta_bias_r and t_offset must be finite");
}

/// Joule heating forcing in degC-equivalent units: F^2*betaR - F*betaBiasR.
/// The constant t_offset term is added by callers where the full forcing
/// is needed.
template <class Scalar>
Scalar joule_heating(const ThermalParamsT<Scalar>& p, Scalar effort) {
    if (!std::isfinite(double(effort)))
        throw InvalidInputError("joule_heating: non-finite effort");
    return effort * effort * p.beta_r - effort * p.beta_bias_r;
}

/// Temperature the node settles at under constant effort (t -> infinity).
template <class Scalar>
Scalar steady_state_temperature(const ThermalParamsT<Scalar>& p, Scalar effort) {
    return joule_heating(p, effort) + p.t_offset;
}

/// Closed-form temperature after holding a constant effort for dt seconds:
///   T = t0 * exp(-dt/RC) + Tss * (1 - exp(-dt/RC)).
/// Returns t0 exactly at dt = 0.
template <class Scalar>
Scalar predict_temperature(const ThermalParamsT<Scalar>& p, Scalar t0, Scalar effort,
                           Scalar dt) {
    if (!(dt >= Scalar(0)))
        throw InvalidInputError("predict_temperature: dt must be >= 0, got " +
                                std::to_string(double(dt)));
    const Scalar decay = std::exp(-dt / p.rc_time_constant);
    return t0 * decay + steady_state_temperature(p, effort) * (Scalar(1) - decay);
}

/// One explicit Euler step of the node ODE. Intended for dt << RC
/// (dt <= RC/100 keeps the integration error within 0.1% of the closed form
/// over multi-RC horizons).
template <class Scalar>
Scalar step_euler(const ThermalParamsT<Scalar>& p, Scalar t, Scalar effort, Scalar dt) {
    if (!(dt > Scalar(0)))
        throw InvalidInputError("step_euler: dt must be > 0, got " +
                                std::to_string(double(dt)));
    return t + dt * (steady_state_temperature(p, effort) - t) / p.rc_time_constant;
}

/// Structured-text (JSON) round trip, keys: rc, beta_r, beta_bias_r, t_offset.
ThermalParams load_thermal_params(const std::string& path);
void save_thermal_params(const ThermalParams& p, const std::string& path);
ThermalParams thermal_params_from_json(const std::string& text);
std::string thermal_params_to_json(const ThermalParams& p);

}  // namespace thermik::thermal
