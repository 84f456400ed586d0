#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermik/errors.hpp"

namespace thermik::sysid {

/// Uniformly sampled operation telemetry: per-node temperatures and
/// per-actuator efforts against a shared time base, plus ambient.
///
/// CSV layout (one row per sample, decimal point, comma separated):
///   time_s, ambient_c, <node>_temp_c..., <actuator>_effort...
struct TelemetryLog {
    Eigen::VectorXd sample_times;            ///< seconds, strictly increasing, uniform
    Eigen::VectorXd ambient;                 ///< degC, one entry per sample
    std::vector<std::string> node_ids;
    std::vector<std::string> actuator_ids;
    Eigen::MatrixXd temperatures;            ///< samples x nodes, degC
    Eigen::MatrixXd efforts;                 ///< samples x actuators

    Eigen::Index samples() const { return sample_times.size(); }
    double sample_rate_hz() const;

    int node_index(const std::string& id) const;      ///< -1 when absent
    int actuator_index(const std::string& id) const;  ///< -1 when absent

    /// Throws SchemaError unless times are strictly increasing and uniform,
    /// all series share the length, and (unless allow_short) >= 100 samples.
    void validate(bool allow_short = false) const;
};

TelemetryLog read_telemetry_csv(const std::string& path);
void write_telemetry_csv(const TelemetryLog& log, const std::string& path);

}  // namespace thermik::sysid
