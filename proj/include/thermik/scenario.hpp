#pragma once

#include <string>
#include <vector>

#include "thermik/recovery.hpp"
#include "thermik/robot_model.hpp"
#include "thermik/thermal_ik.hpp"

namespace thermik {

/// One entry of a generation pose schedule: the pose is reached by a linear
/// ramp of transition_s and then held until duration_s has elapsed.
struct PoseSpec {
    std::string name;
    Eigen::VectorXd q;
    double duration_s = 0.0;
};

struct GenerateSpec {
    double sample_rate_hz = 10.0;
    double duration_s = 0.0;
    double noise_sigma_c = 0.1;
    std::string contact;       ///< contact config active throughout
    std::vector<PoseSpec> poses;  ///< cycled until duration_s
    double transition_s = 3.0;
};

/// Everything an experiment needs: the model, the thermal scene, the
/// recovery policy (incl. contact configs and the nominal pose), descent
/// settings, the run mode and, optionally, a telemetry generation schedule.
struct Scenario {
    dyn::RobotModel model;
    std::string model_path;
    double ambient_c = 25.0;
    ik::ThermalScene scene;
    recovery::RecoveryPolicy policy;
    ik::DescentSettings descent;
    recovery::RecoveryMode mode = recovery::RecoveryMode::Switching;
    GenerateSpec generate;
    bool has_generate = false;

    recovery::PlantState initial_plant() const;
};

/// Loads a scenario document; file references resolve relative to the
/// scenario's directory. A config override document (shallow key merge)
/// may be applied on top.
Scenario load_scenario(const std::string& path, const std::string& config_override_path = "");
Scenario scenario_from_json(const std::string& text, const std::string& base_dir,
                            const std::string& where = "scenario");

}  // namespace thermik
