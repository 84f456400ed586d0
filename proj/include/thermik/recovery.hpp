#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermik/thermal_ik.hpp"

namespace thermik::recovery {

/// Thermal-recovery policy: the contact set, the temperature thresholds,
/// the Q re-weighting rule and the planning horizon.
struct RecoveryPolicy {
    std::vector<dyn::ContactConfig> contact_set;  ///< C, in tie-break order
    std::string nominal_contact;   ///< stance held at the nominal pose
    double warning_c = 75.0;       ///< recovery entry threshold
    double safe_c = 70.0;          ///< recovery exit threshold
    double trigger_c = 70.0;       ///< Q re-weighting trigger
    double hot_weight = 1e3;
    double nominal_weight = 1.0;
    enum class Horizon { Fixed, RcHalf } horizon_mode = Horizon::Fixed;
    double horizon_s = 20.0;       ///< fixed prediction horizon
    Eigen::VectorXd q_nominal;
    double transition_s = 2.0;     ///< per transition leg, simulated seconds
    double sim_dt_s = 0.05;
    double sim_budget_s = 1200.0;  ///< simulated-clock budget before timeout

    void validate(const dyn::RobotModel& model) const;
    const dyn::ContactConfig& contact(const std::string& name) const;
    /// Fixed horizon, or min over currently-hot nodes of RC/2.
    double effective_horizon(const ik::ThermalScene& scene,
                             const Eigen::VectorXd& temps) const;
};

/// Quasi-static plant: configuration tracks commands exactly, torques are
/// the contact-consistent static torques, thermal nodes advance by Euler.
struct PlantState {
    Eigen::VectorXd q;
    Eigen::VectorXd temperatures;  ///< one per scene node, degC
    double clock_s = 0.0;
    std::string active_contact;
};

/// Diagonal Q from the threshold rule: hot weight where T_i > trigger,
/// nominal weight otherwise.
Eigen::VectorXd update_cost_matrix(const RecoveryPolicy& policy,
                                   const Eigen::VectorXd& temperatures);

struct StrategyCandidate {
    std::string contact;
    Eigen::VectorXd q;
    double f = 0.0;
};

struct StrategySelection {
    StrategyCandidate best;
    std::vector<StrategyCandidate> evaluated;  ///< one per contact in C order
};

/// Caches minimizers per (contact, hot-node pattern) across one recovery run.
class StrategyCache {
public:
    const Eigen::VectorXd* find(const std::string& contact, const std::string& pattern) const;
    void store(const std::string& contact, const std::string& pattern, Eigen::VectorXd q);

private:
    std::map<std::pair<std::string, std::string>, Eigen::VectorXd> cache_;
};

/// The nested minimization over the contact set: descends the temperature
/// potential per contact from the nominal pose and returns the f-minimal
/// (c, q) pair; ties break by contact declaration order.
StrategySelection select_strategy(const RecoveryPolicy& policy, const ik::ThermalScene& scene,
                                  const dyn::RobotModel& model, const PlantState& plant,
                                  const ik::DescentSettings& settings,
                                  StrategyCache* cache = nullptr);

/// Minimum-effort baseline: the same descent machinery applied to
/// ||Gamma(q)||^2, blind to temperatures.
ik::DescentResult min_effort_configuration(const dyn::RobotModel& model,
                                           const Eigen::VectorXd& q0,
                                           const dyn::ContactConfig& contact,
                                           const ik::DescentSettings& settings);

struct PlantTraceRow {
    double t = 0.0;
    Eigen::VectorXd temperatures;
    Eigen::VectorXd efforts;
    std::string contact;
};

/// One commanded segment: linear interpolation in q from the plant state to
/// the target, re-projected onto the segment's contact each step, then the
/// target held for hold_s.
struct CommandSegment {
    dyn::ContactConfig contact;
    Eigen::VectorXd target_q;
    double move_s = 0.0;
    double hold_s = 0.0;
};

/// Steps the plant through the commanded segments. Throws
/// InfeasibleCommandError when a commanded configuration violates the
/// segment's contact by more than 1e-3.
std::vector<PlantTraceRow> simulate_plant(PlantState& plant, const ik::ThermalScene& scene,
                                          const dyn::RobotModel& model,
                                          const std::vector<CommandSegment>& commands,
                                          double dt);

enum class RecoveryMode { Switching, MinEffort };

struct ScheduleEntry {
    double t = 0.0;
    std::string contact;
    std::string stance;  ///< "minimized" or "nominal"
};

struct RecoveryReport {
    RecoveryMode mode = RecoveryMode::Switching;
    std::vector<PlantTraceRow> trace;
    std::vector<double> trace_f;                    ///< T^T Q T at each row
    std::vector<ScheduleEntry> schedule;
    std::map<std::string, double> time_to_safe;     ///< per node id, seconds
    std::map<std::string, double> group_time_to_safe;
    std::vector<std::string> groups;
    bool timed_out = false;
    double total_s = 0.0;

    double group_norm(const ik::ThermalScene& scene, const std::string& group,
                      const Eigen::VectorXd& temps) const;
};

/// The recovery loop: re-weight Q from sensed temperatures, pick a strategy
/// (or hold the minimum-effort configuration), transition through the
/// nominal pose, hold and re-plan every horizon until every node is below
/// the safe threshold, then return to nominal. Exceeding the simulated-time
/// budget sets timed_out instead of throwing.
RecoveryReport run_recovery(PlantState plant, const RecoveryPolicy& policy,
                            ik::ThermalScene scene, const dyn::RobotModel& model,
                            RecoveryMode mode, const ik::DescentSettings& settings);

}  // namespace thermik::recovery
