#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermik/contact_projection.hpp"
#include "thermik/statics.hpp"
#include "thermik/thermal_model.hpp"

namespace thermik::ik {

/// One modeled thermal node bound to an actuator of the robot model.
struct ThermalNode {
    std::string id;
    std::string actuator_id;
    thermal::ThermalParams params;
    double initial_c = 25.0;  ///< T_o
    std::string group;        ///< limb group for report norms (optional)
};

/// Thermal prediction context for the potential: nodes, their initial
/// temperatures, the diagonal cost weights and the prediction horizon.
struct ThermalScene {
    std::vector<ThermalNode> nodes;
    Eigen::VectorXd q_weights;  ///< diagonal of Q, >= 0, one per node
    double horizon_s = 20.0;    ///< prediction horizon, > 0

    /// Binds nodes to effort slots; throws on unknown actuators or
    /// invalid weights/horizon.
    std::vector<int> bind(const dyn::RobotModel& model) const;
    void validate(const dyn::RobotModel& model) const;
};

enum class GradientMode { Projected, Basis };

struct DescentSettings {
    double fd_step = 1e-5;              ///< h, rad or m
    double delta_max_actuated = 0.02;   ///< rad
    double delta_max_base_linear = 0.01;   ///< m
    double delta_max_base_rotary = 0.02;   ///< rad
    int iteration_limit = 500;
    GradientMode mode = GradientMode::Projected;
    int restore_every = 1;              ///< contact restoration cadence, iterations
    double drift_tol = 1e-4;            ///< allowed contact-frame drift at q*
    dyn::RestoreSettings restore;
};

/// Predicted node temperatures after the scene horizon at configuration q:
/// actuator efforts come from the contact-consistent static torques, each
/// node advances by the closed-form first-order response.
Eigen::VectorXd predict_node_temperatures(const ThermalScene& scene,
                                          const dyn::RobotModel& model,
                                          const Eigen::VectorXd& q,
                                          const dyn::ContactConfig& contact);

/// Quadratic temperature potential f(q) = T^T Q T over the predicted
/// temperatures.
double potential(const ThermalScene& scene, const dyn::RobotModel& model,
                 const Eigen::VectorXd& q, const dyn::ContactConfig& contact);

/// Component i = [f(q + h * N_c e_i) - f(q)] / h: each coordinate proposal
/// is pushed through the contact null space before evaluation.
Eigen::VectorXd gradient_projected(const ThermalScene& scene, const dyn::RobotModel& model,
                                   const Eigen::VectorXd& q, const dyn::ContactConfig& contact,
                                   const DescentSettings& settings);

/// Orthonormal basis {v_i} of range(N_c) = ker(J_c); count = n - rank(J_c).
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& nc);

/// Directional-derivative gradient sum_i v_i [f(q + h v_i) - f(q)] / h over
/// the null-space basis.
Eigen::VectorXd gradient_nullspace_basis(const ThermalScene& scene,
                                         const dyn::RobotModel& model,
                                         const Eigen::VectorXd& q,
                                         const dyn::ContactConfig& contact,
                                         const DescentSettings& settings);

struct DescentTraceRow {
    int iterate = 0;
    double f = 0.0;
    double max_dq = 0.0;
    Eigen::VectorXd node_temps;  ///< predicted temperatures (empty for effort descent)
};

struct DescentResult {
    Eigen::VectorXd q_star;
    double f_star = 0.0;
    std::vector<DescentTraceRow> trace;
    int iterations = 0;
    std::string termination;  ///< "cost-increase", "iteration-limit", "limit-clamp"
};

/// Generic objective for the descent engine: f(q) plus optional per-iterate
/// extras recorded into the trace.
struct Objective {
    std::function<double(const Eigen::VectorXd&)> f;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> trace_extras;  ///< may be null
};

/// Bounded-step projected gradient descent under a fixed contact set.
/// Iterates q+ = q + N_c dq with dq = -k_p o grad, per-block gains scaled
/// so the largest raw component change per block equals its delta_max; the
/// projected step is rescaled (single scalar) if it exceeds a block bound.
/// Candidates are pulled back onto the contact manifold on the
/// restore_every cadence. Terminates on the iteration limit or on the
/// first candidate that fails to decrease f (the candidate is rejected and
/// the best iterate returned).
DescentResult descend_objective(const Objective& objective, const dyn::RobotModel& model,
                                const Eigen::VectorXd& q0, const dyn::ContactConfig& contact,
                                const DescentSettings& settings,
                                const std::optional<dyn::ContactAnchors>& anchors = {});

/// Thermal potential descent (the objective is `potential`).
DescentResult descend(const ThermalScene& scene, const dyn::RobotModel& model,
                      const Eigen::VectorXd& q0, const dyn::ContactConfig& contact,
                      const DescentSettings& settings,
                      const std::optional<dyn::ContactAnchors>& anchors = {});

}  // namespace thermik::ik
