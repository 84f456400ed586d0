#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermik/robot_model.hpp"

namespace thermik::dyn {

/// World pose of a planar frame.
struct FramePose {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double angle = 0.0;
};

/// Forward-kinematics snapshot at one configuration: world pose per link
/// plus the world hinge anchors needed for Jacobians.
struct Kinematics {
    std::vector<FramePose> link_pose;
    std::vector<Eigen::Vector2d> hinge_a;  ///< per joint, first hinge anchor
    std::vector<Eigen::Vector2d> hinge_b;  ///< per joint, second hinge (pairs)
};

Kinematics forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

/// World pose of a point/frame fixed on a link.
FramePose frame_pose(const RobotModel& model, const Kinematics& kin, int link,
                     const Eigen::Vector2d& offset);
FramePose contact_frame_pose(const RobotModel& model, const Eigen::VectorXd& q,
                             const std::string& frame_name);

/// 2 x n Jacobian of a point fixed on a link and 1 x n of the link angle.
Eigen::MatrixXd point_jacobian(const RobotModel& model, const Kinematics& kin, int link,
                               const Eigen::Vector2d& offset);
Eigen::RowVectorXd angle_jacobian(const RobotModel& model, int link);

/// Joint-space inertia A(q), symmetric positive definite, assembled from
/// the per-link COM and angular Jacobians.
Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q);

/// Gradient of gravitational potential energy, g(q) = dU/dq.
Eigen::VectorXd gravity_vector(const RobotModel& model, const Eigen::VectorXd& q);
double potential_energy(const RobotModel& model, const Eigen::VectorXd& q);

/// Stacked Jacobian of the active contact frames (2 rows per point
/// contact, 3 per flat contact), rows in frame declaration order.
Eigen::MatrixXd contact_jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                                 const ContactConfig& contact);
int contact_rows(const RobotModel& model, const ContactConfig& contact);

/// Contact null-space projector N_c = I - Jbar_c J_c (oblique, A-weighted).
Eigen::MatrixXd contact_nullspace(const RobotModel& model, const Eigen::VectorXd& q,
                                  const ContactConfig& contact);

/// Gravity-compensating, contact-consistent actuated torques at rest:
///   Gamma(q) = (S_a N_c)bar^T N_c^T g(q).
/// Throws ActuationDeficiencyError when the actuated DOFs cannot span the
/// contact-consistent motion space.
Eigen::VectorXd static_torque(const RobotModel& model, const Eigen::VectorXd& q,
                              const ContactConfig& contact);

/// Estimated contact reactions at rest: F_r = Jbar_c^T (g - S_a^T Gamma).
Eigen::VectorXd reaction_forces(const RobotModel& model, const Eigen::VectorXd& q,
                                const ContactConfig& contact, const Eigen::VectorXd& torque);

/// Per-actuator efforts F_act = J_gamma(q) Gamma: identity for revolute
/// joints, the configuration-dependent 2x2 pushrod map for pair joints.
/// Throws SingularMapError naming the joint at singular pair poses.
Eigen::VectorXd actuator_efforts(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& torque);

/// Pushrod velocity map of one pair joint: v_rods = M(q)^T qdot_pair with
/// M(q) = [[r cos(pitch), r cos(pitch)], [d, -d]]; exposed for the
/// virtual-work consistency checks.
Eigen::Matrix2d pair_torque_map(const RobotModel& model, const Eigen::VectorXd& q, int joint);

/// Index of an actuator's entry in the torque/effort vectors.
int effort_slot(const RobotModel& model, const std::string& actuator_id);

struct StaticsSolution {
    Eigen::VectorXd torque;    ///< m, N*m at actuated DOFs
    Eigen::VectorXd reaction;  ///< stacked contact rows, N / N*m
    Eigen::VectorXd efforts;   ///< m, per actuator (N*m or N)
};

StaticsSolution solve_statics(const RobotModel& model, const Eigen::VectorXd& q,
                              const ContactConfig& contact);

}  // namespace thermik::dyn
