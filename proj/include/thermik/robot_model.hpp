#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermik/errors.hpp"

namespace thermik::dyn {

/// Planar rigid body. The link frame sits at its parent joint; "down the
/// link" is -y in the link frame at zero joint angle.
struct Link {
    std::string name;
    double mass = 0.0;          ///< kg, > 0
    Eigen::Vector2d com = Eigen::Vector2d::Zero();  ///< m, in link frame
    double inertia = 0.0;       ///< kg m^2 about the COM, >= 0
};

enum class JointType { FloatingBasePlanar, Revolute, ActuatedPair };

/// Tree joint. A revolute joint contributes one DOF. An actuated-pair
/// joint contributes two stacked hinges (pitch then roll) separated by a
/// fixed massless offset, driven by two linear pushrods through a
/// configuration-dependent 2x2 effort map.
struct Joint {
    std::string name;
    JointType type = JointType::Revolute;
    int parent_link = -1;       ///< -1 = world
    int child_link = -1;
    Eigen::Vector2d anchor = Eigen::Vector2d::Zero();  ///< in parent frame
    double axis_sign = 1.0;
    Eigen::Vector2d limit_lo = Eigen::Vector2d::Constant(-3.0);  ///< rad per DOF
    Eigen::Vector2d limit_hi = Eigen::Vector2d::Constant(3.0);

    // actuated-pair geometry
    Eigen::Vector2d pair_offset = Eigen::Vector2d(0.0, -0.05);  ///< hinge 1 -> hinge 2
    double lever_pitch = 0.05;  ///< r, m
    double lever_roll = 0.05;   ///< d, m

    int first_dof = -1;         ///< index into q (filled by load/validate)
    int dofs() const {
        switch (type) {
            case JointType::FloatingBasePlanar: return 3;
            case JointType::Revolute: return 1;
            case JointType::ActuatedPair: return 2;
        }
        return 0;
    }
};

enum class EffortMapKind { Direct, PushrodPair };

struct Actuator {
    std::string id;
    int joint = -1;
    EffortMapKind map = EffortMapKind::Direct;
    int rod = 0;                ///< pushrod index (0/1) for pair maps
};

enum class ContactKind { Point, Flat };

/// Contact frame fixed on a link. Point contacts constrain 2 rows
/// (position); flat contacts constrain 3 (position + orientation).
struct ContactFrame {
    std::string name;
    int link = -1;
    Eigen::Vector2d offset = Eigen::Vector2d::Zero();  ///< in link frame
    ContactKind kind = ContactKind::Flat;
    int rows() const { return kind == ContactKind::Point ? 2 : 3; }
};

/// Named set of simultaneously active contact frames.
struct ContactConfig {
    std::string name;
    std::vector<std::string> frames;  ///< ordered, at least one
};

/// Planar floating- or fixed-base kinematic tree with actuators and
/// contact frames. Immutable after load; all queries are pure in (model, q).
struct RobotModel {
    std::string name;
    double gravity = 9.81;  ///< m/s^2, acting along -z
    std::vector<Link> links;
    std::vector<Joint> joints;
    std::vector<Actuator> actuators;
    std::vector<ContactFrame> contacts;

    int dof_count = 0;            ///< n
    bool floating_base = false;
    std::vector<int> joint_of_link;       ///< parent joint index per link
    std::vector<int> joint_order;         ///< topological evaluation order
    std::vector<int> actuated_dofs;       ///< q indices, ascending; size m

    int m() const { return int(actuated_dofs.size()); }
    int n() const { return dof_count; }

    int link_index(const std::string& name) const;
    int joint_index(const std::string& name) const;
    int contact_index(const std::string& name) const;
    int actuator_index(const std::string& id) const;
    double total_mass() const;

    /// m x n binary selector mapping actuated torques into generalized forces.
    Eigen::MatrixXd actuation_selector() const;

    /// Per-DOF joint limits (base DOFs unbounded).
    void dof_limits(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const;
    bool is_base_dof(int dof) const { return floating_base && dof < 3; }

    /// Throws SchemaError with the violating entity on inconsistency.
    void validate();
};

RobotModel load_model(const std::string& path);
RobotModel model_from_json(const std::string& text, const std::string& where = "model");

}  // namespace thermik::dyn
