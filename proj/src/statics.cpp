#include "thermik/statics.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "thermik/linalg.hpp"

namespace thermik::dyn {

namespace {

Eigen::Matrix2d rot(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

void check_q(const RobotModel& model, const Eigen::VectorXd& q) {
    if (q.size() != model.n())
        throw InvalidInputError("configuration has " + std::to_string(q.size()) +
                                " entries, model '" + model.name + "' has n = " +
                                std::to_string(model.n()));
    if (!q.allFinite())
        throw InvalidInputError("configuration contains non-finite entries");
}

}  // namespace

Kinematics forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
    check_q(model, q);
    Kinematics kin;
    kin.link_pose.resize(model.links.size());
    kin.hinge_a.assign(model.joints.size(), Eigen::Vector2d::Zero());
    kin.hinge_b.assign(model.joints.size(), Eigen::Vector2d::Zero());

    for (int ji : model.joint_order) {
        const Joint& j = model.joints[ji];
        FramePose parent;  // world frame when parent_link == -1
        if (j.parent_link >= 0) parent = kin.link_pose[j.parent_link];

        if (j.type == JointType::FloatingBasePlanar) {
            FramePose& pose = kin.link_pose[j.child_link];
            pose.position = q.segment<2>(0);
            pose.angle = q(2);
            kin.hinge_a[ji] = pose.position;
            continue;
        }

        const Eigen::Vector2d anchor = parent.position + rot(parent.angle) * j.anchor;
        kin.hinge_a[ji] = anchor;
        if (j.type == JointType::Revolute) {
            FramePose& pose = kin.link_pose[j.child_link];
            pose.angle = parent.angle + j.axis_sign * q(j.first_dof);
            pose.position = anchor;
        } else {  // ActuatedPair: pitch hinge, offset, roll hinge
            const double mid_angle = parent.angle + j.axis_sign * q(j.first_dof);
            const Eigen::Vector2d hinge2 = anchor + rot(mid_angle) * j.pair_offset;
            kin.hinge_b[ji] = hinge2;
            FramePose& pose = kin.link_pose[j.child_link];
            pose.angle = mid_angle + j.axis_sign * q(j.first_dof + 1);
            pose.position = hinge2;
        }
    }
    return kin;
}

FramePose frame_pose(const RobotModel& model, const Kinematics& kin, int link,
                     const Eigen::Vector2d& offset) {
    const FramePose& lp = kin.link_pose[link];
    (void)model;
    return {lp.position + rot(lp.angle) * offset, lp.angle};
}

FramePose contact_frame_pose(const RobotModel& model, const Eigen::VectorXd& q,
                             const std::string& frame_name) {
    const int ci = model.contact_index(frame_name);
    if (ci < 0)
        throw SchemaError("unknown contact frame '" + frame_name + "'");
    const Kinematics kin = forward_kinematics(model, q);
    return frame_pose(model, kin, model.contacts[ci].link, model.contacts[ci].offset);
}

Eigen::MatrixXd point_jacobian(const RobotModel& model, const Kinematics& kin, int link,
                               const Eigen::Vector2d& offset) {
    const Eigen::Vector2d w = frame_pose(model, kin, link, offset).position;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2, model.n());
    int cur = link;
    while (cur >= 0) {
        const int ji = model.joint_of_link[cur];
        const Joint& j = model.joints[ji];
        if (j.type == JointType::FloatingBasePlanar) {
            jac.col(0) += Eigen::Vector2d(1, 0);
            jac.col(1) += Eigen::Vector2d(0, 1);
            jac.col(2) += perp(w - kin.hinge_a[ji]);
        } else if (j.type == JointType::Revolute) {
            jac.col(j.first_dof) += j.axis_sign * perp(w - kin.hinge_a[ji]);
        } else {
            jac.col(j.first_dof) += j.axis_sign * perp(w - kin.hinge_a[ji]);
            jac.col(j.first_dof + 1) += j.axis_sign * perp(w - kin.hinge_b[ji]);
        }
        cur = j.parent_link;
    }
    return jac;
}

Eigen::RowVectorXd angle_jacobian(const RobotModel& model, int link) {
    Eigen::RowVectorXd jac = Eigen::RowVectorXd::Zero(model.n());
    int cur = link;
    while (cur >= 0) {
        const int ji = model.joint_of_link[cur];
        const Joint& j = model.joints[ji];
        if (j.type == JointType::FloatingBasePlanar) {
            jac(2) += 1.0;
        } else if (j.type == JointType::Revolute) {
            jac(j.first_dof) += j.axis_sign;
        } else {
            jac(j.first_dof) += j.axis_sign;
            jac(j.first_dof + 1) += j.axis_sign;
        }
        cur = j.parent_link;
    }
    return jac;
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q) {
    const Kinematics kin = forward_kinematics(model, q);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(model.n(), model.n());
    for (size_t li = 0; li < model.links.size(); ++li) {
        const Link& link = model.links[li];
        const Eigen::MatrixXd jv = point_jacobian(model, kin, int(li), link.com);
        const Eigen::RowVectorXd jw = angle_jacobian(model, int(li));
        a.noalias() += link.mass * jv.transpose() * jv;
        a.noalias() += link.inertia * jw.transpose() * jw;
    }
    return 0.5 * (a + a.transpose());
}

double potential_energy(const RobotModel& model, const Eigen::VectorXd& q) {
    const Kinematics kin = forward_kinematics(model, q);
    double u = 0.0;
    for (size_t li = 0; li < model.links.size(); ++li) {
        const Eigen::Vector2d com = frame_pose(model, kin, int(li), model.links[li].com).position;
        u += model.links[li].mass * model.gravity * com.y();
    }
    return u;
}

Eigen::VectorXd gravity_vector(const RobotModel& model, const Eigen::VectorXd& q) {
    const Kinematics kin = forward_kinematics(model, q);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(model.n());
    for (size_t li = 0; li < model.links.size(); ++li) {
        const Link& link = model.links[li];
        const Eigen::MatrixXd jv = point_jacobian(model, kin, int(li), link.com);
        g.noalias() += link.mass * model.gravity * jv.row(1).transpose();
    }
    return g;
}

int contact_rows(const RobotModel& model, const ContactConfig& contact) {
    int rows = 0;
    for (const auto& name : contact.frames) {
        const int ci = model.contact_index(name);
        if (ci < 0)
            throw SchemaError("contact config '" + contact.name + "': unknown frame '" + name + "'");
        rows += model.contacts[ci].rows();
    }
    return rows;
}

Eigen::MatrixXd contact_jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                                 const ContactConfig& contact) {
    const int rows = contact_rows(model, contact);
    const Kinematics kin = forward_kinematics(model, q);
    Eigen::MatrixXd jc(rows, model.n());
    int r = 0;
    for (const auto& name : contact.frames) {
        const ContactFrame& frame = model.contacts[model.contact_index(name)];
        jc.middleRows(r, 2) = point_jacobian(model, kin, frame.link, frame.offset);
        r += 2;
        if (frame.kind == ContactKind::Flat) {
            jc.row(r) = angle_jacobian(model, frame.link);
            r += 1;
        }
    }
    return jc;
}

Eigen::MatrixXd contact_nullspace(const RobotModel& model, const Eigen::VectorXd& q,
                                  const ContactConfig& contact) {
    const int n = model.n();
    if (contact.frames.empty()) return Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd jc = contact_jacobian(model, q, contact);
    const Eigen::MatrixXd a = mass_matrix(model, q);
    const Eigen::MatrixXd jbar = dyn_consistent_pinv(jc, a);
    return Eigen::MatrixXd::Identity(n, n) - jbar * jc;
}

namespace {

Eigen::Index svd_rank(const Eigen::MatrixXd& x) {
    if (x.rows() == 0 || x.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& sv = svd.singularValues();
    const double cut = kDefaultRankTol * std::max(sv(0), 1e-300);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    return rank;
}

}  // namespace

Eigen::VectorXd static_torque(const RobotModel& model, const Eigen::VectorXd& q,
                              const ContactConfig& contact) {
    check_q(model, q);
    const Eigen::MatrixXd a = mass_matrix(model, q);
    const Eigen::MatrixXd nc = contact_nullspace(model, q, contact);
    const Eigen::VectorXd g = gravity_vector(model, q);
    const Eigen::MatrixXd sa = model.actuation_selector();

    const Eigen::MatrixXd b = sa * nc;  // m x n
    if (svd_rank(b) < svd_rank(nc))
        throw ActuationDeficiencyError(
            "contact config '" + contact.name + "': actuated DOFs span rank " +
            std::to_string(svd_rank(b)) + " of the rank-" + std::to_string(svd_rank(nc)) +
            " contact-consistent motion space");
    const Eigen::MatrixXd bbar = dyn_consistent_pinv(b, a);
    return bbar.transpose() * (nc.transpose() * g);
}

Eigen::VectorXd reaction_forces(const RobotModel& model, const Eigen::VectorXd& q,
                                const ContactConfig& contact, const Eigen::VectorXd& torque) {
    check_q(model, q);
    if (contact.frames.empty()) return Eigen::VectorXd(0);
    if (torque.size() != model.m())
        throw InvalidInputError("reaction_forces: torque vector has wrong size");
    const Eigen::MatrixXd jc = contact_jacobian(model, q, contact);
    const Eigen::MatrixXd a = mass_matrix(model, q);
    const Eigen::MatrixXd jbar = dyn_consistent_pinv(jc, a);
    const Eigen::VectorXd g = gravity_vector(model, q);
    return jbar.transpose() * (g - model.actuation_selector().transpose() * torque);
}

Eigen::Matrix2d pair_torque_map(const RobotModel& model, const Eigen::VectorXd& q, int joint) {
    const Joint& j = model.joints[joint];
    if (j.type != JointType::ActuatedPair)
        throw InvalidInputError("joint '" + j.name + "' is not an actuated pair");
    const double c = std::cos(q(j.first_dof));
    Eigen::Matrix2d m;
    m << j.lever_pitch * c, j.lever_pitch * c, j.lever_roll, -j.lever_roll;
    return m;
}

Eigen::VectorXd actuator_efforts(const RobotModel& model, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& torque) {
    check_q(model, q);
    if (torque.size() != model.m())
        throw InvalidInputError("actuator_efforts: torque vector has wrong size");
    Eigen::VectorXd efforts = torque;  // revolute joints map one-to-one
    for (size_t ji = 0; ji < model.joints.size(); ++ji) {
        const Joint& j = model.joints[ji];
        if (j.type != JointType::ActuatedPair) continue;
        int slot = -1;
        for (int k = 0; k < model.m(); ++k)
            if (model.actuated_dofs[k] == j.first_dof) slot = k;
        if (slot < 0) continue;  // unactuated pair joint
        const Eigen::Matrix2d m = pair_torque_map(model, q, int(ji));
        const double det = m.determinant();
        if (std::abs(det) < 1e-8 * j.lever_pitch * j.lever_roll)
            throw SingularMapError("pair joint '" + j.name +
                                   "': effort map singular at pitch = " +
                                   std::to_string(q(j.first_dof)) + " rad");
        efforts.segment<2>(slot) = m.inverse() * torque.segment<2>(slot);
    }
    return efforts;
}

int effort_slot(const RobotModel& model, const std::string& actuator_id) {
    const int ai = model.actuator_index(actuator_id);
    if (ai < 0)
        throw SchemaError("unknown actuator '" + actuator_id + "' in model '" + model.name + "'");
    const Actuator& a = model.actuators[ai];
    const int dof = model.joints[a.joint].first_dof +
                    (a.map == EffortMapKind::PushrodPair ? a.rod : 0);
    for (int k = 0; k < model.m(); ++k)
        if (model.actuated_dofs[k] == dof) return k;
    throw SchemaError("actuator '" + actuator_id + "' drives an unactuated DOF");
}

StaticsSolution solve_statics(const RobotModel& model, const Eigen::VectorXd& q,
                              const ContactConfig& contact) {
    StaticsSolution sol;
    sol.torque = static_torque(model, q, contact);
    sol.reaction = reaction_forces(model, q, contact, sol.torque);
    sol.efforts = actuator_efforts(model, q, sol.torque);
    return sol;
}

}  // namespace thermik::dyn
