#include "thermik/contact_projection.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace thermik::dyn {

namespace {

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace

ContactAnchors capture_anchors(const RobotModel& model, const Eigen::VectorXd& q,
                               const ContactConfig& contact) {
    const Kinematics kin = forward_kinematics(model, q);
    ContactAnchors anchors;
    for (const auto& name : contact.frames) {
        const int ci = model.contact_index(name);
        if (ci < 0)
            throw SchemaError("contact config '" + contact.name + "': unknown frame '" + name + "'");
        anchors.poses.push_back(
            frame_pose(model, kin, model.contacts[ci].link, model.contacts[ci].offset));
    }
    return anchors;
}

Eigen::VectorXd contact_residual(const RobotModel& model, const Eigen::VectorXd& q,
                                 const ContactConfig& contact, const ContactAnchors& anchors) {
    if (anchors.poses.size() != contact.frames.size())
        throw InvalidInputError("contact anchors do not match the contact config '" +
                                contact.name + "'");
    const Kinematics kin = forward_kinematics(model, q);
    Eigen::VectorXd res(contact_rows(model, contact));
    int r = 0;
    for (size_t i = 0; i < contact.frames.size(); ++i) {
        const ContactFrame& frame = model.contacts[model.contact_index(contact.frames[i])];
        const FramePose pose = frame_pose(model, kin, frame.link, frame.offset);
        res.segment<2>(r) = pose.position - anchors.poses[i].position;
        r += 2;
        if (frame.kind == ContactKind::Flat) {
            res(r) = wrap_angle(pose.angle - anchors.poses[i].angle);
            r += 1;
        }
    }
    return res;
}

Eigen::VectorXd restore_contacts(const RobotModel& model, const Eigen::VectorXd& q,
                                 const ContactConfig& contact, const ContactAnchors& anchors,
                                 const RestoreSettings& settings) {
    if (contact.frames.empty()) return q;
    Eigen::VectorXd cur = q;
    for (int it = 0; it < settings.max_iterations; ++it) {
        const Eigen::VectorXd res = contact_residual(model, cur, contact, anchors);
        if (res.lpNorm<Eigen::Infinity>() <= settings.tolerance) return cur;
        const Eigen::MatrixXd jc = contact_jacobian(model, cur, contact);
        const Eigen::MatrixXd jjt =
            jc * jc.transpose() +
            settings.damping * settings.damping *
                Eigen::MatrixXd::Identity(jc.rows(), jc.rows());
        cur -= jc.transpose() * jjt.ldlt().solve(res);
    }
    const double final_res =
        contact_residual(model, cur, contact, anchors).lpNorm<Eigen::Infinity>();
    if (final_res > settings.tolerance)
        throw InvalidInputError("contact restoration did not converge for '" + contact.name +
                                "': residual " + std::to_string(final_res));
    return cur;
}

}  // namespace thermik::dyn
