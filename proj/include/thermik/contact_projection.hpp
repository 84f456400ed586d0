#pragma once

#include <vector>

#include <Eigen/Core>

#include "thermik/statics.hpp"

namespace thermik::dyn {

/// Target world poses of a contact configuration's frames, in frame order.
struct ContactAnchors {
    std::vector<FramePose> poses;
};

/// Captures the current frame poses as anchors.
ContactAnchors capture_anchors(const RobotModel& model, const Eigen::VectorXd& q,
                               const ContactConfig& contact);

/// Stacked residual between the frames at q and the anchors (2 rows per
/// point frame, 3 per flat frame, angle wrapped to (-pi, pi]).
Eigen::VectorXd contact_residual(const RobotModel& model, const Eigen::VectorXd& q,
                                 const ContactConfig& contact, const ContactAnchors& anchors);

struct RestoreSettings {
    double tolerance = 1e-10;  ///< infinity norm of the residual
    int max_iterations = 100;
    double damping = 1e-6;     ///< DLS damping factor
};

/// Pulls q back onto the contact manifold by damped least-squares
/// iterations on the contact residual. Returns the projected q; throws
/// InvalidInputError if the residual does not converge.
Eigen::VectorXd restore_contacts(const RobotModel& model, const Eigen::VectorXd& q,
                                 const ContactConfig& contact, const ContactAnchors& anchors,
                                 const RestoreSettings& settings = {});

}  // namespace thermik::dyn
