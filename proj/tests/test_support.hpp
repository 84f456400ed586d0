#pragma once

#include <random>
#include <string>

#include "thermik/contact_projection.hpp"
#include "thermik/robot_model.hpp"

namespace test_support {

inline std::string repo_path(const std::string& rel) {
    return std::string(THERMIK_REPO_DIR) + "/" + rel;
}

inline thermik::dyn::RobotModel load_biped() {
    return thermik::dyn::load_model(repo_path("models/planar_biped.json"));
}

inline Eigen::VectorXd biped_nominal() {
    Eigen::VectorXd q(9);
    q << 0.0, 0.7968487952023082, 0.0, 0.4, -0.8, 0.4, -0.4, 0.8, -0.4;
    return q;
}

inline thermik::dyn::ContactConfig double_support() { return {"double_support", {"l_sole", "r_sole"}}; }
inline thermik::dyn::ContactConfig left_support() { return {"left_support", {"l_sole"}}; }
inline thermik::dyn::ContactConfig right_support() { return {"right_support", {"r_sole"}}; }

/// Random stance consistent with the frames' poses at the nominal pose.
inline Eigen::VectorXd random_stance(const thermik::dyn::RobotModel& model,
                                     const Eigen::VectorXd& q_nom,
                                     const thermik::dyn::ContactConfig& contact,
                                     std::mt19937_64& rng, double amplitude = 0.15) {
    const thermik::dyn::ContactAnchors anchors =
        thermik::dyn::capture_anchors(model, q_nom, contact);
    std::uniform_real_distribution<double> uni(-amplitude, amplitude);
    for (int attempt = 0; attempt < 50; ++attempt) {
        Eigen::VectorXd q = q_nom;
        for (Eigen::Index i = 0; i < q.size(); ++i) q(i) += uni(rng);
        try {
            return thermik::dyn::restore_contacts(model, q, contact, anchors);
        } catch (const thermik::InvalidInputError&) {
            continue;  // rare non-convergence from a bad draw
        }
    }
    throw std::runtime_error("random_stance: no contact-consistent draw found");
}

}  // namespace test_support
