#include "thermik/thermal_ik.hpp"

#include <cmath>

#include "thermik/linalg.hpp"

namespace thermik::ik {

using dyn::ContactAnchors;
using dyn::ContactConfig;
using dyn::RobotModel;

void ThermalScene::validate(const RobotModel& model) const {
    bind(model);
}

std::vector<int> ThermalScene::bind(const RobotModel& model) const {
    if (nodes.empty())
        throw InvalidInputError("thermal scene has no nodes");
    if (q_weights.size() != Eigen::Index(nodes.size()))
        throw InvalidInputError("thermal scene: Q diagonal has " +
                                std::to_string(q_weights.size()) + " entries for " +
                                std::to_string(nodes.size()) + " nodes");
    if ((q_weights.array() < 0.0).any())
        throw InvalidInputError("thermal scene: Q diagonal entries must be >= 0");
    if (!(horizon_s > 0.0))
        throw InvalidInputError("thermal scene: prediction horizon must be > 0");
    std::vector<int> slots;
    slots.reserve(nodes.size());
    for (const auto& node : nodes) {
        thermal::validate(node.params);
        if (!std::isfinite(node.initial_c))
            throw InvalidInputError("thermal scene: node '" + node.id +
                                    "' has a non-finite initial temperature");
        slots.push_back(dyn::effort_slot(model, node.actuator_id));
    }
    return slots;
}

Eigen::VectorXd predict_node_temperatures(const ThermalScene& scene, const RobotModel& model,
                                          const Eigen::VectorXd& q,
                                          const ContactConfig& contact) {
    const std::vector<int> slots = scene.bind(model);
    const Eigen::VectorXd torque = dyn::static_torque(model, q, contact);
    const Eigen::VectorXd efforts = dyn::actuator_efforts(model, q, torque);
    Eigen::VectorXd temps(Eigen::Index(scene.nodes.size()));
    for (size_t i = 0; i < scene.nodes.size(); ++i) {
        const ThermalNode& node = scene.nodes[i];
        temps(Eigen::Index(i)) = thermal::predict_temperature(
            node.params, node.initial_c, efforts(slots[i]), scene.horizon_s);
    }
    return temps;
}

double potential(const ThermalScene& scene, const RobotModel& model, const Eigen::VectorXd& q,
                 const ContactConfig& contact) {
    const Eigen::VectorXd temps = predict_node_temperatures(scene, model, q, contact);
    double f = 0.0;
    for (Eigen::Index i = 0; i < temps.size(); ++i)
        f += scene.q_weights(i) * temps(i) * temps(i);
    return f;
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& nc) { return dyn::range_basis(nc); }

namespace {

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, double f0,
                            const Eigen::VectorXd& q, const Eigen::MatrixXd& nc,
                            GradientMode mode, double h) {
    const Eigen::Index n = q.size();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    if (mode == GradientMode::Projected) {
        for (Eigen::Index i = 0; i < n; ++i)
            grad(i) = (f(q + h * nc.col(i)) - f0) / h;
    } else {
        const Eigen::MatrixXd basis = nullspace_basis(nc);
        for (Eigen::Index i = 0; i < basis.cols(); ++i) {
            const Eigen::VectorXd v = basis.col(i);
            grad += v * ((f(q + h * v) - f0) / h);
        }
    }
    return grad;
}

enum class Block { Actuated, BaseLinear, BaseRotary };

Block block_of(const RobotModel& model, int dof) {
    if (model.floating_base && dof < 2) return Block::BaseLinear;
    if (model.floating_base && dof == 2) return Block::BaseRotary;
    return Block::Actuated;
}

double block_delta(const DescentSettings& s, Block b) {
    switch (b) {
        case Block::BaseLinear: return s.delta_max_base_linear;
        case Block::BaseRotary: return s.delta_max_base_rotary;
        default: return s.delta_max_actuated;
    }
}

}  // namespace

Eigen::VectorXd gradient_projected(const ThermalScene& scene, const RobotModel& model,
                                   const Eigen::VectorXd& q, const ContactConfig& contact,
                                   const DescentSettings& settings) {
    const Eigen::MatrixXd nc = dyn::contact_nullspace(model, q, contact);
    auto f = [&](const Eigen::VectorXd& x) { return potential(scene, model, x, contact); };
    return fd_gradient(f, f(q), q, nc, GradientMode::Projected, settings.fd_step);
}

Eigen::VectorXd gradient_nullspace_basis(const ThermalScene& scene, const RobotModel& model,
                                         const Eigen::VectorXd& q, const ContactConfig& contact,
                                         const DescentSettings& settings) {
    const Eigen::MatrixXd nc = dyn::contact_nullspace(model, q, contact);
    auto f = [&](const Eigen::VectorXd& x) { return potential(scene, model, x, contact); };
    return fd_gradient(f, f(q), q, nc, GradientMode::Basis, settings.fd_step);
}

DescentResult descend_objective(const Objective& objective, const RobotModel& model,
                                const Eigen::VectorXd& q0, const ContactConfig& contact,
                                const DescentSettings& settings,
                                const std::optional<ContactAnchors>& anchors_in) {
    const int n = model.n();
    if (q0.size() != n)
        throw InvalidInputError("descend: q0 has wrong size");
    if (!(settings.fd_step > 0.0) || settings.iteration_limit < 1)
        throw InvalidInputError("descend: fd_step must be > 0 and iteration_limit >= 1");

    const bool constrained = !contact.frames.empty();
    ContactAnchors anchors;
    if (constrained) {
        anchors = anchors_in ? *anchors_in : dyn::capture_anchors(model, q0, contact);
        const double res =
            dyn::contact_residual(model, q0, contact, anchors).lpNorm<Eigen::Infinity>();
        if (res > 1e-6)
            throw InvalidStartError("descend: start configuration violates contact '" +
                                    contact.name + "' by " + std::to_string(res));
    }

    Eigen::VectorXd lo, hi;
    model.dof_limits(lo, hi);

    Eigen::VectorXd q = q0;
    double f_cur = objective.f(q);
    DescentResult result;
    auto extras = [&](const Eigen::VectorXd& x) {
        return objective.trace_extras ? objective.trace_extras(x) : Eigen::VectorXd();
    };
    result.trace.push_back({0, f_cur, 0.0, extras(q)});
    result.termination = "iteration-limit";

    for (int k = 1; k <= settings.iteration_limit; ++k) {
        result.iterations = k;
        const Eigen::MatrixXd nc = constrained
                                       ? dyn::contact_nullspace(model, q, contact)
                                       : Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd grad =
            fd_gradient(objective.f, f_cur, q, nc, settings.mode, settings.fd_step);

        // per-block gains: the largest raw component change per block equals
        // its delta_max
        Eigen::VectorXd dq = Eigen::VectorXd::Zero(n);
        for (Block b : {Block::Actuated, Block::BaseLinear, Block::BaseRotary}) {
            double max_g = 0.0;
            for (int i = 0; i < n; ++i)
                if (block_of(model, i) == b) max_g = std::max(max_g, std::abs(grad(i)));
            if (max_g == 0.0) continue;
            const double gain = block_delta(settings, b) / max_g;
            for (int i = 0; i < n; ++i)
                if (block_of(model, i) == b) dq(i) = -gain * grad(i);
        }

        Eigen::VectorXd step = nc * dq;
        // keep the projected step inside every block bound (single scalar
        // preserves tangency)
        double shrink = 1.0;
        for (int i = 0; i < n; ++i) {
            const double bound = block_delta(settings, block_of(model, i));
            if (std::abs(step(i)) > bound) shrink = std::min(shrink, bound / std::abs(step(i)));
        }
        step *= shrink;

        // build + restore the candidate; restoration displacement may push a
        // component past its bound, in which case the step is halved
        Eigen::VectorXd candidate;
        bool clamped = false;
        for (int attempt = 0;; ++attempt) {
            candidate = q + step;
            clamped = false;
            for (int i = 0; i < n; ++i) {
                if (candidate(i) < lo(i)) { candidate(i) = lo(i); clamped = true; }
                if (candidate(i) > hi(i)) { candidate(i) = hi(i); clamped = true; }
            }
            if (constrained && (clamped || settings.restore_every <= 1 ||
                                k % settings.restore_every == 0))
                candidate = dyn::restore_contacts(model, candidate, contact, anchors,
                                                  settings.restore);
            bool in_bounds = true;
            for (int i = 0; i < n; ++i) {
                const double bound = block_delta(settings, block_of(model, i));
                if (std::abs(candidate(i) - q(i)) > bound) in_bounds = false;
            }
            if (in_bounds || attempt >= 8) break;
            step *= 0.5;
        }

        const double f_cand = objective.f(candidate);
        if (!(f_cand < f_cur)) {
            result.termination = clamped ? "cost-increase-after-clamp" : "cost-increase";
            break;
        }
        const double max_dq = (candidate - q).lpNorm<Eigen::Infinity>();
        q = candidate;
        f_cur = f_cand;
        result.trace.push_back({k, f_cur, max_dq, extras(q)});
    }

    if (constrained) {
        const double drift =
            dyn::contact_residual(model, q, contact, anchors).lpNorm<Eigen::Infinity>();
        if (drift > settings.drift_tol) {
            q = dyn::restore_contacts(model, q, contact, anchors, settings.restore);
            f_cur = objective.f(q);
        }
    }
    result.q_star = q;
    result.f_star = f_cur;
    return result;
}

DescentResult descend(const ThermalScene& scene, const RobotModel& model,
                      const Eigen::VectorXd& q0, const ContactConfig& contact,
                      const DescentSettings& settings,
                      const std::optional<ContactAnchors>& anchors) {
    scene.validate(model);
    Objective objective;
    objective.f = [&](const Eigen::VectorXd& x) { return potential(scene, model, x, contact); };
    objective.trace_extras = [&](const Eigen::VectorXd& x) {
        return predict_node_temperatures(scene, model, x, contact);
    };
    return descend_objective(objective, model, q0, contact, settings, anchors);
}

}  // namespace thermik::ik
