#include "thermik/telemetry_generator.hpp"

#include <cmath>
#include <random>

#include "thermik/contact_projection.hpp"

namespace thermik {

using sysid::TelemetryLog;

TelemetryLog generate_telemetry(const Scenario& scenario, std::uint64_t seed) {
    const GenerateSpec& spec = scenario.generate;
    if (!scenario.has_generate)
        throw SchemaError("scenario has no 'generate' section");
    if (spec.poses.empty())
        throw SchemaError("generation schedule has no poses");
    if (!(spec.sample_rate_hz > 0.0))
        throw InvalidInputError("generation: sample rate must be positive");
    if (scenario.scene.nodes.empty())
        throw SchemaError("generation needs at least one thermal node");

    const dyn::RobotModel& model = scenario.model;
    const std::vector<int> slots = scenario.scene.bind(model);

    TelemetryLog log;
    for (const auto& node : scenario.scene.nodes) log.node_ids.push_back(node.id);
    for (const auto& act : model.actuators) log.actuator_ids.push_back(act.id);

    const double dt = 1.0 / spec.sample_rate_hz;
    const Eigen::Index samples = Eigen::Index(std::floor(spec.duration_s / dt)) +
                                 (spec.duration_s > 0.0 ? 1 : 0);
    log.sample_times.resize(samples);
    log.ambient.setConstant(samples, scenario.ambient_c);
    log.temperatures.resize(samples, Eigen::Index(log.node_ids.size()));
    log.efforts.resize(samples, Eigen::Index(log.actuator_ids.size()));
    if (samples == 0) return log;

    const dyn::ContactConfig& contact = scenario.policy.contact(
        spec.contact.empty() ? scenario.policy.nominal_contact : spec.contact);
    const dyn::ContactAnchors anchors =
        dyn::capture_anchors(model, scenario.policy.q_nominal, contact);

    // project every pose onto the shared contact manifold once
    std::vector<Eigen::VectorXd> poses;
    double cycle_s = 0.0;
    for (const auto& pose : spec.poses) {
        if (pose.q.size() != model.n())
            throw SchemaError("pose '" + pose.name + "' has " + std::to_string(pose.q.size()) +
                              " entries, model needs " + std::to_string(model.n()));
        if (!(pose.duration_s > 0.0))
            throw SchemaError("pose '" + pose.name + "' needs a positive duration");
        poses.push_back(dyn::restore_contacts(model, pose.q, contact, anchors));
        cycle_s += pose.duration_s;
    }

    // configuration at time t: ramp into each pose over transition_s, hold after
    auto pose_at = [&](double t) -> Eigen::VectorXd {
        double tc = std::fmod(t, cycle_s);
        size_t idx = 0;
        while (tc >= spec.poses[idx].duration_s) {
            tc -= spec.poses[idx].duration_s;
            idx = (idx + 1) % spec.poses.size();
        }
        const Eigen::VectorXd& target = poses[idx];
        if (t < spec.poses[0].duration_s && idx == 0) return target;  // no ramp into the first hold
        if (tc >= spec.transition_s || spec.transition_s <= 0.0) return target;
        const Eigen::VectorXd& prev = poses[(idx + poses.size() - 1) % poses.size()];
        const double s = tc / spec.transition_s;
        return dyn::restore_contacts(model, (1.0 - s) * prev + s * target, contact, anchors);
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma_c);

    // effort columns follow actuator declaration order
    std::vector<int> column_slot;
    for (const auto& id : log.actuator_ids) column_slot.push_back(dyn::effort_slot(model, id));

    Eigen::VectorXd temps =
        Eigen::VectorXd::Constant(Eigen::Index(scenario.scene.nodes.size()), scenario.ambient_c);
    Eigen::VectorXd q_prev;
    Eigen::VectorXd efforts_prev;
    for (Eigen::Index k = 0; k < samples; ++k) {
        const double t = double(k) * dt;
        const Eigen::VectorXd q = pose_at(t);
        Eigen::VectorXd efforts;
        if (q_prev.size() && (q - q_prev).lpNorm<Eigen::Infinity>() < 1e-14) {
            efforts = efforts_prev;  // held pose, statics unchanged
        } else {
            const Eigen::VectorXd torque = dyn::static_torque(model, q, contact);
            efforts = dyn::actuator_efforts(model, q, torque);
        }
        if (k > 0) {
            for (size_t i = 0; i < scenario.scene.nodes.size(); ++i) {
                const Eigen::Index idx = Eigen::Index(i);
                temps(idx) = thermal::step_euler(scenario.scene.nodes[i].params, temps(idx),
                                                 efforts_prev(slots[i]), dt);
            }
        }
        log.sample_times(k) = t;
        for (Eigen::Index j = 0; j < temps.size(); ++j)
            log.temperatures(k, j) = temps(j) + (spec.noise_sigma_c > 0.0 ? noise(rng) : 0.0);
        for (size_t j = 0; j < column_slot.size(); ++j)
            log.efforts(k, Eigen::Index(j)) = efforts(column_slot[j]);
        q_prev = q;
        efforts_prev = efforts;
    }
    return log;
}

}  // namespace thermik
