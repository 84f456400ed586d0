#include "thermik/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermik::recovery {

using dyn::ContactAnchors;
using dyn::ContactConfig;
using dyn::RobotModel;

void RecoveryPolicy::validate(const RobotModel& model) const {
    if (contact_set.empty())
        throw InvalidInputError("recovery policy: contact set C is empty");
    for (const auto& c : contact_set) {
        if (c.frames.empty())
            throw InvalidInputError("recovery policy: contact config '" + c.name +
                                    "' has no frames");
        dyn::contact_rows(model, c);
    }
    contact(nominal_contact);
    if (!(safe_c < warning_c))
        throw InvalidInputError("recovery policy: safe threshold must lie below warning");
    if (!(hot_weight > 0.0) || !(nominal_weight > 0.0))
        throw InvalidInputError("recovery policy: Q weights must be positive");
    if (!(horizon_s > 0.0) || !(sim_dt_s > 0.0) || transition_s < 0.0)
        throw InvalidInputError("recovery policy: horizon and sim_dt must be positive");
    if (q_nominal.size() != model.n())
        throw InvalidInputError("recovery policy: q_nominal has " +
                                std::to_string(q_nominal.size()) + " entries, model needs " +
                                std::to_string(model.n()));
}

const ContactConfig& RecoveryPolicy::contact(const std::string& name) const {
    for (const auto& c : contact_set)
        if (c.name == name) return c;
    throw InvalidInputError("recovery policy: contact '" + name + "' is not in the contact set");
}

double RecoveryPolicy::effective_horizon(const ik::ThermalScene& scene,
                                         const Eigen::VectorXd& temps) const {
    if (horizon_mode == Horizon::Fixed) return horizon_s;
    double h = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < scene.nodes.size(); ++i)
        if (temps(Eigen::Index(i)) > trigger_c)
            h = std::min(h, scene.nodes[i].params.rc_time_constant / 2.0);
    return std::isfinite(h) ? h : horizon_s;
}

Eigen::VectorXd update_cost_matrix(const RecoveryPolicy& policy,
                                   const Eigen::VectorXd& temperatures) {
    Eigen::VectorXd q(temperatures.size());
    for (Eigen::Index i = 0; i < temperatures.size(); ++i)
        q(i) = temperatures(i) > policy.trigger_c ? policy.hot_weight : policy.nominal_weight;
    return q;
}

const Eigen::VectorXd* StrategyCache::find(const std::string& contact,
                                           const std::string& pattern) const {
    auto it = cache_.find({contact, pattern});
    return it == cache_.end() ? nullptr : &it->second;
}

void StrategyCache::store(const std::string& contact, const std::string& pattern,
                          Eigen::VectorXd q) {
    cache_[{contact, pattern}] = std::move(q);
}

namespace {

std::string hot_pattern(const RecoveryPolicy& policy, const Eigen::VectorXd& weights) {
    std::string pattern(size_t(weights.size()), '0');
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (weights(i) == policy.hot_weight && policy.hot_weight != policy.nominal_weight)
            pattern[size_t(i)] = '1';
    return pattern;
}

}  // namespace

StrategySelection select_strategy(const RecoveryPolicy& policy, const ik::ThermalScene& scene,
                                  const RobotModel& model, const PlantState& plant,
                                  const ik::DescentSettings& settings, StrategyCache* cache) {
    (void)plant;  // strategies start from the nominal pose; the plant reaches them through it
    const std::string pattern = hot_pattern(policy, scene.q_weights);
    StrategySelection selection;
    std::string failures;
    for (const auto& contact : policy.contact_set) {
        try {
            Eigen::VectorXd q_c;
            const Eigen::VectorXd* hit = cache ? cache->find(contact.name, pattern) : nullptr;
            if (hit) {
                q_c = *hit;
            } else {
                q_c = ik::descend(scene, model, policy.q_nominal, contact, settings).q_star;
                if (cache) cache->store(contact.name, pattern, q_c);
            }
            const double f_c = ik::potential(scene, model, q_c, contact);
            selection.evaluated.push_back({contact.name, q_c, f_c});
        } catch (const std::exception& e) {
            failures += (failures.empty() ? "" : "; ") + contact.name + ": " + e.what();
        }
    }
    if (selection.evaluated.empty())
        throw NoStrategyError("no contact configuration yielded a minimizer (" + failures + ")");
    selection.best = selection.evaluated.front();
    for (const auto& cand : selection.evaluated)
        if (cand.f < selection.best.f) selection.best = cand;
    return selection;
}

ik::DescentResult min_effort_configuration(const RobotModel& model, const Eigen::VectorXd& q0,
                                           const ContactConfig& contact,
                                           const ik::DescentSettings& settings) {
    ik::Objective objective;
    objective.f = [&](const Eigen::VectorXd& q) {
        return dyn::static_torque(model, q, contact).squaredNorm();
    };
    return ik::descend_objective(objective, model, q0, contact, settings);
}

namespace {

/// Shared plant integrator: advances temperatures with the static efforts of
/// the commanded configuration and records the trace.
class PlantStepper {
public:
    PlantStepper(PlantState& plant, const ik::ThermalScene& scene, const RobotModel& model,
                 double dt, std::vector<PlantTraceRow>& trace)
        : plant_(plant), scene_(scene), model_(model), slots_(scene.bind(model)), dt_(dt),
          trace_(trace) {
        if (plant.temperatures.size() != Eigen::Index(scene.nodes.size()))
            throw InvalidInputError("plant state has " + std::to_string(plant.temperatures.size()) +
                                    " temperatures for " + std::to_string(scene.nodes.size()) +
                                    " scene nodes");
    }

    void step(const Eigen::VectorXd& q_cmd, const ContactConfig& contact) {
        const Eigen::VectorXd torque = dyn::static_torque(model_, q_cmd, contact);
        const Eigen::VectorXd efforts = dyn::actuator_efforts(model_, q_cmd, torque);
        for (size_t i = 0; i < scene_.nodes.size(); ++i) {
            const Eigen::Index idx = Eigen::Index(i);
            plant_.temperatures(idx) = thermal::step_euler(
                scene_.nodes[i].params, plant_.temperatures(idx), efforts(slots_[i]), dt_);
        }
        plant_.q = q_cmd;
        plant_.clock_s += dt_;
        plant_.active_contact = contact.name;
        trace_.push_back({plant_.clock_s, plant_.temperatures, efforts, contact.name});
    }

    /// Linear move then hold, both re-projected onto the segment's contact.
    /// stop() is polled once per step; returns false when it fired.
    bool run_segment(const CommandSegment& segment,
                     const std::function<bool(const Eigen::VectorXd&)>& stop) {
        const bool constrained = !segment.contact.frames.empty();
        ContactAnchors anchors;
        if (constrained) {
            anchors = dyn::capture_anchors(model_, segment.target_q, segment.contact);
            const double start_res =
                dyn::contact_residual(model_, plant_.q, segment.contact, anchors)
                    .lpNorm<Eigen::Infinity>();
            if (start_res > 1e-3)
                throw InfeasibleCommandError(
                    "commanded move to contact '" + segment.contact.name +
                    "' starts " + std::to_string(start_res) + " off the contact manifold");
        }
        const Eigen::VectorXd q_from = plant_.q;
        const int move_steps = int(std::ceil(segment.move_s / dt_));
        for (int k = 1; k <= move_steps; ++k) {
            const double s = double(k) / double(move_steps);
            Eigen::VectorXd q_cmd = (1.0 - s) * q_from + s * segment.target_q;
            if (constrained)
                q_cmd = dyn::restore_contacts(model_, q_cmd, segment.contact, anchors);
            step(q_cmd, segment.contact);
            if (stop && stop(plant_.temperatures)) return false;
        }
        const int hold_steps = int(std::ceil(segment.hold_s / dt_));
        for (int k = 0; k < hold_steps; ++k) {
            step(segment.target_q, segment.contact);
            if (stop && stop(plant_.temperatures)) return false;
        }
        return true;
    }

private:
    PlantState& plant_;
    const ik::ThermalScene& scene_;
    const RobotModel& model_;
    std::vector<int> slots_;
    double dt_;
    std::vector<PlantTraceRow>& trace_;
};

}  // namespace

std::vector<PlantTraceRow> simulate_plant(PlantState& plant, const ik::ThermalScene& scene,
                                          const RobotModel& model,
                                          const std::vector<CommandSegment>& commands,
                                          double dt) {
    if (!(dt > 0.0))
        throw InvalidInputError("simulate_plant: dt must be positive");
    for (const auto& node : scene.nodes)
        if (dt > node.params.rc_time_constant / 100.0)
            throw InvalidInputError("simulate_plant: dt = " + std::to_string(dt) +
                                    " s exceeds RC/100 of node '" + node.id + "'");
    std::vector<PlantTraceRow> trace;
    PlantStepper stepper(plant, scene, model, dt, trace);
    for (const auto& segment : commands) stepper.run_segment(segment, nullptr);
    return trace;
}

double RecoveryReport::group_norm(const ik::ThermalScene& scene, const std::string& group,
                                  const Eigen::VectorXd& temps) const {
    double sq = 0.0;
    for (size_t i = 0; i < scene.nodes.size(); ++i)
        if (scene.nodes[i].group == group) sq += temps(Eigen::Index(i)) * temps(Eigen::Index(i));
    return std::sqrt(sq);
}

RecoveryReport run_recovery(PlantState plant, const RecoveryPolicy& policy,
                            ik::ThermalScene scene, const RobotModel& model, RecoveryMode mode,
                            const ik::DescentSettings& settings) {
    policy.validate(model);
    if (scene.q_weights.size() == 0)
        scene.q_weights = Eigen::VectorXd::Ones(Eigen::Index(scene.nodes.size()));
    scene.validate(model);
    if ((plant.temperatures.array() <= policy.warning_c).all())
        throw InvalidInputError("run_recovery: no node is above the warning threshold of " +
                                std::to_string(policy.warning_c) + " degC");

    const Eigen::VectorXd initial_temps = plant.temperatures;
    RecoveryReport report;
    report.mode = mode;
    for (const auto& node : scene.nodes)
        if (!node.group.empty() &&
            std::find(report.groups.begin(), report.groups.end(), node.group) ==
                report.groups.end())
            report.groups.push_back(node.group);

    PlantStepper stepper(plant, scene, model, policy.sim_dt_s, report.trace);
    StrategyCache cache;
    auto all_safe = [&](const Eigen::VectorXd& temps) {
        return (temps.array() < policy.safe_c).all();
    };

    // the minimum-effort stance ignores the thermal scene entirely
    Eigen::VectorXd q_min_effort;
    if (mode == RecoveryMode::MinEffort)
        q_min_effort = min_effort_configuration(model, policy.q_nominal,
                                                policy.contact(policy.nominal_contact), settings)
                           .q_star;

    if (plant.active_contact.empty()) plant.active_contact = policy.nominal_contact;
    report.schedule.push_back({plant.clock_s, plant.active_contact, "initial"});

    bool safe = all_safe(plant.temperatures);
    while (!safe) {
        if (plant.clock_s > policy.sim_budget_s) {
            report.timed_out = true;
            break;
        }

        scene.q_weights = update_cost_matrix(policy, plant.temperatures);
        for (size_t i = 0; i < scene.nodes.size(); ++i)
            scene.nodes[i].initial_c = plant.temperatures(Eigen::Index(i));
        scene.horizon_s = policy.effective_horizon(scene, plant.temperatures);

        std::string target_contact;
        Eigen::VectorXd target_q;
        if (mode == RecoveryMode::Switching) {
            const StrategySelection sel =
                select_strategy(policy, scene, model, plant, settings, &cache);
            target_contact = sel.best.contact;
            target_q = sel.best.q;
        } else {
            target_contact = policy.nominal_contact;
            target_q = q_min_effort;
        }

        const bool stance_changed = target_contact != plant.active_contact ||
                                    (target_q - plant.q).lpNorm<Eigen::Infinity>() > 1e-9;
        if (stance_changed) {
            // every stance change routes through the nominal configuration
            if ((plant.q - policy.q_nominal).lpNorm<Eigen::Infinity>() > 1e-9) {
                const CommandSegment to_nominal{policy.contact(plant.active_contact),
                                                policy.q_nominal, policy.transition_s, 0.0};
                if (!stepper.run_segment(to_nominal, all_safe)) { safe = true; break; }
            }
            const CommandSegment to_target{policy.contact(target_contact), target_q,
                                           policy.transition_s, 0.0};
            report.schedule.push_back({plant.clock_s, target_contact, "minimized"});
            if (!stepper.run_segment(to_target, all_safe)) { safe = true; break; }
        }

        const CommandSegment hold{policy.contact(target_contact), plant.q, 0.0,
                                  scene.horizon_s};
        if (!stepper.run_segment(hold, all_safe)) { safe = true; break; }
        safe = all_safe(plant.temperatures);
    }

    if (safe) {
        // return to nominal through the current stance's contact
        if ((plant.q - policy.q_nominal).lpNorm<Eigen::Infinity>() > 1e-9) {
            const CommandSegment home{policy.contact(plant.active_contact), policy.q_nominal,
                                      policy.transition_s, 0.0};
            stepper.run_segment(home, nullptr);
        }
        plant.active_contact = policy.nominal_contact;
        report.schedule.push_back({plant.clock_s, policy.nominal_contact, "nominal"});
    }
    report.total_s = plant.clock_s;

    // per-row potential under the threshold-rule weights of that instant
    report.trace_f.reserve(report.trace.size());
    for (const auto& row : report.trace) {
        const Eigen::VectorXd w = update_cost_matrix(policy, row.temperatures);
        double f = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i)
            f += w(i) * row.temperatures(i) * row.temperatures(i);
        report.trace_f.push_back(f);
    }

    // first time each node (and each group entirely) is below the safe threshold
    for (size_t i = 0; i < scene.nodes.size(); ++i) {
        double t = std::numeric_limits<double>::quiet_NaN();
        if (initial_temps(Eigen::Index(i)) < policy.safe_c) t = 0.0;
        for (const auto& row : report.trace) {
            if (!std::isnan(t)) break;
            if (row.temperatures(Eigen::Index(i)) < policy.safe_c) t = row.t;
        }
        report.time_to_safe[scene.nodes[i].id] = t;
    }
    for (const auto& group : report.groups) {
        double worst = 0.0;
        bool all_found = true;
        for (size_t i = 0; i < scene.nodes.size(); ++i) {
            if (scene.nodes[i].group != group) continue;
            const double t = report.time_to_safe[scene.nodes[i].id];
            if (std::isnan(t)) all_found = false;
            else worst = std::max(worst, t);
        }
        report.group_time_to_safe[group] =
            all_found ? worst : std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

}  // namespace thermik::recovery
