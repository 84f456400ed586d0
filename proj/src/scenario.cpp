#include "thermik/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace thermik {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError(std::string("cannot open ") + what + ": " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Eigen::VectorXd vector_from(const json& j, const std::string& where) {
    if (!j.is_array())
        throw SchemaError(where + ": expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = j[i].get<double>();
    return v;
}

}  // namespace

recovery::PlantState Scenario::initial_plant() const {
    recovery::PlantState plant;
    plant.q = policy.q_nominal;
    plant.temperatures.resize(Eigen::Index(scene.nodes.size()));
    for (size_t i = 0; i < scene.nodes.size(); ++i)
        plant.temperatures(Eigen::Index(i)) = scene.nodes[i].initial_c;
    plant.active_contact = policy.nominal_contact;
    return plant;
}

Scenario scenario_from_json(const std::string& text, const std::string& base_dir,
                            const std::string& where) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(where + ": " + e.what());
    }

    auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? p : (std::filesystem::path(base_dir) / fp).string();
    };

    Scenario sc;
    if (!doc.contains("model"))
        throw SchemaError(where + ": missing 'model' reference");
    sc.model_path = resolve(doc.at("model").get<std::string>());
    sc.model = dyn::load_model(sc.model_path);
    sc.ambient_c = doc.value("ambient_c", 25.0);

    if (doc.contains("nodes")) {
        for (const auto& jn : doc.at("nodes")) {
            ik::ThermalNode node;
            node.id = jn.at("id").get<std::string>();
            node.actuator_id = jn.at("actuator").get<std::string>();
            node.group = jn.value("group", std::string());
            node.initial_c = jn.value("initial_c", sc.ambient_c);
            if (jn.contains("params_file")) {
                node.params =
                    thermal::load_thermal_params(resolve(jn.at("params_file").get<std::string>()));
            } else if (jn.contains("params")) {
                node.params = thermal::thermal_params_from_json(jn.at("params").dump());
            } else {
                throw SchemaError(where + ": node '" + node.id +
                                  "' needs 'params' or 'params_file'");
            }
            sc.scene.nodes.push_back(std::move(node));
        }
        sc.scene.q_weights = Eigen::VectorXd::Ones(Eigen::Index(sc.scene.nodes.size()));
    }

    if (doc.contains("contacts")) {
        std::vector<std::string> order;
        if (doc.contains("contact_order"))
            for (const auto& n : doc.at("contact_order")) order.push_back(n.get<std::string>());
        else
            for (const auto& [name, frames] : doc.at("contacts").items()) order.push_back(name);
        for (const auto& name : order) {
            if (!doc.at("contacts").contains(name))
                throw SchemaError(where + ": contact_order names unknown config '" + name + "'");
            dyn::ContactConfig cfg;
            cfg.name = name;
            for (const auto& f : doc.at("contacts").at(name))
                cfg.frames.push_back(f.get<std::string>());
            sc.policy.contact_set.push_back(std::move(cfg));
        }
    }
    sc.policy.nominal_contact = doc.value("nominal_contact",
                                          sc.policy.contact_set.empty()
                                              ? std::string()
                                              : sc.policy.contact_set.front().name);

    if (doc.contains("q_nominal"))
        sc.policy.q_nominal = vector_from(doc.at("q_nominal"), where + ": q_nominal");

    if (doc.contains("policy")) {
        const json& jp = doc.at("policy");
        sc.policy.warning_c = jp.value("warning_c", sc.policy.warning_c);
        sc.policy.safe_c = jp.value("safe_c", sc.policy.safe_c);
        sc.policy.trigger_c = jp.value("trigger_c", sc.policy.safe_c);
        sc.policy.hot_weight = jp.value("hot_weight", sc.policy.hot_weight);
        sc.policy.nominal_weight = jp.value("nominal_weight", sc.policy.nominal_weight);
        const std::string horizon_mode = jp.value("horizon_mode", "fixed");
        if (horizon_mode == "fixed")
            sc.policy.horizon_mode = recovery::RecoveryPolicy::Horizon::Fixed;
        else if (horizon_mode == "rc-half")
            sc.policy.horizon_mode = recovery::RecoveryPolicy::Horizon::RcHalf;
        else
            throw SchemaError(where + ": unknown horizon_mode '" + horizon_mode + "'");
        sc.policy.horizon_s = jp.value("horizon_s", sc.policy.horizon_s);
        sc.policy.transition_s = jp.value("transition_s", sc.policy.transition_s);
        sc.policy.sim_dt_s = jp.value("sim_dt_s", sc.policy.sim_dt_s);
        sc.policy.sim_budget_s = jp.value("sim_budget_s", sc.policy.sim_budget_s);
    } else {
        sc.policy.trigger_c = sc.policy.safe_c;
    }
    sc.scene.horizon_s = sc.policy.horizon_s;

    if (doc.contains("descent")) {
        const json& jd = doc.at("descent");
        sc.descent.fd_step = jd.value("h", sc.descent.fd_step);
        sc.descent.delta_max_actuated = jd.value("delta_max_actuated", sc.descent.delta_max_actuated);
        sc.descent.delta_max_base_linear =
            jd.value("delta_max_base_linear", sc.descent.delta_max_base_linear);
        sc.descent.delta_max_base_rotary =
            jd.value("delta_max_base_rotary", sc.descent.delta_max_base_rotary);
        sc.descent.iteration_limit = jd.value("iteration_limit", sc.descent.iteration_limit);
        const std::string mode = jd.value("gradient_mode", "projected");
        if (mode == "projected") sc.descent.mode = ik::GradientMode::Projected;
        else if (mode == "basis") sc.descent.mode = ik::GradientMode::Basis;
        else throw SchemaError(where + ": unknown gradient_mode '" + mode + "'");
        sc.descent.restore_every = jd.value("restore_every", sc.descent.restore_every);
        sc.descent.drift_tol = jd.value("drift_tol", sc.descent.drift_tol);
    }

    const std::string mode = doc.value("mode", "switching");
    if (mode == "switching") sc.mode = recovery::RecoveryMode::Switching;
    else if (mode == "min-effort") sc.mode = recovery::RecoveryMode::MinEffort;
    else throw SchemaError(where + ": unknown mode '" + mode + "'");

    if (doc.contains("generate")) {
        const json& jg = doc.at("generate");
        sc.has_generate = true;
        sc.generate.sample_rate_hz = jg.value("sample_rate_hz", sc.generate.sample_rate_hz);
        sc.generate.duration_s = jg.value("duration_s", sc.generate.duration_s);
        sc.generate.noise_sigma_c = jg.value("noise_sigma_c", sc.generate.noise_sigma_c);
        sc.generate.contact = jg.value("contact", std::string());
        sc.generate.transition_s = jg.value("transition_s", sc.generate.transition_s);
        if (jg.contains("poses")) {
            for (const auto& jp : jg.at("poses")) {
                PoseSpec pose;
                pose.name = jp.value("name", "pose");
                pose.q = vector_from(jp.at("q"), where + ": pose '" + pose.name + "'");
                pose.duration_s = jp.at("duration_s").get<double>();
                sc.generate.poses.push_back(std::move(pose));
            }
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path, const std::string& config_override_path) {
    std::string text = read_file(path, "scenario file");
    if (!config_override_path.empty()) {
        json doc, over;
        try {
            doc = json::parse(text);
            over = json::parse(read_file(config_override_path, "config override"));
        } catch (const json::parse_error& e) {
            throw SchemaError(std::string("config merge: ") + e.what());
        }
        for (const auto& [key, value] : over.items()) doc[key] = value;
        text = doc.dump();
    }
    const std::string base = std::filesystem::path(path).parent_path().string();
    return scenario_from_json(text, base.empty() ? "." : base, path);
}

}  // namespace thermik
