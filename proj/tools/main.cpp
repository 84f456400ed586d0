#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermik/csv_table.hpp"
#include "thermik/filters.hpp"
#include "thermik/recovery.hpp"
#include "thermik/scenario.hpp"
#include "thermik/sysid.hpp"
#include "thermik/telemetry_generator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thermik;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTimeout = 4;

void ensure_dir(const std::string& out) { fs::create_directories(out); }

void write_json(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw SchemaError("cannot write " + path);
    f << j.dump(2) << "\n";
}

int cmd_generate(const std::string& scenario_path, const std::string& out,
                 std::uint64_t seed, const std::string& config) {
    const Scenario scenario = load_scenario(scenario_path, config);
    const sysid::TelemetryLog log = generate_telemetry(scenario, seed);
    ensure_dir(out);
    const std::string path = (fs::path(out) / "telemetry.csv").string();
    sysid::write_telemetry_csv(log, path);
    std::cout << "wrote " << path << " (" << log.samples() << " samples, "
              << log.node_ids.size() << " nodes, " << log.actuator_ids.size()
              << " actuators)\n";
    return kExitOk;
}

int cmd_fit(const std::string& log_path, const std::vector<std::string>& node_specs,
            const std::string& out) {
    const sysid::TelemetryLog log = sysid::read_telemetry_csv(log_path);
    if (node_specs.empty())
        throw InvalidInputError("fit: give at least one --node <node>[=<actuator>]");
    ensure_dir(out);

    json report;
    report["log"] = log_path;
    bool any_ok = false;
    bool all_ok = true;
    for (const auto& spec : node_specs) {
        const auto eq = spec.find('=');
        const std::string node = spec.substr(0, eq == std::string::npos ? spec.size() : eq);
        sysid::FitSettings settings;
        if (eq != std::string::npos) settings.actuator_id = spec.substr(eq + 1);
        json entry;
        try {
            const auto [params, fit_report] = sysid::fit(log, node, settings);
            const std::string params_path = (fs::path(out) / (node + ".params.json")).string();
            thermal::save_thermal_params(params, params_path);
            entry["params_file"] = params_path;
            entry["rc"] = params.rc_time_constant;
            entry["beta_r"] = params.beta_r;
            entry["beta_bias_r"] = params.beta_bias_r;
            entry["t_offset"] = params.t_offset;
            entry["final_loss"] = fit_report.final_loss;
            entry["iterations"] = fit_report.iterations;
            entry["open_loop_rmse_c"] = fit_report.open_loop_rmse_c;
            if (fit_report.loss_curve.size() > 0) {
                io::CsvTable curve;
                curve.header = {"iteration", "loss"};
                for (Eigen::Index i = 0; i < fit_report.loss_curve.size(); ++i) {
                    curve.add_row();
                    curve.set("iteration", double(i * fit_report.loss_curve_stride));
                    curve.set("loss", fit_report.loss_curve(i));
                }
                const std::string curve_path =
                    (fs::path(out) / ("loss_curve_" + node + ".csv")).string();
                io::write_csv_table(curve, curve_path);
                entry["loss_curve"] = curve_path;
            }
            std::cout << node << ": rc=" << params.rc_time_constant
                      << " beta_r=" << params.beta_r << " beta_bias_r=" << params.beta_bias_r
                      << " t_offset=" << params.t_offset
                      << " rmse=" << fit_report.open_loop_rmse_c << " degC\n";
            any_ok = true;
        } catch (const SchemaError&) {
            throw;  // unknown node/actuator: hard input error
        } catch (const std::exception& e) {
            std::cerr << "fit failed for node '" << node << "': " << e.what() << "\n";
            entry["error"] = e.what();
            all_ok = false;
        }
        report["nodes"][node] = entry;
    }
    write_json(report, (fs::path(out) / "fit_report.json").string());
    if (!any_ok) return kExitInfeasible;
    return all_ok ? kExitOk : kExitInfeasible;
}

int cmd_predict(const std::string& params_path, const std::string& log_path,
                const std::string& node, const std::string& actuator, const std::string& out) {
    const thermal::ThermalParams params = thermal::load_thermal_params(params_path);
    const sysid::TelemetryLog log = sysid::read_telemetry_csv(log_path);
    const Eigen::VectorXd pred = sysid::open_loop_trace(params, log, node, actuator);
    const double rmse = sysid::evaluate_open_loop(params, log, node, actuator);
    ensure_dir(out);

    io::CsvTable table;
    table.header = {"time_s", "measured_c", "predicted_c"};
    const int ni = log.node_index(node);
    for (Eigen::Index k = 0; k < log.samples(); ++k) {
        table.add_row();
        table.set("time_s", log.sample_times(k));
        table.set("measured_c", log.temperatures(k, ni));
        table.set("predicted_c", pred(k));
    }
    const std::string path = (fs::path(out) / "prediction.csv").string();
    io::write_csv_table(table, path);
    std::cout << "open-loop RMSE for " << node << ": " << rmse << " degC\nwrote " << path << "\n";
    return kExitOk;
}

void write_descent_trace(const ik::DescentResult& result, const std::vector<std::string>& node_ids,
                         const std::string& path) {
    io::CsvTable table;
    table.header = {"iterate", "f", "max_dq"};
    for (const auto& id : node_ids) table.header.push_back(id + "_pred_c");
    for (const auto& row : result.trace) {
        table.add_row();
        table.set("iterate", double(row.iterate));
        table.set("f", row.f);
        table.set("max_dq", row.max_dq);
        for (size_t i = 0; i < node_ids.size(); ++i)
            table.set(node_ids[i] + "_pred_c",
                      row.node_temps.size() > Eigen::Index(i) ? row.node_temps(Eigen::Index(i))
                                                              : 0.0);
    }
    io::write_csv_table(table, path);
}

int cmd_minimize(const std::string& scenario_path, const std::string& contact_name,
                 const std::string& out, const std::string& config) {
    const Scenario scenario = load_scenario(scenario_path, config);
    const auto& contact = scenario.policy.contact(
        contact_name.empty() ? scenario.policy.nominal_contact : contact_name);
    ik::ThermalScene scene = scenario.scene;
    scene.horizon_s = scenario.policy.horizon_s;
    const ik::DescentResult result =
        ik::descend(scene, scenario.model, scenario.policy.q_nominal, contact, scenario.descent);
    ensure_dir(out);

    json q_doc;
    q_doc["contact"] = contact.name;
    q_doc["f"] = result.f_star;
    q_doc["iterations"] = result.iterations;
    q_doc["termination"] = result.termination;
    q_doc["q"] = std::vector<double>(result.q_star.data(),
                                     result.q_star.data() + result.q_star.size());
    write_json(q_doc, (fs::path(out) / "q_star.json").string());

    std::vector<std::string> node_ids;
    for (const auto& n : scene.nodes) node_ids.push_back(n.id);
    write_descent_trace(result, node_ids, (fs::path(out) / "descent_trace.csv").string());
    std::cout << "minimized f = " << result.f_star << " after " << result.iterations
              << " iterations (" << result.termination << ")\n";
    return kExitOk;
}

void write_recovery_outputs(const recovery::RecoveryReport& report,
                            const ik::ThermalScene& scene, const std::string& prefix,
                            const std::string& out, json& summary) {
    io::CsvTable table;
    table.header = {"time_s"};
    for (const auto& n : scene.nodes) table.header.push_back(n.id + "_temp_c");
    for (const auto& g : report.groups) table.header.push_back(g + "_norm_c");
    table.header.push_back("contact");
    table.header.push_back("f");
    for (size_t r = 0; r < report.trace.size(); ++r) {
        const auto& row = report.trace[r];
        table.add_row();
        table.set("time_s", row.t);
        for (size_t i = 0; i < scene.nodes.size(); ++i)
            table.set(scene.nodes[i].id + "_temp_c", row.temperatures(Eigen::Index(i)));
        for (const auto& g : report.groups)
            table.set(g + "_norm_c", report.group_norm(scene, g, row.temperatures));
        table.set("contact", row.contact);
        table.set("f", report.trace_f[r]);
    }
    io::write_csv_table(table, (fs::path(out) / (prefix + "_trace.csv")).string());

    summary["mode"] = prefix;
    summary["timed_out"] = report.timed_out;
    summary["total_s"] = report.total_s;
    for (const auto& [node, t] : report.time_to_safe)
        summary["time_to_safe_s"][node] = std::isnan(t) ? json(nullptr) : json(t);
    for (const auto& [group, t] : report.group_time_to_safe)
        summary["group_time_to_safe_s"][group] = std::isnan(t) ? json(nullptr) : json(t);
    summary["schedule"] = json::array();
    for (const auto& entry : report.schedule)
        summary["schedule"].push_back(
            {{"t", entry.t}, {"contact", entry.contact}, {"stance", entry.stance}});
}

int cmd_recover(const std::string& scenario_path, const std::string& mode_flag,
                const std::string& out, const std::string& config) {
    const Scenario scenario = load_scenario(scenario_path, config);
    recovery::RecoveryMode mode = scenario.mode;
    if (mode_flag == "switching") mode = recovery::RecoveryMode::Switching;
    else if (mode_flag == "min-effort") mode = recovery::RecoveryMode::MinEffort;
    else if (!mode_flag.empty())
        throw InvalidInputError("unknown mode '" + mode_flag + "' (switching|min-effort)");

    const recovery::RecoveryReport report = recovery::run_recovery(
        scenario.initial_plant(), scenario.policy, scenario.scene, scenario.model, mode,
        scenario.descent);
    ensure_dir(out);
    const std::string prefix =
        mode == recovery::RecoveryMode::Switching ? "switching" : "mineffort";
    json summary;
    write_recovery_outputs(report, scenario.scene, prefix, out, summary);
    write_json(summary, (fs::path(out) / "recovery_summary.json").string());
    std::cout << (report.timed_out ? "recovery timed out after " : "recovered in ")
              << report.total_s << " s (simulated)\n";
    return report.timed_out ? kExitTimeout : kExitOk;
}

int cmd_compare(const std::string& scenario_path, const std::string& out,
                const std::string& config) {
    const Scenario scenario = load_scenario(scenario_path, config);
    const recovery::PlantState plant = scenario.initial_plant();

    const recovery::RecoveryReport sw = recovery::run_recovery(
        plant, scenario.policy, scenario.scene, scenario.model,
        recovery::RecoveryMode::Switching, scenario.descent);
    const recovery::RecoveryReport me = recovery::run_recovery(
        plant, scenario.policy, scenario.scene, scenario.model,
        recovery::RecoveryMode::MinEffort, scenario.descent);
    ensure_dir(out);

    // hot group: the group of the hottest node at the start
    Eigen::Index hottest = 0;
    plant.temperatures.maxCoeff(&hottest);
    const std::string hot_group = scenario.scene.nodes[size_t(hottest)].group;

    const double fs = 1.0 / scenario.policy.sim_dt_s;
    auto group_norms = [&](const recovery::RecoveryReport& r, const std::string& g) {
        Eigen::VectorXd v(Eigen::Index(r.trace.size()));
        for (size_t i = 0; i < r.trace.size(); ++i)
            v(Eigen::Index(i)) = r.group_norm(scenario.scene, g, r.trace[i].temperatures);
        return v;
    };

    const size_t rows = std::max(sw.trace.size(), me.trace.size());
    io::CsvTable table;
    table.header = {"time_s"};
    std::map<std::string, Eigen::VectorXd> columns;
    for (const auto& g : sw.groups) {
        for (const std::string mode : {"switching", "mineffort"}) {
            const auto& rep = mode == "switching" ? sw : me;
            Eigen::VectorXd norm = group_norms(rep, g);
            // norm rate through the 0.1 Hz low-pass derivative
            Eigen::VectorXd rate = sysid::derivative_filter(norm, 0.1, fs);
            table.header.push_back(mode + "_" + g + "_norm_c");
            table.header.push_back(mode + "_" + g + "_rate_c_s");
            columns[mode + "_" + g + "_norm_c"] = norm;
            columns[mode + "_" + g + "_rate_c_s"] = rate;
        }
    }
    for (size_t r = 0; r < rows; ++r) {
        table.add_row();
        table.set("time_s", double(r + 1) * scenario.policy.sim_dt_s);
        for (const auto& [name, v] : columns) {
            const Eigen::Index i = std::min(Eigen::Index(r), v.size() - 1);
            table.set(name, v(i));  // finished run holds its final value
        }
    }
    io::write_csv_table(table, (fs::path(out) / "comparison.csv").string());

    json summary;
    json sw_summary, me_summary;
    write_recovery_outputs(sw, scenario.scene, "switching", out, sw_summary);
    write_recovery_outputs(me, scenario.scene, "mineffort", out, me_summary);
    summary["switching"] = sw_summary;
    summary["mineffort"] = me_summary;
    summary["hot_group"] = hot_group;

    auto peak_cooling = [&](const std::string& mode) {
        const Eigen::VectorXd& rate = columns.at(mode + "_" + hot_group + "_rate_c_s");
        return rate.size() ? -rate.minCoeff() : 0.0;
    };
    const double sw_safe = sw.group_time_to_safe.count(hot_group)
                               ? sw.group_time_to_safe.at(hot_group)
                               : std::numeric_limits<double>::quiet_NaN();
    const double me_safe = me.group_time_to_safe.count(hot_group)
                               ? me.group_time_to_safe.at(hot_group)
                               : std::numeric_limits<double>::quiet_NaN();
    summary["switching_hot_time_to_safe_s"] = sw_safe;
    summary["mineffort_hot_time_to_safe_s"] = me_safe;
    summary["switching_peak_cooling_c_s"] = peak_cooling("switching");
    summary["mineffort_peak_cooling_c_s"] = peak_cooling("mineffort");
    summary["first_to_recover_hot_group"] =
        sw_safe < me_safe ? "switching" : (me_safe < sw_safe ? "mineffort" : "tie");
    write_json(summary, (fs::path(out) / "comparison_summary.json").string());

    std::cout << "hot group '" << hot_group << "': switching time-to-safe " << sw_safe
              << " s, min-effort " << me_safe << " s\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"actuator thermal modeling, identification and thermally-aware posture tools"};
    app.require_subcommand(1);

    std::string scenario_path, out = ".", config, log_path, params_path, node, actuator,
                contact, mode_flag;
    std::uint64_t seed = 0;
    std::vector<std::string> node_specs;

    auto* generate = app.add_subcommand("generate", "simulate telemetry for a scenario");
    generate->add_option("--scenario", scenario_path)->required();
    generate->add_option("--out", out)->required();
    generate->add_option("--seed", seed);
    generate->add_option("--config", config);

    auto* fit = app.add_subcommand("fit", "identify thermal parameters from telemetry");
    fit->add_option("--log", log_path)->required();
    fit->add_option("--node", node_specs, "node id, or node=actuator")->required();
    fit->add_option("--out", out)->required();

    auto* predict = app.add_subcommand("predict", "open-loop prediction against telemetry");
    predict->add_option("--params", params_path)->required();
    predict->add_option("--log", log_path)->required();
    predict->add_option("--node", node)->required();
    predict->add_option("--actuator", actuator);
    predict->add_option("--out", out)->required();

    auto* minimize = app.add_subcommand("minimize", "find a thermally minimizing configuration");
    minimize->add_option("--scenario", scenario_path)->required();
    minimize->add_option("--contact", contact);
    minimize->add_option("--out", out)->required();
    minimize->add_option("--config", config);

    auto* recover = app.add_subcommand("recover", "run the thermal recovery loop");
    recover->add_option("--scenario", scenario_path)->required();
    recover->add_option("--mode", mode_flag, "switching|min-effort");
    recover->add_option("--out", out)->required();
    recover->add_option("--config", config);

    auto* compare = app.add_subcommand("compare", "contact switching vs minimum effort");
    compare->add_option("--scenario", scenario_path)->required();
    compare->add_option("--out", out)->required();
    compare->add_option("--config", config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(scenario_path, out, seed, config);
        if (fit->parsed()) return cmd_fit(log_path, node_specs, out);
        if (predict->parsed()) return cmd_predict(params_path, log_path, node, actuator, out);
        if (minimize->parsed()) return cmd_minimize(scenario_path, contact, out, config);
        if (recover->parsed()) return cmd_recover(scenario_path, mode_flag, out, config);
        if (compare->parsed()) return cmd_compare(scenario_path, out, config);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return kExitOk;
}
