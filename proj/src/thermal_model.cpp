#include "thermik/thermal_model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace thermik::thermal {

using nlohmann::json;

static ThermalParams params_from(const json& j, const std::string& where) {
    for (const char* key : {"rc", "beta_r", "beta_bias_r", "t_offset"}) {
        if (!j.contains(key))
            throw SchemaError(where + ": missing thermal parameter key '" + key + "'");
    }
    ThermalParams p;
    p.rc_time_constant = j.at("rc").get<double>();
    p.beta_r = j.at("beta_r").get<double>();
    p.beta_bias_r = j.at("beta_bias_r").get<double>();
    p.t_offset = j.at("t_offset").get<double>();
    validate(p);
    return p;
}

ThermalParams thermal_params_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("thermal params: ") + e.what());
    }
    return params_from(j, "thermal params");
}

std::string thermal_params_to_json(const ThermalParams& p) {
    json j;
    j["rc"] = p.rc_time_constant;
    j["beta_r"] = p.beta_r;
    j["beta_bias_r"] = p.beta_bias_r;
    j["t_offset"] = p.t_offset;
    return j.dump(2) + "\n";
}

ThermalParams load_thermal_params(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open thermal parameter file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return thermal_params_from_json(ss.str());
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

void save_thermal_params(const ThermalParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw SchemaError("cannot write thermal parameter file: " + path);
    out << thermal_params_to_json(p);
}

}  // namespace thermik::thermal
