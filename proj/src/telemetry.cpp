#include "thermik/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thermik::sysid {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

double TelemetryLog::sample_rate_hz() const {
    if (samples() < 2)
        throw SchemaError("telemetry: need at least 2 samples for a sample rate");
    return 1.0 / (sample_times(1) - sample_times(0));
}

int TelemetryLog::node_index(const std::string& id) const {
    auto it = std::find(node_ids.begin(), node_ids.end(), id);
    return it == node_ids.end() ? -1 : int(it - node_ids.begin());
}

int TelemetryLog::actuator_index(const std::string& id) const {
    auto it = std::find(actuator_ids.begin(), actuator_ids.end(), id);
    return it == actuator_ids.end() ? -1 : int(it - actuator_ids.begin());
}

void TelemetryLog::validate(bool allow_short) const {
    const Eigen::Index n = samples();
    if (ambient.size() != n || temperatures.rows() != n || efforts.rows() != n)
        throw SchemaError("telemetry: series lengths disagree");
    if (temperatures.cols() != Eigen::Index(node_ids.size()) ||
        efforts.cols() != Eigen::Index(actuator_ids.size()))
        throw SchemaError("telemetry: column counts disagree with id lists");
    if (!allow_short && n < 100)
        throw SchemaError("telemetry: need at least 100 samples, have " + std::to_string(n));
    if (n >= 2) {
        const double dt0 = sample_times(1) - sample_times(0);
        if (!(dt0 > 0))
            throw SchemaError("telemetry: sample times must be strictly increasing");
        for (Eigen::Index k = 1; k < n; ++k) {
            const double dt = sample_times(k) - sample_times(k - 1);
            if (!(dt > 0))
                throw SchemaError("telemetry: sample times must be strictly increasing (row " +
                                  std::to_string(k) + ")");
            if (std::abs(dt - dt0) > 1e-9 * std::max(1.0, dt0))
                throw SchemaError("telemetry: non-uniform sampling at row " + std::to_string(k));
        }
    }
}

TelemetryLog read_telemetry_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open telemetry file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw SchemaError(path + ": empty telemetry file");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "time_s" || header[1] != "ambient_c")
        throw SchemaError(path + ": telemetry header must start with time_s, ambient_c");

    TelemetryLog log;
    std::vector<int> temp_cols, effort_cols;
    for (size_t c = 2; c < header.size(); ++c) {
        if (has_suffix(header[c], "_temp_c")) {
            log.node_ids.push_back(header[c].substr(0, header[c].size() - 7));
            temp_cols.push_back(int(c));
        } else if (has_suffix(header[c], "_effort")) {
            log.actuator_ids.push_back(header[c].substr(0, header[c].size() - 7));
            effort_cols.push_back(int(c));
        } else {
            throw SchemaError(path + ": unrecognized telemetry column '" + header[c] + "'");
        }
    }

    std::vector<std::vector<double>> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (size_t c = 0; c < fields.size(); ++c) {
            try {
                size_t pos = 0;
                row[c] = std::stod(fields[c], &pos);
                if (pos != fields[c].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw SchemaError(path + ":" + std::to_string(line_no) + ": bad number '" +
                                  fields[c] + "'");
            }
        }
        rows.push_back(std::move(row));
    }

    const Eigen::Index n = Eigen::Index(rows.size());
    log.sample_times.resize(n);
    log.ambient.resize(n);
    log.temperatures.resize(n, Eigen::Index(log.node_ids.size()));
    log.efforts.resize(n, Eigen::Index(log.actuator_ids.size()));
    for (Eigen::Index k = 0; k < n; ++k) {
        log.sample_times(k) = rows[k][0];
        log.ambient(k) = rows[k][1];
        for (size_t j = 0; j < temp_cols.size(); ++j)
            log.temperatures(k, Eigen::Index(j)) = rows[k][temp_cols[j]];
        for (size_t j = 0; j < effort_cols.size(); ++j)
            log.efforts(k, Eigen::Index(j)) = rows[k][effort_cols[j]];
    }
    return log;
}

void write_telemetry_csv(const TelemetryLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw SchemaError("cannot write telemetry file: " + path);
    out << "time_s,ambient_c";
    for (const auto& id : log.node_ids) out << "," << id << "_temp_c";
    for (const auto& id : log.actuator_ids) out << "," << id << "_effort";
    out << "\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        out << buf;
    };
    for (Eigen::Index k = 0; k < log.samples(); ++k) {
        emit(log.sample_times(k));
        out << ",";
        emit(log.ambient(k));
        for (Eigen::Index j = 0; j < log.temperatures.cols(); ++j) {
            out << ",";
            emit(log.temperatures(k, j));
        }
        for (Eigen::Index j = 0; j < log.efforts.cols(); ++j) {
            out << ",";
            emit(log.efforts(k, j));
        }
        out << "\n";
    }
}

}  // namespace thermik::sysid
