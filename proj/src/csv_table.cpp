#include "thermik/csv_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace thermik::io {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int CsvTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return int(i);
    return -1;
}

Eigen::VectorXd CsvTable::column(const std::string& name) const {
    const int c = column_index(name);
    if (c < 0) throw SchemaError("csv table has no column '" + name + "'");
    Eigen::VectorXd v(Eigen::Index(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        try {
            size_t pos = 0;
            v(Eigen::Index(r)) = std::stod(rows[r][size_t(c)], &pos);
            if (pos != rows[r][size_t(c)].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw SchemaError("csv column '" + name + "' row " + std::to_string(r) +
                              ": non-numeric cell '" + rows[r][size_t(c)] + "'");
        }
    }
    return v;
}

void CsvTable::add_row() { rows.emplace_back(header.size()); }

void CsvTable::set(const std::string& name, double value) { set(name, format_number(value)); }

void CsvTable::set(const std::string& name, const std::string& value) {
    const int c = column_index(name);
    if (c < 0) throw SchemaError("csv table has no column '" + name + "'");
    rows.back()[size_t(c)] = value;
}

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open csv file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty csv file");
    table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != table.header.size())
            throw SchemaError(path + ": row width " + std::to_string(fields.size()) +
                              " does not match header width " +
                              std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    return table;
}

void write_csv_table(const CsvTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write csv file: " + path);
    for (size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

}  // namespace thermik::io
