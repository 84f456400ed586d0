#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermik/errors.hpp"

namespace thermik::io {

/// Small rectangular CSV table used for every emitted trace/report file.
/// Cells are kept as strings so a read/write round trip is lossless.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;
    /// Parses a column as numbers; throws SchemaError on non-numeric cells.
    Eigen::VectorXd column(const std::string& name) const;

    void add_row();
    void set(const std::string& name, double value);
    void set(const std::string& name, const std::string& value);
};

std::string format_number(double v);  ///< %.10g, the shared numeric format

CsvTable read_csv_table(const std::string& path);
void write_csv_table(const CsvTable& table, const std::string& path);

}  // namespace thermik::io
