#pragma once

#include <string>
#include <vector>

namespace ohl {

// In-memory CSV with provenance comment lines. Numeric cells are rendered
// with shortest round-trip formatting so identical inputs yield identical
// bytes on every platform we target.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    // Emitted as leading '# key: value' lines.
    std::string command;
    std::string config_hash;
    std::string seed;

    void add_row(std::vector<double> row);  // throws on column mismatch
    std::string to_string() const;
    void save(const std::string& path) const;
};

std::string format_cell(double v);

}  // namespace ohl
