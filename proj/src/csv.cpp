#include "ohlrelay/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ohl {

std::string format_cell(double v) {
    char best[64];
    if (std::isfinite(v) && v == std::nearbyint(v) && std::fabs(v) < 1e15) {
        std::snprintf(best, sizeof(best), "%.0f", v);
        return best;
    }
    std::snprintf(best, sizeof(best), "%.17g", v);
    for (int prec = 1; prec < 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    return best;
}

void CsvTable::add_row(std::vector<double> row) {
    if (row.size() != header.size())
        throw std::invalid_argument("CsvTable: row width " +
                                    std::to_string(row.size()) +
                                    " != header width " +
                                    std::to_string(header.size()));
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::string out;
    if (!command.empty()) out += "# command: " + command + "\n";
    if (!config_hash.empty()) out += "# config_hash: " + config_hash + "\n";
    if (!seed.empty()) out += "# seed: " + seed + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("CsvTable: cannot open " + path);
    out << to_string();
    if (!out) throw std::runtime_error("CsvTable: write failed for " + path);
}

}  // namespace ohl
