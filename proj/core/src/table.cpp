#include "ssnmg/experiments.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace ssnmg {

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

void write_csv(std::ostream& os, const TableArtifact& table) {
    os << "# table = " << table.name << '\n';
    for (const auto& [k, v] : table.header) os << "# " << k << " = " << v << '\n';
    os << "# config_hash = " << table.config_hash << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
}

std::filesystem::path write_csv(const std::filesystem::path& dir, const TableArtifact& table) {
    std::filesystem::create_directories(dir);
    const auto path = dir / (table.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(f, table);
    if (!f) throw std::runtime_error("failed writing " + path.string());
    return path;
}

}  // namespace ssnmg
