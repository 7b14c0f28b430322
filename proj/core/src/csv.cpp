#include "xlayer/csv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace xlayer {

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.15e}", v);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
    : CsvWriter(path, std::vector<std::string>(header)) {}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), width_(header.size()) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("CsvWriter: row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("missing column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    CsvTable t;
    std::string line;
    if (std::getline(in, line)) t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

void write_topology_csv(const std::filesystem::path& path, const Topology& topology) {
    CsvWriter w(path, {"node", "x_m", "y_m"});
    for (std::size_t i = 0; i < topology.size(); ++i)
        w.row({std::to_string(i), format_real(topology.positions[i].x), format_real(topology.positions[i].y)});
}

void write_sessions_csv(const std::filesystem::path& path, const SessionSet& sessions) {
    CsvWriter w(path, {"session", "source", "destination"});
    for (std::size_t s = 0; s < sessions.size(); ++s)
        w.row({std::to_string(s), std::to_string(sessions[s].source), std::to_string(sessions[s].destination)});
}

void write_codebook_csv(const std::filesystem::path& path, const SpreadingCodebook& codebook) {
    std::vector<std::string> header{"node"};
    for (std::size_t c = 0; c < codebook.spreading_gain(); ++c) header.push_back("chip_" + std::to_string(c));
    CsvWriter w(path, header);
    for (std::size_t i = 0; i < codebook.size(); ++i) {
        std::vector<std::string> cells{std::to_string(i)};
        const auto s = codebook.sequence(i);
        for (Eigen::Index c = 0; c < s.size(); ++c) cells.push_back(format_real(s(c)));
        w.row(cells);
    }
}

void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace) {
    CsvWriter w(path, {"phase_index", "phase_kind", "total_power_W", "energy_per_bit_J"});
    for (std::size_t k = 0; k < trace.size(); ++k)
        w.row({std::to_string(k), to_string(trace[k].kind), format_real(trace[k].total_power),
               format_real(trace[k].energy_per_bit)});
}

void write_pc_trace_csv(const std::filesystem::path& path, const PcResult& result) {
    CsvWriter w(path, {"iteration", "total_power"});
    for (std::size_t k = 0; k < result.trace.size(); ++k) w.row({std::to_string(k), format_real(result.trace[k])});
}

void write_powers_csv(const std::filesystem::path& path, const Topology& topology, const PowerVector& p) {
    CsvWriter w(path, {"node", "x", "y", "power_W"});
    for (std::size_t i = 0; i < p.size(); ++i)
        w.row({std::to_string(i), format_real(topology.positions.at(i).x), format_real(topology.positions.at(i).y),
               format_real(p[i])});
}

void write_routes_csv(const std::filesystem::path& path, const RouteSet& routes) {
    CsvWriter w(path, {"session", "hop", "node"});
    for (std::size_t s = 0; s < routes.paths.size(); ++s)
        for (std::size_t h = 0; h < routes.paths[s].size(); ++h)
            w.row({std::to_string(s), std::to_string(h), std::to_string(routes.paths[s][h])});
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::vector<std::string> header{"row"};
    for (Eigen::Index c = 0; c < m.cols(); ++c) header.push_back(std::to_string(c));
    CsvWriter w(path, header);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<std::string> cells{std::to_string(r)};
        for (Eigen::Index c = 0; c < m.cols(); ++c) cells.push_back(format_real(m(r, c)));
        w.row(cells);
    }
}

}  // namespace xlayer
