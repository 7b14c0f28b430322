#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "xlayer/cross_layer.hpp"
#include "xlayer/net_model.hpp"
#include "xlayer/power_control.hpp"
#include "xlayer/routing.hpp"

namespace xlayer {

/// Comma-separated, header row, '.' decimal point. Reals are written in
/// scientific notation with 16 significant digits; infinities as "inf".
std::string format_real(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header);
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    /// Appends one pre-formatted row; must match the header width.
    void row(const std::vector<std::string>& cells);

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
};

/// Parsed CSV: header plus rows of raw cell text.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

void write_topology_csv(const std::filesystem::path& path, const Topology& topology);
void write_sessions_csv(const std::filesystem::path& path, const SessionSet& sessions);
void write_codebook_csv(const std::filesystem::path& path, const SpreadingCodebook& codebook);
void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace);
void write_pc_trace_csv(const std::filesystem::path& path, const PcResult& result);
void write_powers_csv(const std::filesystem::path& path, const Topology& topology, const PowerVector& p);
void write_routes_csv(const std::filesystem::path& path, const RouteSet& routes);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace xlayer
