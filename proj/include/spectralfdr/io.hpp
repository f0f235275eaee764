#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spectralfdr/fdr.hpp"
#include "spectralfdr/montecarlo.hpp"

namespace spectralfdr {

// Rectangular numeric matrix from a CSV/TSV file. The delimiter is detected
// from the first data line, and a single non-numeric header row is skipped.
// Throws ParseError on missing files, ragged rows, or non-numeric cells.
Eigen::MatrixXd read_matrix(const std::string& path);

enum class ReportFormat { json, csv };

// The serialized result of a CLI invocation. Numeric fields round-trip
// exactly: CSV carries 17 significant digits and JSON uses shortest
// round-trip formatting.
struct Report {
    std::string version = "spectral-fdr/1";
    std::string command;
    Eigen::Index input_n = 0, input_m = 0;
    bool input_symmetric = false;
    bool input_transposed = false;
    int r_hat = 0;
    double p_used = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> alpha;
    std::optional<int> k_hat;
    std::vector<std::pair<int, double>> curve;  // (k, FDR̂(k))
    std::vector<double> spacings;
    std::vector<double> values;  // spectrum values, for the spectrum command
    std::string side;
    std::optional<std::uint64_t> seed;
    std::optional<double> wall_seconds;  // emitted only when timings requested
    std::optional<ExperimentReport> experiment;

    nlohmann::json to_json() const;
    std::string to_json_string() const;
    std::string to_csv() const;
};

// Re-reads the k/fdr curve columns of a serialized report (both formats);
// used to verify lossless round-trips.
std::vector<std::pair<int, double>> read_report_curve(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace spectralfdr
