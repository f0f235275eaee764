#include "spectralfdr/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "spectralfdr/errors.hpp"

namespace spectralfdr {

namespace {

bool parse_double(std::string_view token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r'))
        --end;
    if (begin == end) return false;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            tokens.push_back(line.substr(start));
            return tokens;
        }
        tokens.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string format_shortest(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

}  // namespace

Eigen::MatrixXd read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    char delim = 0;
    bool first_content_line = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (delim == 0) delim = line.find('\t') != std::string::npos ? '\t' : ',';
        const auto tokens = split(line, delim);
        std::vector<double> row;
        row.reserve(tokens.size());
        bool numeric = true;
        for (const auto token : tokens) {
            double v = 0;
            if (!parse_double(token, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            // A single non-numeric leading row is treated as a header.
            if (first_content_line) {
                first_content_line = false;
                continue;
            }
            throw ParseError(path + ": non-numeric value on line " +
                             std::to_string(line_no));
        }
        first_content_line = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ": ragged row on line " + std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no numeric data");

    Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
            matrix(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (!matrix.allFinite()) throw ParseError(path + ": non-finite values");
    return matrix;
}

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["command"] = command;
    j["input"] = {{"n", input_n},
                  {"m", input_m},
                  {"symmetric", input_symmetric},
                  {"transposed", input_transposed}};
    j["r_hat"] = r_hat;
    if (std::isfinite(p_used)) j["p_used"] = p_used;
    if (alpha) j["alpha"] = *alpha;
    if (k_hat) j["k_hat"] = *k_hat;
    if (!curve.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [k, fdr] : curve) arr.push_back({{"k", k}, {"fdr", fdr}});
        j["curve"] = std::move(arr);
    }
    if (!spacings.empty()) j["spacings"] = spacings;
    if (!values.empty()) j["values"] = values;
    if (!side.empty()) j["side"] = side;
    if (seed) j["seed"] = *seed;
    if (wall_seconds) j["timings"] = {{"wall_seconds", *wall_seconds}};
    if (experiment) {
        const ExperimentReport& exp = *experiment;
        nlohmann::json e;
        e["family"] = family_name(exp.family);
        e["signal"] = signal_kind_name(exp.signal_kind);
        e["n"] = exp.n;
        e["m"] = exp.m;
        e["r"] = exp.r;
        e["r_star"] = exp.r_star;
        e["bbp_estimate"] = exp.bbp_estimate;
        e["repetitions"] = exp.repetitions;
        e["alpha"] = exp.alpha;
        e["seed"] = exp.master_seed;
        auto rows_json = [](const std::vector<ExperimentReport::Row>& rows) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& row : rows) {
                nlohmann::json r = {{"k", row.k},
                                    {"fdr_estimate_mean", row.fdr_estimate_mean},
                                    {"fdr_mc_mean", row.fdr_mc_mean},
                                    {"fdr_mc_stderr", row.fdr_mc_stderr},
                                    {"fdr_mc_rstar_mean", row.fdr_mc_rstar_mean},
                                    {"fd_mc_mean", row.fd_mc_mean}};
                if (std::isfinite(row.fdr_oracle)) r["fdr_oracle"] = row.fdr_oracle;
                arr.push_back(std::move(r));
            }
            return arr;
        };
        e["rows"] = rows_json(exp.rows);
        if (!exp.rows_right.empty()) e["rows_right"] = rows_json(exp.rows_right);
        e["rank_estimates"] = exp.rank_estimates;
        nlohmann::json khd = nlohmann::json::object();
        for (const auto& [k, count] : exp.k_hat_distribution)
            khd[std::to_string(k)] = count;
        e["k_hat_distribution"] = std::move(khd);
        j["experiment"] = std::move(e);
    }
    return j;
}

std::string Report::to_json_string() const { return to_json().dump(2) + "\n"; }

std::string Report::to_csv() const {
    std::ostringstream out;
    out << "# " << version << "," << command << "\n";
    if (experiment) {
        const ExperimentReport& exp = *experiment;
        const bool with_oracle =
            !exp.rows.empty() && std::isfinite(exp.rows.front().fdr_oracle);
        auto emit = [&](const std::vector<ExperimentReport::Row>& rows,
                        const char* label) {
            out << "# side," << label << "\n";
            out << "k,fdr_estimate_mean,fdr_mc_mean,fdr_mc_stderr,fd_mc_mean";
            if (with_oracle) out << ",fdr_oracle";
            out << "\n";
            for (const auto& row : rows) {
                out << row.k << ',' << format_shortest(row.fdr_estimate_mean) << ','
                    << format_shortest(row.fdr_mc_mean) << ','
                    << format_shortest(row.fdr_mc_stderr) << ','
                    << format_shortest(row.fd_mc_mean);
                if (with_oracle) out << ',' << format_shortest(row.fdr_oracle);
                out << "\n";
            }
        };
        emit(exp.rows, exp.rows_right.empty() ? "symmetric" : "left");
        if (!exp.rows_right.empty()) emit(exp.rows_right, "right");
        return out.str();
    }
    if (!curve.empty()) {
        out << "k,fdr\n";
        for (const auto& [k, fdr] : curve)
            out << k << ',' << format_shortest(fdr) << "\n";
    }
    if (!values.empty()) {
        out << "index,value\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            out << (i + 1) << ',' << format_shortest(values[i]) << "\n";
    }
    if (!spacings.empty()) {
        out << "j,delta\n";
        for (std::size_t i = 0; i < spacings.size(); ++i)
            out << (i + 2) << ',' << format_shortest(spacings[i]) << "\n";
    }
    return out.str();
}

std::vector<std::pair<int, double>> read_report_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open report: " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    std::vector<std::pair<int, double>> curve;
    if (!content.empty() && content.front() == '{') {
        const nlohmann::json j = nlohmann::json::parse(content);
        if (j.contains("curve"))
            for (const auto& point : j["curve"])
                curve.emplace_back(point["k"].get<int>(), point["fdr"].get<double>());
        return curve;
    }
    std::istringstream stream(content);
    std::string line;
    bool in_curve = false;
    while (std::getline(stream, line)) {
        if (line.rfind("k,fdr", 0) == 0) {
            in_curve = true;
            continue;
        }
        if (!in_curve || line.empty()) continue;
        const auto tokens = split(line, ',');
        if (tokens.size() < 2) break;
        double k = 0, fdr = 0;
        if (!parse_double(tokens[0], k) || !parse_double(tokens[1], fdr)) break;
        curve.emplace_back(static_cast<int>(k), fdr);
    }
    return curve;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << content;
}

}  // namespace spectralfdr
