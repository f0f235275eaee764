#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "spectralfdr/errors.hpp"
#include "spectralfdr/io.hpp"
#include "spectralfdr/montecarlo.hpp"
#include "spectralfdr/oracle.hpp"
#include "spectralfdr/rank.hpp"

namespace sf = spectralfdr;

namespace {

struct CommonOutput {
    std::string format = "json";
    std::string out_path;
    bool timings = false;
};

void add_output_flags(CLI::App* cmd, CommonOutput& out) {
    cmd->add_option("--format", out.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", out.out_path, "Write the report to this path");
    cmd->add_flag("--timings", out.timings, "Include wall-clock timings in the report");
}

void emit(const sf::Report& report, const CommonOutput& out) {
    const std::string text =
        out.format == "csv" ? report.to_csv() : report.to_json_string();
    if (out.out_path.empty())
        std::cout << text;
    else
        sf::write_text_file(out.out_path, text);
}

double require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw CLI::ValidationError("--alpha", "alpha must lie strictly in (0, 1)");
    return alpha;
}

struct SpectrumPipeline {
    sf::Spectrum spectrum;
    bool symmetric = false;
};

// Shared ingestion: parse, optionally symmetrize, and factorize according to
// the requested mode ("auto" sends square symmetric-to-tolerance inputs down
// the eigen path).
SpectrumPipeline load_spectrum(const std::string& input, const std::string& mode,
                               bool symmetrize_flag, bool want_vectors) {
    Eigen::MatrixXd M = sf::read_matrix(input);
    if (symmetrize_flag) {
        if (M.rows() != M.cols())
            throw std::invalid_argument("--symmetrize requires a square matrix");
        M = sf::symmetrize(M);
    }
    SpectrumPipeline result;
    if (mode == "symmetric")
        result.symmetric = true;
    else if (mode == "asymmetric")
        result.symmetric = false;
    else
        result.symmetric = M.rows() == M.cols() && sf::is_symmetric(M);
    result.spectrum = result.symmetric
                          ? sf::symmetric_spectrum(M, sf::Tolerances{}, want_vectors)
                          : sf::singular_spectrum(M, sf::Tolerances{}, want_vectors);
    return result;
}

int run_select(const std::string& input, double alpha, const std::string& mode,
               const std::string& side, std::optional<double> p_option,
               std::optional<int> rank_option, bool symmetrize_flag,
               const CommonOutput& out) {
    require_alpha(alpha);
    const auto t0 = std::chrono::steady_clock::now();
    SpectrumPipeline pipeline =
        load_spectrum(input, mode, symmetrize_flag, /*want_vectors=*/false);
    const sf::Spectrum& spec = pipeline.spectrum;

    const sf::SpacingProfile profile = sf::spacings(spec);
    sf::RankConfig rank_config;
    if (p_option) {
        rank_config.p = *p_option;
        rank_config.source = sf::RankConfig::Source::user;
    } else {
        rank_config = sf::default_threshold(profile, spec.values.size());
        if (rank_config.degenerate_fallback)
            std::cerr << "warning: degenerate median spacing; falling back to p = 1\n";
    }

    int r_hat;
    if (rank_option) {
        if (*rank_option < 0 || *rank_option >= spec.values.size())
            throw std::invalid_argument("--rank outside [0, n)");
        r_hat = *rank_option;
    } else {
        r_hat = sf::rank_estimate(spec, rank_config).r_hat;
    }

    const int k_max = sf::default_k_max(spec.values.size(), r_hat);
    sf::FdrCurve curve;
    if (pipeline.symmetric) {
        curve = sf::fdr_curve_symmetric(spec, r_hat, k_max);
    } else {
        sf::CurveSide curve_side = sf::CurveSide::both;
        if (side == "left") curve_side = sf::CurveSide::left;
        if (side == "right") curve_side = sf::CurveSide::right;
        curve = sf::fdr_curve_asymmetric(spec, r_hat, k_max, curve_side);
    }
    const sf::SelectionResult selection =
        sf::select_dimension(curve, alpha, rank_config.p);

    sf::Report report;
    report.command = "select";
    report.input_n = spec.transposed ? spec.m : spec.n;
    report.input_m = spec.transposed ? spec.n : spec.m;
    report.input_symmetric = pipeline.symmetric;
    report.input_transposed = spec.transposed;
    report.r_hat = r_hat;
    report.p_used = rank_config.p;
    report.alpha = alpha;
    report.k_hat = selection.k_hat;
    for (int k = 1; k <= curve.k_max; ++k)
        report.curve.emplace_back(k, curve.at(k));
    report.spacings.assign(profile.deltas.data(),
                           profile.deltas.data() + profile.deltas.size());
    report.side = pipeline.symmetric ? "symmetric" : side;
    if (out.timings)
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();

    if (selection.k_hat == 0)
        std::cout << "no components selected (k_hat = 0), r_hat = " << r_hat << "\n";
    else
        std::cout << "k_hat = " << selection.k_hat << ", r_hat = " << r_hat << "\n";
    emit(report, out);
    return 0;
}

int run_simulate(const std::string& ensemble, const std::string& signal_kind,
                 int n, int m, int r, int reps, double alpha,
                 std::uint64_t seed, bool oracle, int k_max,
                 std::optional<double> p_option, const CommonOutput& out) {
    require_alpha(alpha);
    sf::ExperimentConfig config;
    config.noise = sf::NoiseSpec::make(sf::parse_family(ensemble), n, m);
    config.signal = sf::SignalSpec::make(sf::parse_signal_kind(signal_kind), r,
                                         sf::bbp_upper_estimate(config.noise));
    config.repetitions = reps;
    config.k_max = k_max;
    config.alpha = alpha;
    config.master_seed = seed;
    config.compute.oracle = oracle;
    if (p_option) config.p = *p_option;

    sf::ExperimentReport experiment = sf::run_experiment(config);

    sf::Report report;
    report.command = "simulate";
    report.input_n = experiment.n;
    report.input_m = experiment.m;
    report.input_symmetric = sf::family_is_symmetric(experiment.family);
    report.alpha = alpha;
    report.seed = seed;
    report.side = report.input_symmetric ? "symmetric" : "both";
    if (out.timings) report.wall_seconds = experiment.wall_seconds;
    experiment.wall_seconds = 0;
    report.experiment = std::move(experiment);

    std::cout << "simulate " << ensemble << " " << signal_kind << ": n = " << n
              << ", reps = " << reps << ", r_star = " << report.experiment->r_star
              << "\n";
    emit(report, out);
    return 0;
}

int run_rank(const std::string& input, std::optional<double> p_option,
             bool symmetrize_flag, const CommonOutput& out) {
    SpectrumPipeline pipeline =
        load_spectrum(input, "auto", symmetrize_flag, /*want_vectors=*/false);
    const sf::Spectrum& spec = pipeline.spectrum;
    const sf::SpacingProfile profile = sf::spacings(spec);

    sf::RankConfig rank_config;
    if (p_option) {
        rank_config.p = *p_option;
        rank_config.source = sf::RankConfig::Source::user;
    } else {
        rank_config = sf::default_threshold(profile, spec.values.size());
        if (rank_config.degenerate_fallback)
            std::cerr << "warning: degenerate median spacing; falling back to p = 1\n";
    }
    const sf::RankResult rank = sf::rank_estimate(spec, rank_config);

    sf::Report report;
    report.command = "rank";
    report.input_n = spec.transposed ? spec.m : spec.n;
    report.input_m = spec.transposed ? spec.n : spec.m;
    report.input_symmetric = pipeline.symmetric;
    report.input_transposed = spec.transposed;
    report.r_hat = rank.r_hat;
    report.p_used = rank_config.p;
    report.spacings.assign(profile.deltas.data(),
                           profile.deltas.data() + profile.deltas.size());

    std::cout << "r_hat = " << rank.r_hat << ", p = " << rank_config.p
              << ", threshold = " << rank.threshold << "\n";
    emit(report, out);
    return 0;
}

int run_spectrum(const std::string& input, const std::string& mode,
                 bool symmetrize_flag, const CommonOutput& out) {
    SpectrumPipeline pipeline =
        load_spectrum(input, mode, symmetrize_flag, /*want_vectors=*/false);
    const sf::Spectrum& spec = pipeline.spectrum;

    sf::Report report;
    report.command = "spectrum";
    report.input_n = spec.transposed ? spec.m : spec.n;
    report.input_m = spec.transposed ? spec.n : spec.m;
    report.input_symmetric = pipeline.symmetric;
    report.input_transposed = spec.transposed;
    report.values.assign(spec.values.data(), spec.values.data() + spec.values.size());
    if (spec.values.size() >= 2) {
        const sf::SpacingProfile profile = sf::spacings(spec);
        report.spacings.assign(profile.deltas.data(),
                               profile.deltas.data() + profile.deltas.size());
    }
    std::cout << (pipeline.symmetric ? "eigenvalues: " : "singular values: ")
              << spec.values.size() << "\n";
    emit(report, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    sf::pin_blas_threads();
    CLI::App app{"FDR-controlled principal subspace selection"};
    app.require_subcommand(1);

    // select
    auto* select = app.add_subcommand("select", "Select a subspace dimension with FDR control");
    std::string sel_input, sel_mode = "auto", sel_side = "both";
    double sel_alpha = 0;
    std::optional<double> sel_p;
    std::optional<int> sel_rank;
    bool sel_symmetrize = false;
    CommonOutput sel_out;
    select->add_option("--input", sel_input, "Matrix file (CSV or TSV)")->required();
    select->add_option("--alpha", sel_alpha, "Target FDR level in (0, 1)")->required();
    select->add_option("--mode", sel_mode, "Factorization mode")
        ->check(CLI::IsMember({"auto", "symmetric", "asymmetric"}));
    select->add_option("--side", sel_side, "Controlled side for rectangular inputs")
        ->check(CLI::IsMember({"left", "right", "both"}));
    select->add_option("--p", sel_p, "Rank threshold constant (default: data-driven)");
    select->add_option("--rank", sel_rank, "Rank override (skips the spacing estimate)");
    select->add_flag("--symmetrize", sel_symmetrize, "Replace M by (M + Mᵀ)/2 first");
    add_output_flags(select, sel_out);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a seeded ensemble experiment");
    std::string sim_ensemble, sim_signal = "well-separated";
    int sim_n = 0, sim_m = 0, sim_r = 20, sim_reps = 100, sim_kmax = 0;
    double sim_alpha = 0.05;
    std::uint64_t sim_seed = 0;
    bool sim_oracle = false;
    std::optional<double> sim_p;
    CommonOutput sim_out;
    simulate->add_option("--ensemble", sim_ensemble, "Noise ensemble preset")->required();
    simulate->add_option("--signal", sim_signal, "Signal spectrum preset")
        ->check(CLI::IsMember({"well-separated", "barely-separated", "entangled"}));
    simulate->add_option("--n", sim_n, "Problem dimension")->required();
    simulate->add_option("--m", sim_m, "Second dimension (rectangular ensembles)");
    simulate->add_option("--r", sim_r, "Signal rank");
    simulate->add_option("--reps", sim_reps, "Monte Carlo repetitions");
    simulate->add_option("--alpha", sim_alpha, "Target FDR level");
    simulate->add_option("--seed", sim_seed, "Master seed");
    simulate->add_flag("--oracle", sim_oracle, "Add the limiting-FDR oracle column");
    simulate->add_option("--k-max", sim_kmax, "Curve length (default: 2r)");
    simulate->add_option("--p", sim_p, "Rank threshold constant (default: data-driven)");
    add_output_flags(simulate, sim_out);

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "Spacing-threshold rank estimate");
    std::string rank_input;
    std::optional<double> rank_p;
    bool rank_symmetrize = false;
    CommonOutput rank_out;
    rank_cmd->add_option("--input", rank_input, "Matrix file (CSV or TSV)")->required();
    rank_cmd->add_option("--p", rank_p, "Rank threshold constant (default: data-driven)");
    rank_cmd->add_flag("--symmetrize", rank_symmetrize, "Replace M by (M + Mᵀ)/2 first");
    add_output_flags(rank_cmd, rank_out);

    // spectrum
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Emit the spectrum and spacings");
    std::string spectrum_input, spectrum_mode = "auto";
    bool spectrum_symmetrize = false;
    CommonOutput spectrum_out;
    spectrum_cmd->add_option("--input", spectrum_input, "Matrix file (CSV or TSV)")->required();
    spectrum_cmd->add_option("--mode", spectrum_mode, "Factorization mode")
        ->check(CLI::IsMember({"auto", "symmetric", "asymmetric"}));
    spectrum_cmd->add_flag("--symmetrize", spectrum_symmetrize,
                           "Replace M by (M + Mᵀ)/2 first");
    add_output_flags(spectrum_cmd, spectrum_out);

    try {
        app.parse(argc, argv);
        if (select->parsed())
            return run_select(sel_input, sel_alpha, sel_mode, sel_side, sel_p,
                              sel_rank, sel_symmetrize, sel_out);
        if (simulate->parsed())
            return run_simulate(sim_ensemble, sim_signal, sim_n, sim_m, sim_r,
                                sim_reps, sim_alpha, sim_seed, sim_oracle,
                                sim_kmax, sim_p, sim_out);
        if (rank_cmd->parsed())
            return run_rank(rank_input, rank_p, rank_symmetrize, rank_out);
        if (spectrum_cmd->parsed())
            return run_spectrum(spectrum_input, spectrum_mode, spectrum_symmetrize,
                                spectrum_out);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const sf::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const sf::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
