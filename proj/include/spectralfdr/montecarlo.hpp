#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "spectralfdr/ensembles.hpp"
#include "spectralfdr/fdr.hpp"

namespace spectralfdr {

// Worker threads for trial-level parallelism; capped by the
// SPECTRAL_FDR_THREADS environment variable.
int worker_thread_count();

struct ComputeFlags {
    bool mc_truth = true;
    bool estimate = true;
    bool oracle = false;
};

struct ExperimentConfig {
    NoiseSpec noise;
    SignalSpec signal;
    int repetitions = 100;
    int k_max = 0;  // 0 = twice the signal rank
    double alpha = 0.05;
    std::uint64_t master_seed = 0;
    ComputeFlags compute;
    std::optional<double> p;   // rank threshold override; default is data-driven
    double noise_scale = 1.0;  // 0 gives noiseless instances
};

// Per-k ground truth tr(P_Ûₖ P_{U⊥})/k for one instance; the right sequence
// is filled for rectangular instances only.
struct TrueFdrSequences {
    Eigen::VectorXd left;
    Eigen::VectorXd right;
};

TrueFdrSequences true_fdr_trial(const EnsembleInstance& instance, int k_max);

struct ExperimentReport {
    struct Row {
        int k = 0;
        double fdr_estimate_mean = 0;
        double fdr_mc_mean = 0;
        double fdr_mc_stderr = 0;
        double fdr_mc_rstar_mean = 0;  // truth against the first-r* signal basis
        double fd_mc_mean = 0;         // unnormalized, = k · fdr_mc per trial
        double fdr_oracle = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Row> rows;        // symmetric, or the left side
    std::vector<Row> rows_right;  // rectangular instances only
    std::vector<int> rank_estimates;     // per trial
    std::vector<double> p_values;        // per trial
    std::map<int, int> k_hat_distribution;

    NoiseFamily family = NoiseFamily::Wigner;
    SignalKind signal_kind = SignalKind::well_separated;
    Eigen::Index n = 0, m = 0;
    int r = 0;
    int r_star = 0;
    double bbp_estimate = 0;
    int repetitions = 0;
    int k_max = 0;
    double alpha = 0;
    std::uint64_t master_seed = 0;
    // Wall time is diagnostic only and never part of serialized reports, so
    // identical seeds produce identical bytes.
    double wall_seconds = 0;
};

// Runs `repetitions` seeded trials (streams derived as (master_seed, trial))
// and averages the estimated, Monte Carlo, and optional oracle FDR columns.
// Deterministic for a fixed master seed regardless of worker count.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Number of spikes above the family's detection threshold. Uses the
// closed-form limit law where one exists, the pilot-based upper estimate
// otherwise.
int observable_rank(const NoiseSpec& noise, const SignalSpec& signal);

}  // namespace spectralfdr
