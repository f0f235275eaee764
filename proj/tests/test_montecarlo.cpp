#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>

#include "spectralfdr/montecarlo.hpp"

using namespace spectralfdr;

namespace {

ExperimentConfig small_config(std::uint64_t seed) {
    ExperimentConfig config;
    config.noise = NoiseSpec::make(NoiseFamily::Wigner, 60);
    config.signal = SignalSpec::make(SignalKind::well_separated, 3,
                                     bbp_upper_estimate(config.noise));
    config.repetitions = 6;
    config.k_max = 8;
    config.alpha = 0.2;
    config.master_seed = seed;
    return config;
}

bool reports_equal(const ExperimentReport& a, const ExperimentReport& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& ra = a.rows[i];
        const auto& rb = b.rows[i];
        if (ra.fdr_estimate_mean != rb.fdr_estimate_mean) return false;
        if (ra.fdr_mc_mean != rb.fdr_mc_mean) return false;
        if (ra.fdr_mc_stderr != rb.fdr_mc_stderr) return false;
        if (ra.fd_mc_mean != rb.fd_mc_mean) return false;
    }
    return a.rank_estimates == b.rank_estimates &&
           a.k_hat_distribution == b.k_hat_distribution;
}

}  // namespace

TEST_CASE("true_fdr_trial degenerate cases") {
    // Noiseless instance: the top-r estimate is the signal space exactly.
    const NoiseSpec noise = NoiseSpec::make(NoiseFamily::Wigner, 40);
    SignalSpec signal = SignalSpec::make(SignalKind::well_separated, 4, 1.0);
    const EnsembleInstance clean = sample_instance(noise, signal, 5, 0.0);
    const TrueFdrSequences seq = true_fdr_trial(clean, 8);
    for (int k = 1; k <= 4; ++k) CHECK(seq.left[k - 1] <= 1e-10);
    for (int k = 5; k <= 8; ++k)
        CHECK(seq.left[k - 1] == doctest::Approx((k - 4.0) / k).epsilon(1e-9));

    // Estimate orthogonal to the signal: full false discovery.
    EnsembleInstance manual;
    manual.X = Eigen::Vector2d(0.0, 1.0).asDiagonal();  // top eigenvector is e₂
    manual.A = manual.X;
    manual.E = Eigen::MatrixXd::Zero(2, 2);
    manual.signal_left_basis = Eigen::MatrixXd::Identity(2, 1);  // e₁
    manual.thetas = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(true_fdr_trial(manual, 1).left[0] == doctest::Approx(1.0).epsilon(1e-12));

    EnsembleInstance empty;
    empty.X = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(true_fdr_trial(empty, 1), std::invalid_argument);
}

TEST_CASE("zero-noise experiment reproduces exact projector algebra") {
    ExperimentConfig config;
    config.noise = NoiseSpec::make(NoiseFamily::Wigner, 50);
    config.signal = SignalSpec::make(SignalKind::well_separated, 5, 1.0);
    config.repetitions = 1;
    config.k_max = 10;
    config.noise_scale = 0.0;
    const ExperimentReport report = run_experiment(config);
    for (const auto& row : report.rows) {
        const double expected = row.k <= 5 ? 0.0 : (row.k - 5.0) / row.k;
        CHECK(row.fdr_mc_mean == doctest::Approx(expected).epsilon(1e-9));
        // Degenerate zero bulk drives the estimate to the same curve.
        CHECK(row.fdr_estimate_mean == doctest::Approx(expected).epsilon(1e-9));
        CHECK(row.fd_mc_mean == doctest::Approx(row.k * row.fdr_mc_mean));
    }
    CHECK(report.rank_estimates == std::vector<int>{5});
}

TEST_CASE("estimate tracks Monte Carlo truth on a small Wigner panel") {
    ExperimentConfig config;
    config.noise = NoiseSpec::make(NoiseFamily::Wigner, 300);
    config.signal = SignalSpec::make(SignalKind::well_separated, 5,
                                     bbp_upper_estimate(config.noise));
    config.repetitions = 20;
    config.k_max = 10;
    config.master_seed = 99;
    config.compute.oracle = true;
    const ExperimentReport report = run_experiment(config);
    for (const auto& row : report.rows) {
        CHECK(row.fdr_estimate_mean >= 0.0);
        CHECK(row.fdr_estimate_mean <= 1.0);
        if (row.k <= 5)
            CHECK(std::abs(row.fdr_estimate_mean - row.fdr_mc_mean) <= 0.15);
        CHECK(std::isfinite(row.fdr_oracle));
        CHECK(row.fdr_oracle >= 0.0);
        CHECK(row.fdr_oracle <= 1.0);
    }
    CHECK(report.r_star == 5);
}

TEST_CASE("asymmetric experiments fill both sides") {
    ExperimentConfig config;
    config.noise = NoiseSpec::make(NoiseFamily::WishartFactor, 120, 240);
    config.signal = SignalSpec::make(SignalKind::well_separated, 4,
                                     bbp_upper_estimate(config.noise));
    config.repetitions = 5;
    config.k_max = 8;
    config.master_seed = 3;
    const ExperimentReport report = run_experiment(config);
    REQUIRE(report.rows_right.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].fdr_mc_mean >= 0.0);
        CHECK(report.rows[i].fdr_mc_mean <= 1.0);
        CHECK(report.rows_right[i].fdr_mc_mean >= 0.0);
        CHECK(report.rows_right[i].fdr_mc_mean <= 1.0);
    }
}

TEST_CASE("experiments are deterministic and schedule independent") {
    setenv("SPECTRAL_FDR_THREADS", "1", 1);
    const ExperimentReport serial = run_experiment(small_config(42));
    setenv("SPECTRAL_FDR_THREADS", "4", 1);
    const ExperimentReport threaded = run_experiment(small_config(42));
    unsetenv("SPECTRAL_FDR_THREADS");
    CHECK(reports_equal(serial, threaded));

    const ExperimentReport other = run_experiment(small_config(43));
    CHECK_FALSE(reports_equal(serial, other));
}

TEST_CASE("config validation") {
    ExperimentConfig config = small_config(1);
    config.repetitions = 0;
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
    config = small_config(1);
    config.k_max = 61;
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("observable_rank uses the closed-form law where it exists") {
    const NoiseSpec noise = NoiseSpec::make(NoiseFamily::Wigner, 500);
    // Entangled spectrum with the pilot-based upper estimate: exactly the
    // spikes strictly above 1 are observable under the semicircle law.
    const SignalSpec signal =
        SignalSpec::make(SignalKind::entangled, 20, bbp_upper_estimate(noise));
    int expected = 0;
    for (int i = 0; i < 20; ++i)
        if (signal.thetas[i] > 1.0) ++expected;
    CHECK(observable_rank(noise, signal) == expected);
}
