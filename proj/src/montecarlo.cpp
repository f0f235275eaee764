#include "spectralfdr/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "spectralfdr/oracle.hpp"
#include "spectralfdr/rank.hpp"

namespace spectralfdr {

int worker_thread_count() {
    if (const char* env = std::getenv("SPECTRAL_FDR_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Cumulative overlap t_k = Σ_{j≤k} ‖basisᵀ ûⱼ‖² for the leading k_max
// estimated directions; fdr[k−1] = (k − t_k)/k. rows limits the signal basis
// to its first `rows` columns (the r*-variant).
Eigen::VectorXd truth_curve(const Eigen::MatrixXd& signal_basis,
                            const Eigen::MatrixXd& estimated_basis, int k_max,
                            Eigen::Index cols) {
    const Eigen::MatrixXd overlap =
        signal_basis.leftCols(cols).transpose() * estimated_basis.leftCols(k_max);
    Eigen::VectorXd fdr(k_max);
    double t_k = 0;
    for (int k = 1; k <= k_max; ++k) {
        t_k += overlap.col(k - 1).squaredNorm();
        fdr[k - 1] = std::clamp((k - t_k) / k, 0.0, 1.0);
    }
    return fdr;
}

struct TrialRecord {
    Eigen::VectorXd estimate_left, estimate_right;
    Eigen::VectorXd mc_left, mc_right;
    Eigen::VectorXd mc_left_rstar, mc_right_rstar;
    int r_hat = 0;
    double p_used = 0;
    int k_hat = 0;
};

std::optional<LimitLaw> closed_form_law(const NoiseSpec& noise) {
    switch (noise.family) {
        case NoiseFamily::Wigner:
            return LimitLaw::semicircle();
        case NoiseFamily::Wishart:
            return LimitLaw::marchenko_pastur(static_cast<double>(noise.n) / noise.m);
        case NoiseFamily::WishartFactor:
            return LimitLaw::wishart_factor(static_cast<double>(noise.n) / noise.m);
        default:
            return std::nullopt;
    }
}

}  // namespace

int observable_rank(const NoiseSpec& noise, const SignalSpec& signal) {
    double threshold = signal.bbp_estimate;
    if (const auto law = closed_form_law(noise)) {
        const LawMode mode = family_is_symmetric(noise.family) ? LawMode::eigen
                                                               : LawMode::singular;
        threshold = bbp_threshold(*law, mode).threshold;
    }
    int r_star = 0;
    for (Eigen::Index i = 0; i < signal.thetas.size(); ++i)
        if (signal.thetas[i] > threshold) ++r_star;
    return r_star;
}

TrueFdrSequences true_fdr_trial(const EnsembleInstance& instance, int k_max) {
    if (instance.signal_left_basis.size() == 0)
        throw std::invalid_argument("true_fdr_trial: instance carries no signal basis");
    const bool symmetric = !instance.signal_right_basis.has_value();
    const Spectrum spec = symmetric ? symmetric_spectrum(instance.X)
                                    : singular_spectrum(instance.X);
    if (k_max < 1 || k_max > spec.values.size())
        throw std::invalid_argument("true_fdr_trial: k_max out of range");
    TrueFdrSequences seq;
    const Eigen::Index r = instance.thetas.size();
    seq.left = truth_curve(instance.signal_left_basis, *spec.left_basis, k_max, r);
    if (!symmetric)
        seq.right = truth_curve(*instance.signal_right_basis, *spec.right_basis,
                                k_max, r);
    return seq;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    if (config.repetitions < 1)
        throw std::invalid_argument("run_experiment: repetitions must be at least 1");
    const bool symmetric = family_is_symmetric(config.noise.family);
    const int k_max =
        config.k_max > 0 ? config.k_max : 2 * std::max(config.signal.r, 1);
    if (k_max > config.noise.n)
        throw std::invalid_argument("run_experiment: k_max exceeds the dimension");
    pin_blas_threads();

    const int r_star = observable_rank(config.noise, config.signal);
    const int reps = config.repetitions;
    std::vector<TrialRecord> trials(static_cast<std::size_t>(reps));

    parallel_for(reps, worker_thread_count(), [&](int trial) {
        TrialRecord& rec = trials[static_cast<std::size_t>(trial)];
        PhiloxRng rng(config.master_seed, static_cast<std::uint64_t>(trial));
        const EnsembleInstance instance =
            sample_instance(config.noise, config.signal, rng, config.noise_scale);
        const Spectrum spec =
            symmetric
                ? symmetric_spectrum(instance.X, Tolerances{}, config.compute.mc_truth)
                : singular_spectrum(instance.X, Tolerances{}, config.compute.mc_truth);

        RankConfig rank_config;
        if (config.p) {
            rank_config.p = *config.p;
            rank_config.source = RankConfig::Source::user;
        } else {
            rank_config = default_threshold(spacings(spec), spec.values.size());
        }
        const RankResult rank = rank_estimate(spec, rank_config);
        rec.r_hat = rank.r_hat;
        rec.p_used = rank_config.p;

        if (config.compute.estimate) {
            if (symmetric) {
                const FdrCurve curve = fdr_curve_symmetric(spec, rank.r_hat, k_max);
                rec.estimate_left = curve.estimates;
                rec.k_hat = select_dimension(curve, config.alpha, rank_config.p).k_hat;
            } else {
                const FdrCurve left =
                    fdr_curve_asymmetric(spec, rank.r_hat, k_max, CurveSide::left);
                const FdrCurve right =
                    fdr_curve_asymmetric(spec, rank.r_hat, k_max, CurveSide::right);
                rec.estimate_left = left.estimates;
                rec.estimate_right = right.estimates;
                // Selection controls both sides simultaneously (max rule).
                FdrCurve both = left;
                both.estimates = left.estimates.cwiseMax(right.estimates);
                both.side = CurveSide::both;
                rec.k_hat = select_dimension(both, config.alpha, rank_config.p).k_hat;
            }
        }

        if (config.compute.mc_truth) {
            const Eigen::Index r = instance.thetas.size();
            rec.mc_left = truth_curve(instance.signal_left_basis, *spec.left_basis,
                                      k_max, r);
            rec.mc_left_rstar = truth_curve(instance.signal_left_basis,
                                            *spec.left_basis, k_max, r_star);
            if (!symmetric) {
                rec.mc_right = truth_curve(*instance.signal_right_basis,
                                           *spec.right_basis, k_max, r);
                rec.mc_right_rstar = truth_curve(*instance.signal_right_basis,
                                                 *spec.right_basis, k_max, r_star);
            }
        }
    });

    ExperimentReport report;
    report.family = config.noise.family;
    report.signal_kind = config.signal.kind;
    report.n = config.noise.n;
    report.m = config.noise.m;
    report.r = config.signal.r;
    report.r_star = r_star;
    report.bbp_estimate = config.signal.bbp_estimate;
    report.repetitions = reps;
    report.k_max = k_max;
    report.alpha = config.alpha;
    report.master_seed = config.master_seed;
    report.rank_estimates.reserve(static_cast<std::size_t>(reps));
    report.p_values.reserve(static_cast<std::size_t>(reps));
    for (const TrialRecord& rec : trials) {
        report.rank_estimates.push_back(rec.r_hat);
        report.p_values.push_back(rec.p_used);
        if (config.compute.estimate) ++report.k_hat_distribution[rec.k_hat];
    }

    std::optional<LimitLaw> oracle_law;
    if (config.compute.oracle) {
        oracle_law = closed_form_law(config.noise);
        if (!oracle_law) {
            // No closed form: tabulate an empirical law from a pilot sample.
            const Eigen::MatrixXd pilot =
                sample_noise(config.noise, PhiloxRng(0x70696C6F74ULL,
                                                     static_cast<std::uint64_t>(
                                                         config.noise.family)));
            const Spectrum pilot_spec =
                symmetric
                    ? symmetric_spectrum(pilot, Tolerances{}, false)
                    : singular_spectrum(pilot, Tolerances{}, false);
            oracle_law = LimitLaw::from_sample(pilot_spec.values);
        }
    }
    const std::vector<double> thetas(config.signal.thetas.data(),
                                     config.signal.thetas.data() + config.signal.r);
    const LawMode mode = symmetric ? LawMode::eigen : LawMode::singular;

    auto build_rows = [&](bool right_side) {
        std::vector<ExperimentReport::Row> rows(static_cast<std::size_t>(k_max));
        for (int k = 1; k <= k_max; ++k) {
            ExperimentReport::Row& row = rows[static_cast<std::size_t>(k - 1)];
            row.k = k;
            double est_sum = 0, mc_sum = 0, mc_sq_sum = 0, rstar_sum = 0;
            for (const TrialRecord& rec : trials) {
                const Eigen::VectorXd& est =
                    right_side ? rec.estimate_right : rec.estimate_left;
                const Eigen::VectorXd& mc = right_side ? rec.mc_right : rec.mc_left;
                const Eigen::VectorXd& rstar =
                    right_side ? rec.mc_right_rstar : rec.mc_left_rstar;
                if (est.size() > 0) est_sum += est[k - 1];
                if (mc.size() > 0) {
                    mc_sum += mc[k - 1];
                    mc_sq_sum += mc[k - 1] * mc[k - 1];
                    rstar_sum += rstar[k - 1];
                }
            }
            row.fdr_estimate_mean = est_sum / reps;
            row.fdr_mc_mean = mc_sum / reps;
            row.fdr_mc_rstar_mean = rstar_sum / reps;
            row.fd_mc_mean = k * row.fdr_mc_mean;
            if (reps > 1) {
                const double var =
                    (mc_sq_sum - mc_sum * mc_sum / reps) / (reps - 1);
                row.fdr_mc_stderr = std::sqrt(std::max(var, 0.0) / reps);
            }
            if (oracle_law)
                row.fdr_oracle = fdr_infinity(*oracle_law, thetas, k, mode,
                                              right_side ? Side::right : Side::left);
        }
        return rows;
    };
    report.rows = build_rows(false);
    if (!symmetric) report.rows_right = build_rows(true);

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return report;
}

}  // namespace spectralfdr
