#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "spectralfdr/ensembles.hpp"
#include "spectralfdr/oracle.hpp"

using namespace spectralfdr;

namespace {

// One-sample Kolmogorov-Smirnov distance against a reference CDF.
double ks_distance(Eigen::VectorXd values, const std::function<double(double)>& cdf) {
    std::sort(values.data(), values.data() + values.size());
    const double n = static_cast<double>(values.size());
    double d = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max(d, std::abs(f - (i + 1) / n));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

double semicircle_cdf(double t) {
    if (t <= -2) return 0;
    if (t >= 2) return 1;
    return 0.5 + t * std::sqrt(4 - t * t) / (4 * M_PI) + std::asin(t / 2) / M_PI;
}

}  // namespace

TEST_CASE("family parsing and symmetry flags") {
    CHECK(parse_family("wigner") == NoiseFamily::Wigner);
    CHECK(parse_family("wishart-factor") == NoiseFamily::WishartFactor);
    CHECK_THROWS_AS(parse_family("cauchy"), std::invalid_argument);
    CHECK(family_is_symmetric(NoiseFamily::Fisher));
    CHECK_FALSE(family_is_symmetric(NoiseFamily::UniformFactor));
    CHECK(parse_signal_kind("entangled") == SignalKind::entangled);
    CHECK_THROWS_AS(parse_signal_kind("mixed"), std::invalid_argument);
}

TEST_CASE("noise sampling is deterministic per (spec, seed)") {
    const NoiseSpec spec = NoiseSpec::make(NoiseFamily::Fisher, 40);
    const Eigen::MatrixXd a = sample_noise(spec, 7);
    const Eigen::MatrixXd b = sample_noise(spec, 7);
    const Eigen::MatrixXd c = sample_noise(spec, 8);
    CHECK(a == b);  // bitwise
    CHECK(a != c);
}

TEST_CASE("symmetric families return exactly symmetric matrices") {
    for (NoiseFamily family : {NoiseFamily::Wigner, NoiseFamily::Wishart,
                               NoiseFamily::Fisher, NoiseFamily::Uniform}) {
        const NoiseSpec spec = NoiseSpec::make(family, 60, 120);
        const Eigen::MatrixXd e = sample_noise(spec, 3);
        CHECK(e.rows() == 60);
        CHECK(e.cols() == 60);
        CHECK((e - e.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    for (NoiseFamily family : {NoiseFamily::WishartFactor, NoiseFamily::FisherFactor,
                               NoiseFamily::UniformFactor}) {
        const NoiseSpec spec = NoiseSpec::make(family, 40, 90);
        const Eigen::MatrixXd e = sample_noise(spec, 3);
        CHECK(e.rows() == 40);
        CHECK(e.cols() == 90);
    }
}

TEST_CASE("support edges match the limit laws") {
    // Wigner: semicircle on (−2, 2).
    const Spectrum wigner = symmetric_spectrum(
        sample_noise(NoiseSpec::make(NoiseFamily::Wigner, 1000), 5), Tolerances{}, false);
    CHECK(wigner.values[0] >= 1.8);
    CHECK(wigner.values[0] <= 2.2);
    CHECK(wigner.values[999] >= -2.2);
    CHECK(wigner.values[999] <= -1.8);

    // Wishart aspect 1/4: Marchenko-Pastur on (0.25, 2.25).
    const Spectrum wishart = symmetric_spectrum(
        sample_noise(NoiseSpec::make(NoiseFamily::Wishart, 500, 2000), 5),
        Tolerances{}, false);
    CHECK(std::abs(wishart.values[0] - 2.25) <= 0.1);
    CHECK(std::abs(wishart.values[499] - 0.25) <= 0.1);

    // Wishart factor aspect 1/2: singular values on (1 − √ϑ, 1 + √ϑ).
    const Spectrum factor = singular_spectrum(
        sample_noise(NoiseSpec::make(NoiseFamily::WishartFactor, 500, 1000), 5),
        Tolerances{}, false);
    const double sq = std::sqrt(0.5);
    CHECK(std::abs(factor.values[0] - (1 + sq)) <= 0.1);
    CHECK(std::abs(factor.values[499] - (1 - sq)) <= 0.1);
}

TEST_CASE("empirical spectral distributions converge to the limit laws") {
    const Spectrum wigner = symmetric_spectrum(
        sample_noise(NoiseSpec::make(NoiseFamily::Wigner, 1000), 17), Tolerances{}, false);
    CHECK(ks_distance(wigner.values, semicircle_cdf) <= 0.05);

    const LimitLaw mp = LimitLaw::marchenko_pastur(0.25);
    const Spectrum wishart = symmetric_spectrum(
        sample_noise(NoiseSpec::make(NoiseFamily::Wishart, 500, 2000), 17),
        Tolerances{}, false);
    CHECK(ks_distance(wishart.values, [&](double t) { return mp.cdf(t); }) <= 0.05);
}

TEST_CASE("signal spectra") {
    const SignalSpec well = SignalSpec::make(SignalKind::well_separated, 20, 1.0);
    CHECK(well.thetas[0] == doctest::Approx(12.0).epsilon(1e-12));
    for (int i = 1; i < 20; ++i) CHECK(well.thetas[i] < well.thetas[i - 1]);
    CHECK(well.thetas[19] > 0);

    // The entangled shift cancels the i = 10 geometric term exactly.
    const SignalSpec entangled = SignalSpec::make(SignalKind::entangled, 20, 1.0);
    CHECK(entangled.thetas[9] == doctest::Approx(1.0).epsilon(1e-12));

    const SignalSpec barely = SignalSpec::make(SignalKind::barely_separated, 1, 1.0);
    CHECK(barely.thetas[0] == doctest::Approx(11.0).epsilon(1e-12));

    SignalSpec bad;
    bad.r = 20;
    bad.kind = SignalKind::entangled;
    bad.bbp_estimate = 0.1;
    bad.shift = signal_shift(SignalKind::entangled);
    CHECK_THROWS_AS(signal_spectrum(bad), std::invalid_argument);
}

TEST_CASE("sample_instance invariants") {
    const NoiseSpec noise = NoiseSpec::make(NoiseFamily::Wigner, 80);
    SignalSpec signal = SignalSpec::make(SignalKind::well_separated, 4, 1.0);

    const EnsembleInstance inst = sample_instance(noise, signal, 21);
    CHECK(inst.X == inst.A + inst.E);  // exact by construction
    const Eigen::MatrixXd gram =
        inst.signal_left_basis.transpose() * inst.signal_left_basis;
    CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
    // Signal spectrum of A equals the requested thetas.
    const Spectrum a_spec = symmetric_spectrum(inst.A, Tolerances{}, false);
    for (int i = 0; i < 4; ++i)
        CHECK(a_spec.values[i] == doctest::Approx(signal.thetas[i]).epsilon(1e-10));
    CHECK(std::abs(a_spec.values[4]) <= 1e-10);

    // Noiseless override: X = A exactly, eigenvalues are the thetas.
    SignalSpec single;
    single.r = 1;
    single.kind = SignalKind::well_separated;
    single.bbp_estimate = 1.0;
    single.shift = 0.0;
    single.thetas = Eigen::VectorXd::Constant(1, 5.0);
    const EnsembleInstance clean = sample_instance(noise, single, 22, 0.0);
    CHECK(clean.X == clean.A);
    const Spectrum clean_spec = symmetric_spectrum(clean.X, Tolerances{}, false);
    CHECK(clean_spec.values[0] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(clean_spec.values[1]) <= 1e-12);

    // Rectangular instances carry both bases.
    const NoiseSpec rect = NoiseSpec::make(NoiseFamily::WishartFactor, 60, 120);
    const EnsembleInstance wide = sample_instance(rect, signal, 23);
    REQUIRE(wide.signal_right_basis.has_value());
    CHECK(wide.signal_right_basis->rows() == 120);
    CHECK(wide.X.rows() == 60);
    CHECK(wide.X.cols() == 120);
}

TEST_CASE("spiked Wigner outlier lands at the BBP location") {
    const NoiseSpec noise = NoiseSpec::make(NoiseFamily::Wigner, 2000);
    SignalSpec signal;
    signal.r = 1;
    signal.kind = SignalKind::well_separated;
    signal.bbp_estimate = 1.0;
    signal.shift = 0.0;
    signal.thetas = Eigen::VectorXd::Constant(1, 2.0);
    const EnsembleInstance inst = sample_instance(noise, signal, 1010);
    const Spectrum spec = symmetric_spectrum(inst.X, Tolerances{}, false);
    CHECK(std::abs(spec.values[0] - 2.5) <= 0.1);  // ρ = θ + 1/θ
}

TEST_CASE("top-eigenvector overlap law is orthogonally invariant") {
    const Eigen::Index n = 100;
    const NoiseSpec spec = NoiseSpec::make(NoiseFamily::Wigner, n);
    PhiloxRng qrng(31);
    const Eigen::MatrixXd q = haar_frame(n, n, qrng);
    Eigen::VectorXd probe = Eigen::VectorXd::Zero(n);
    probe[0] = 1.0;

    std::vector<double> plain, conjugated;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Eigen::MatrixXd e = sample_noise(spec, seed);
        const Spectrum s = symmetric_spectrum(e);
        plain.push_back(projection_overlap(probe, s.left_basis->col(0)));
        const Eigen::MatrixXd rotated = q * e * q.transpose();
        const Spectrum sr = symmetric_spectrum(symmetrize(rotated));
        conjugated.push_back(projection_overlap(probe, sr.left_basis->col(0)));
    }
    // Two-sample KS at level 0.01: c(0.01)·√(2/200) with c = 1.628.
    CHECK(ks_two_sample(plain, conjugated) <= 1.628 * std::sqrt(2.0 / 200.0));
}

TEST_CASE("bbp_upper_estimate overshoots the true transition point") {
    const double wigner = bbp_upper_estimate(NoiseSpec::make(NoiseFamily::Wigner, 1000));
    CHECK(wigner > 1.0);
    CHECK(wigner < 2.2);
    CHECK(wigner ==
          bbp_upper_estimate(NoiseSpec::make(NoiseFamily::Wigner, 1000)));  // deterministic

    const double wf =
        bbp_upper_estimate(NoiseSpec::make(NoiseFamily::WishartFactor, 500, 1000));
    CHECK(wf > std::pow(0.5, 0.25));
    CHECK(wf < 1.6);

    const double wishart =
        bbp_upper_estimate(NoiseSpec::make(NoiseFamily::Wishart, 500, 2000));
    CHECK(wishart > 0.75);
    CHECK(wishart < 1.8);
}

TEST_CASE("haar frames are orthonormal") {
    PhiloxRng rng(12);
    const Eigen::MatrixXd q = haar_frame(30, 7, rng);
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() <=
          1e-12);
}
