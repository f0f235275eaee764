#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "spectralfdr/ensembles.hpp"
#include "spectralfdr/errors.hpp"
#include "spectralfdr/transforms.hpp"

using namespace spectralfdr;

namespace {

BulkSpectrum bulk_of(std::initializer_list<double> atoms) {
    BulkSpectrum bulk;
    bulk.values = Eigen::Map<const Eigen::VectorXd>(std::data(atoms),
                                                    static_cast<Eigen::Index>(atoms.size()));
    bulk.source_n = bulk.values.size();
    bulk.source_m = bulk.values.size();
    bulk.r_hat = 0;
    return bulk;
}

// One shared GOE spectrum for the semicircle-limit checks.
const Eigen::VectorXd& goe_2000_eigenvalues() {
    static const Eigen::VectorXd values = [] {
        const NoiseSpec spec = NoiseSpec::make(NoiseFamily::Wigner, 2000);
        const Eigen::MatrixXd e = sample_noise(spec, 1234);
        return symmetric_spectrum(e, Tolerances{}, false).values;
    }();
    return values;
}

BulkSpectrum goe_bulk() {
    BulkSpectrum bulk;
    bulk.values = goe_2000_eigenvalues();
    bulk.source_n = bulk.values.size();
    bulk.source_m = bulk.values.size();
    bulk.r_hat = 0;
    return bulk;
}

// Random bulks for the property tests: n atoms uniform on [lo, hi], sorted.
BulkSpectrum random_bulk(PhiloxRng& rng, Eigen::Index count, double lo, double hi) {
    Eigen::VectorXd atoms(count);
    for (Eigen::Index i = 0; i < count; ++i)
        atoms[i] = lo + (hi - lo) * rng.uniform01();
    std::sort(atoms.data(), atoms.data() + count, std::greater<double>());
    BulkSpectrum bulk;
    bulk.values = atoms;
    bulk.source_n = count;
    bulk.source_m = count;
    bulk.r_hat = 0;
    return bulk;
}

}  // namespace

TEST_CASE("cauchy_estimate hand values") {
    // Degenerate bulk at zero behaves like a single atom.
    const BulkSpectrum zeros = bulk_of({0, 0, 0});
    const TransformValue at2 = cauchy_estimate(zeros, 2.0);
    CHECK(at2.g == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(at2.g_prime == doctest::Approx(-0.25).epsilon(1e-14));

    const BulkSpectrum pm1 = bulk_of({1, -1});
    const TransformValue v = cauchy_estimate(pm1, 2.0);
    CHECK(v.g == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(v.g_prime == doctest::Approx(-5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("cauchy_estimate approaches the semicircle transform") {
    // Closed form: G(2.5) = 1/2, G'(2.5) = −1/3.
    const TransformValue v = cauchy_estimate(goe_bulk(), 2.5);
    CHECK(std::abs(v.g - 0.5) <= 0.02);
    CHECK(std::abs(v.g_prime - (-1.0 / 3.0)) <= 0.05);
}

TEST_CASE("cauchy_estimate domain errors") {
    const BulkSpectrum pm1 = bulk_of({1, -1});
    CHECK_THROWS_AS(cauchy_estimate(pm1, 0.0), NumericalError);
    CHECK_THROWS_AS(cauchy_estimate(pm1, 0.999), NumericalError);
    // At the edge atom itself: the collision limit, not an error.
    const TransformValue lim = cauchy_estimate(pm1, 1.0);
    CHECK(std::isinf(lim.g));
    CHECK(lim.g_prime < 0);
}

TEST_CASE("phi_estimate hand values") {
    const BulkSpectrum zeros = bulk_of({0, 0});
    const TransformValue z = phi_estimate(zeros, 2.0, 0.7);
    CHECK(z.g == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(z.g_prime == doctest::Approx(-0.25).epsilon(1e-14));

    const BulkSpectrum one = bulk_of({1});
    const TransformValue q1 = phi_estimate(one, 2.0, 1.0);
    CHECK(q1.g == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(q1.g_prime == doctest::Approx(-5.0 / 9.0).epsilon(1e-14));

    const TransformValue qhalf = phi_estimate(one, 2.0, 0.5);
    CHECK(qhalf.g == doctest::Approx(7.0 / 12.0).epsilon(1e-14));

    CHECK_THROWS_AS(phi_estimate(one, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(phi_estimate(one, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(phi_estimate(one, 2.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(phi_estimate(one, 0.5, 1.0), NumericalError);
}

TEST_CASE("d_transform hand values") {
    const BulkSpectrum zeros = bulk_of({0, 0});
    const TransformValue z = d_transform_estimate(zeros, 2.0, 0.3);
    CHECK(z.g == doctest::Approx(0.25).epsilon(1e-14));      // 1/y²
    CHECK(z.g_prime == doctest::Approx(-0.25).epsilon(1e-14));  // −2/y³

    const BulkSpectrum one = bulk_of({1});
    const TransformValue full = d_transform_estimate(one, 2.0, 1.0);
    CHECK(full.g == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(full.g_prime == doctest::Approx(-20.0 / 27.0).epsilon(1e-14));

    const TransformValue half = d_transform_estimate(one, 2.0, 0.5);
    CHECK(half.g == doctest::Approx(7.0 / 18.0).epsilon(1e-14));
}

TEST_CASE("ratio_symmetric hand values and collisions") {
    const BulkSpectrum zeros = bulk_of({0, 0, 0});
    CHECK(ratio_symmetric(zeros, 1.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ratio_symmetric(zeros, 17.0) == doctest::Approx(-1.0).epsilon(1e-14));

    const BulkSpectrum pm1 = bulk_of({1, -1});
    CHECK(ratio_symmetric(pm1, 2.0) == doctest::Approx(-0.8).epsilon(1e-14));
    CHECK(ratio_symmetric(pm1, 1.0) == -1.0);  // collision rule

    CHECK(std::abs(ratio_symmetric(goe_bulk(), 2.5) - (-0.75)) <= 0.05);
}

TEST_CASE("ratio_asymmetric hand values") {
    const BulkSpectrum zeros = bulk_of({0, 0});
    CHECK(ratio_asymmetric(zeros, 3.0, 0.5, Side::left) ==
          doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ratio_asymmetric(zeros, 3.0, 0.5, Side::right) ==
          doctest::Approx(-1.0).epsilon(1e-14));

    const BulkSpectrum one = bulk_of({1});
    CHECK(ratio_asymmetric(one, 2.0, 1.0, Side::left) ==
          doctest::Approx(-0.8).epsilon(1e-14));
    // Large-y limit goes to −1.
    CHECK(std::abs(ratio_asymmetric(one, 100.0, 1.0, Side::left) - (-1.0)) <= 1e-3);
    CHECK(ratio_asymmetric(one, 1.0, 1.0, Side::left) == -1.0);  // collision
}

TEST_CASE("ratio functions: range and monotonicity over random bulks") {
    PhiloxRng rng(2024);
    for (int rep = 0; rep < 60; ++rep) {
        const Eigen::Index count = 50 + static_cast<Eigen::Index>(rng.uniform01() * 450);
        const bool signed_bulk = rep % 2 == 0;
        const BulkSpectrum bulk =
            signed_bulk ? random_bulk(rng, count, -1.5, 1.5)
                        : random_bulk(rng, count, 0.0, 2.0);
        const double edge = bulk.edge();
        const double aspect = 0.25 + 0.75 * rng.uniform01();

        double prev_sym = 0.0, prev_left = 0.0, prev_right = 0.0;
        for (int g = 0; g < 50; ++g) {
            const double y = edge + 1e-6 + 0.12 * g;
            const double sym = ratio_symmetric(bulk, y);
            CHECK(sym >= -1.0);
            CHECK(sym <= 0.0);
            if (g > 0) CHECK(sym <= prev_sym);
            prev_sym = sym;
            if (!signed_bulk) {
                const double left = ratio_asymmetric(bulk, y, aspect, Side::left);
                const double right = ratio_asymmetric(bulk, y, aspect, Side::right);
                CHECK(left >= -1.0);
                CHECK(left <= 0.0);
                CHECK(right >= -1.0);
                CHECK(right <= 0.0);
                if (g > 0) {
                    CHECK(left <= prev_left);
                    CHECK(right <= prev_right);
                }
                prev_left = left;
                prev_right = right;
            }
        }
    }
}

TEST_CASE("derivatives agree with central finite differences") {
    PhiloxRng rng(555);
    const double h = 1e-5;
    for (int rep = 0; rep < 40; ++rep) {
        const BulkSpectrum bulk = random_bulk(rng, 200, 0.0, 2.0);
        const double y = bulk.edge() + 0.5 + 2.0 * rng.uniform01();
        const double q = 0.3 + 0.7 * rng.uniform01();
        const double aspect = 0.3 + 0.7 * rng.uniform01();

        const TransformValue c = cauchy_estimate(bulk, y);
        const double c_fd =
            (cauchy_estimate(bulk, y + h).g - cauchy_estimate(bulk, y - h).g) / (2 * h);
        CHECK(c.g_prime == doctest::Approx(c_fd).epsilon(1e-4));

        const TransformValue p = phi_estimate(bulk, y, q);
        const double p_fd =
            (phi_estimate(bulk, y + h, q).g - phi_estimate(bulk, y - h, q).g) / (2 * h);
        CHECK(p.g_prime == doctest::Approx(p_fd).epsilon(1e-4));

        const TransformValue d = d_transform_estimate(bulk, y, aspect);
        const double d_fd = (d_transform_estimate(bulk, y + h, aspect).g -
                             d_transform_estimate(bulk, y - h, aspect).g) /
                            (2 * h);
        CHECK(d.g_prime == doctest::Approx(d_fd).epsilon(1e-4));
    }
}

TEST_CASE("phi(y;1) equals the odd part of the symmetrized Cauchy estimate") {
    PhiloxRng rng(808);
    for (int rep = 0; rep < 20; ++rep) {
        const BulkSpectrum bulk = random_bulk(rng, 150, 0.0, 3.0);
        const double y = bulk.edge() + 0.2 + 2.0 * rng.uniform01();
        const double phi = phi_estimate(bulk, y, 1.0).g;
        // Direct evaluation over the symmetrized atom set {±σⱼ}.
        double sum = 0;
        for (Eigen::Index j = 0; j < bulk.count(); ++j)
            sum += 1.0 / (y - bulk.values[j]) + 1.0 / (y + bulk.values[j]);
        const double g_sym = sum / (2.0 * bulk.count());
        CHECK(phi == doctest::Approx(g_sym).epsilon(1e-10));
    }
}

TEST_CASE("make_bulk splits at the rank estimate") {
    Spectrum spec;
    spec.values = Eigen::Vector4d(9, 5, 2, 1);
    spec.n = spec.m = 4;
    const BulkSpectrum bulk = make_bulk(spec, 2);
    CHECK(bulk.count() == 2);
    CHECK(bulk.edge() == 2.0);
    CHECK(bulk.r_hat == 2);
    CHECK_THROWS_AS(make_bulk(spec, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_bulk(spec, -1), std::invalid_argument);
}
