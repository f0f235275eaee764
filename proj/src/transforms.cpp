#include "spectralfdr/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spectralfdr/errors.hpp"

namespace spectralfdr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kahan-compensated accumulator; the ratio lemmas are asserted exactly in the
// test suite, so the sums carry as little rounding noise as possible.
struct KahanSum {
    double sum = 0, carry = 0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void check_not_inside_bulk(const BulkSpectrum& bulk, double y) {
    if (bulk.count() < 1)
        throw std::invalid_argument("transforms: empty bulk");
    if (y < bulk.edge() - collision_guard(y))
        throw NumericalError("transforms: evaluation inside estimated bulk");
}

bool collides(const BulkSpectrum& bulk, double y) {
    const double guard = collision_guard(y);
    // Atoms are sorted nonincreasing; only those within the guard of y can
    // collide, and y is at or above the edge.
    for (Eigen::Index j = 0; j < bulk.count(); ++j) {
        const double d = y - bulk.values[j];
        if (d > guard) break;
        if (std::abs(d) <= guard) return true;
    }
    return false;
}

void check_phi_domain(const BulkSpectrum& bulk, double y, double q) {
    if (y <= 0)
        throw std::invalid_argument("transforms: φ requires y > 0");
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("transforms: q outside (0, 1]");
    check_not_inside_bulk(bulk, y);
}

}  // namespace

BulkSpectrum make_bulk(const Spectrum& spec, int r_hat) {
    const Eigen::Index n = spec.values.size();
    if (r_hat < 0 || r_hat >= n)
        throw std::invalid_argument("make_bulk: rank estimate must satisfy 0 <= r_hat < n");
    BulkSpectrum bulk;
    bulk.values = spec.values.tail(n - r_hat);
    bulk.source_n = spec.n;
    bulk.source_m = spec.m;
    bulk.r_hat = r_hat;
    return bulk;
}

TransformValue cauchy_estimate(const BulkSpectrum& bulk, double y) {
    check_not_inside_bulk(bulk, y);
    if (collides(bulk, y)) return {kInf, -kInf, y};
    KahanSum s1, s2;
    for (Eigen::Index j = 0; j < bulk.count(); ++j) {
        const double inv = 1.0 / (y - bulk.values[j]);
        s1.add(inv);
        s2.add(inv * inv);
    }
    const double count = static_cast<double>(bulk.count());
    return {s1.sum / count, -s2.sum / count, y};
}

TransformValue phi_estimate(const BulkSpectrum& bulk, double y, double q) {
    check_phi_domain(bulk, y, q);
    if (collides(bulk, y)) return {kInf, -kInf, y};
    KahanSum s1, s2;
    for (Eigen::Index j = 0; j < bulk.count(); ++j) {
        const double t = bulk.values[j];
        const double denom = (y - t) * (y + t);  // y² − t², factored for accuracy
        s1.add(y / denom);
        s2.add((y * y + t * t) / (denom * denom));
    }
    const double count = static_cast<double>(bulk.count());
    TransformValue v;
    v.at = y;
    v.g = q * s1.sum / count + (1.0 - q) / y;
    v.g_prime = -q * s2.sum / count - (1.0 - q) / (y * y);
    return v;
}

TransformValue d_transform_estimate(const BulkSpectrum& bulk, double y,
                                    double aspect) {
    if (!(aspect > 0.0 && aspect <= 1.0))
        throw std::invalid_argument("transforms: aspect outside (0, 1]");
    const TransformValue phi1 = phi_estimate(bulk, y, 1.0);
    const TransformValue phia = phi_estimate(bulk, y, aspect);
    TransformValue v;
    v.at = y;
    v.g = phi1.g * phia.g;
    v.g_prime = phi1.g_prime * phia.g + phi1.g * phia.g_prime;
    return v;
}

double ratio_symmetric(const BulkSpectrum& bulk, double y) {
    check_not_inside_bulk(bulk, y);
    if (collides(bulk, y)) return -1.0;
    const TransformValue c = cauchy_estimate(bulk, y);
    // In exact arithmetic Jensen's inequality puts G²/G′ in [−1, 0]; the
    // clamp removes last-ulp rounding only.
    return std::clamp(c.g * c.g / c.g_prime, -1.0, 0.0);
}

double ratio_asymmetric(const BulkSpectrum& bulk, double y, double aspect,
                        Side side) {
    if (!(aspect > 0.0 && aspect <= 1.0))
        throw std::invalid_argument("transforms: aspect outside (0, 1]");
    check_phi_domain(bulk, y, 1.0);
    if (collides(bulk, y)) return -1.0;
    const TransformValue phi1 = phi_estimate(bulk, y, 1.0);
    const TransformValue phia = phi_estimate(bulk, y, aspect);
    const double d = phi1.g * phia.g;
    const double d_prime = phi1.g_prime * phia.g + phi1.g * phia.g_prime;
    const double side_g = side == Side::left ? phi1.g : phia.g;
    return std::clamp(2.0 * d * side_g / d_prime, -1.0, 0.0);
}

}  // namespace spectralfdr
