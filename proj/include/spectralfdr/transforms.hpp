#pragma once

#include <Eigen/Dense>

#include "spectralfdr/spectral.hpp"

namespace spectralfdr {

// The bulk: spectrum values with index > r_hat, i.e. the atoms of the
// empirical measure the plug-in transforms are built from.
struct BulkSpectrum {
    Eigen::VectorXd values;  // nonincreasing, length source_n − r_hat ≥ 1
    Eigen::Index source_n = 0;
    Eigen::Index source_m = 0;
    int r_hat = 0;

    Eigen::Index count() const { return values.size(); }
    double edge() const { return values[0]; }
};

BulkSpectrum make_bulk(const Spectrum& spec, int r_hat);

// A transform estimate (Ĝ, φ̂ or D̂) together with its derivative at `at`.
// Above the bulk: g > 0 and g_prime < 0. At an atom collision the pair is
// the one-sided limit (+∞, −∞).
struct TransformValue {
    double g = 0;
    double g_prime = 0;
    double at = 0;
};

enum class Side { left, right };

// |y − λ| below this counts as a collision with a bulk atom.
inline double collision_guard(double y) {
    return 1e-12 * std::max(1.0, std::abs(y));
}

// Plug-in Cauchy transform of the bulk:
//   Ĝ(y)  =  mean 1/(y − λⱼ),   Ĝ′(y) = −mean 1/(y − λⱼ)².
// y must not lie strictly inside the bulk (below the largest atom by more
// than the collision guard); atom collisions return the (+∞, −∞) limit.
TransformValue cauchy_estimate(const BulkSpectrum& bulk, double y);

// Plug-in φ-transform of a nonnegative (singular value) bulk:
//   φ̂(y;q) = q · mean y/(y² − σⱼ²) + (1−q)/y,
//   φ̂′(y;q) = −q · mean (y² + σⱼ²)/(y² − σⱼ²)² − (1−q)/y².
TransformValue phi_estimate(const BulkSpectrum& bulk, double y, double q);

// D̂(y) = φ̂(y;1) · φ̂(y;aspect) with the product-rule derivative.
TransformValue d_transform_estimate(const BulkSpectrum& bulk, double y,
                                    double aspect);

// Φ(y) = Ĝ(y)²/Ĝ′(y): continuous, nonincreasing, [−1, 0]-valued above the
// bulk. Collisions return −1, the continuous limit from above.
double ratio_symmetric(const BulkSpectrum& bulk, double y);

// Φ(y) = 2·D̂(y)·φ̂(y;q)/D̂′(y) with q = 1 (left) or q = aspect (right);
// same range and monotonicity as the symmetric ratio.
double ratio_asymmetric(const BulkSpectrum& bulk, double y, double aspect,
                        Side side);

}  // namespace spectralfdr
