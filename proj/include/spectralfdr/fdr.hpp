#pragma once

#include <Eigen/Dense>

#include "spectralfdr/spectral.hpp"
#include "spectralfdr/transforms.hpp"

namespace spectralfdr {

enum class CurveSide { symmetric, left, right, both };

// Per-dimension FDR estimates FDR̂(k), k = 1..k_max, each in [0, 1] and
// nondecreasing in k away from atom collisions. For k > r_hat the curve is
// 1 + S/k with S = Σ_{i≤r̂} Φᵢ fixed, so it climbs back toward 1.
struct FdrCurve {
    Eigen::VectorXd estimates;  // estimates[k−1] = FDR̂(k)
    int r_hat = 0;
    CurveSide side = CurveSide::symmetric;
    double aspect = 1.0;  // n/m for singular spectra
    int k_max = 0;

    double at(int k) const { return estimates[k - 1]; }
};

// The selection k̂ = max{k | FDR̂(k) ≤ α} (inclusive at equality; 0 when no
// dimension qualifies) together with the curve that produced it.
struct SelectionResult {
    int k_hat = 0;
    double alpha = 0;
    FdrCurve curve;
    int r_hat = 0;
    double p_used = std::numeric_limits<double>::quiet_NaN();
};

// FDR̂(k) = 1 + (1/k) Σ_{i ≤ min(k, r̂)} Ĝ(λᵢ)²/Ĝ′(λᵢ) on an eigen spectrum,
// with the transforms built from the bulk split at r_hat.
FdrCurve fdr_curve_symmetric(const Spectrum& spec, int r_hat, int k_max);

// Singular-spectrum analog, FDR̂(k) = 1 + (1/k) Σ Φ_side(σᵢ) with Φ_side from
// the D/φ transforms; side = both is the pointwise max of left and right.
// `side` refers to the matrix's original orientation; the stored transposed
// flag is honored internally.
FdrCurve fdr_curve_asymmetric(const Spectrum& spec, int r_hat, int k_max,
                              CurveSide side);

SelectionResult select_dimension(
    const FdrCurve& curve, double alpha,
    double p_used = std::numeric_limits<double>::quiet_NaN());

// CLI default: keeps reports compact while covering twice the rank estimate.
inline int default_k_max(Eigen::Index n, int r_hat) {
    return static_cast<int>(
        std::min<Eigen::Index>(n, 2 * std::max(r_hat, 1) + 10));
}

}  // namespace spectralfdr
