#include "spectralfdr/fdr.hpp"

#include <algorithm>
#include <stdexcept>

namespace spectralfdr {

namespace {

void check_curve_args(const Spectrum& spec, int r_hat, int k_max) {
    const Eigen::Index n = spec.values.size();
    if (!spec.values.allFinite())
        throw std::invalid_argument("fdr_curve: non-finite spectrum values");
    if (r_hat < 0 || r_hat >= n)
        throw std::invalid_argument("fdr_curve: rank estimate must satisfy 0 <= r_hat < n");
    if (k_max < 1 || k_max > n)
        throw std::invalid_argument("fdr_curve: k_max must satisfy 1 <= k_max <= n");
}

// Assemble 1 + S_k/k from the per-spike ratios; estimates land in [0, 1]
// because each ratio is in [−1, 0].
Eigen::VectorXd accumulate_curve(const Eigen::VectorXd& ratios, int k_max) {
    Eigen::VectorXd estimates(k_max);
    double running = 0;
    for (int k = 1; k <= k_max; ++k) {
        if (k <= ratios.size()) running += ratios[k - 1];
        estimates[k - 1] = std::clamp(1.0 + running / k, 0.0, 1.0);
    }
    return estimates;
}

}  // namespace

FdrCurve fdr_curve_symmetric(const Spectrum& spec, int r_hat, int k_max) {
    if (spec.kind != SpectrumKind::eigen)
        throw std::invalid_argument("fdr_curve_symmetric: spectrum is not an eigen spectrum");
    check_curve_args(spec, r_hat, k_max);

    const BulkSpectrum bulk = make_bulk(spec, r_hat);
    const int spikes = std::min(r_hat, k_max);
    Eigen::VectorXd ratios(spikes);
    for (int i = 0; i < spikes; ++i)
        ratios[i] = ratio_symmetric(bulk, spec.values[i]);

    FdrCurve curve;
    curve.estimates = accumulate_curve(ratios, k_max);
    curve.r_hat = r_hat;
    curve.side = CurveSide::symmetric;
    curve.k_max = k_max;
    return curve;
}

FdrCurve fdr_curve_asymmetric(const Spectrum& spec, int r_hat, int k_max,
                              CurveSide side) {
    if (spec.kind != SpectrumKind::singular)
        throw std::invalid_argument("fdr_curve_asymmetric: spectrum is not a singular spectrum");
    if (side == CurveSide::symmetric)
        throw std::invalid_argument("fdr_curve_asymmetric: side must be left, right or both");
    check_curve_args(spec, r_hat, k_max);

    if (side == CurveSide::both) {
        FdrCurve left = fdr_curve_asymmetric(spec, r_hat, k_max, CurveSide::left);
        const FdrCurve right = fdr_curve_asymmetric(spec, r_hat, k_max, CurveSide::right);
        left.estimates = left.estimates.cwiseMax(right.estimates);
        left.side = CurveSide::both;
        return left;
    }

    const double aspect = spec.aspect();
    // "left"/"right" name the original orientation; a transposed spectrum
    // swaps which q the side maps to.
    const bool wants_left = (side == CurveSide::left) != spec.transposed;
    const Side transform_side = wants_left ? Side::left : Side::right;

    const BulkSpectrum bulk = make_bulk(spec, r_hat);
    const int spikes = std::min(r_hat, k_max);
    Eigen::VectorXd ratios(spikes);
    for (int i = 0; i < spikes; ++i)
        ratios[i] = ratio_asymmetric(bulk, spec.values[i], aspect, transform_side);

    FdrCurve curve;
    curve.estimates = accumulate_curve(ratios, k_max);
    curve.r_hat = r_hat;
    curve.side = side;
    curve.aspect = aspect;
    curve.k_max = k_max;
    return curve;
}

SelectionResult select_dimension(const FdrCurve& curve, double alpha,
                                 double p_used) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("select_dimension: alpha outside (0, 1)");
    if (curve.estimates.size() == 0)
        throw std::invalid_argument("select_dimension: empty curve");

    SelectionResult result;
    result.alpha = alpha;
    result.r_hat = curve.r_hat;
    result.p_used = p_used;
    for (int k = 1; k <= curve.estimates.size(); ++k)
        if (curve.at(k) <= alpha) result.k_hat = k;
    result.curve = curve;
    return result;
}

}  // namespace spectralfdr
