#include "spectralfdr/rank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectralfdr {

namespace {

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return (v[mid - 1] + hi) / 2.0;
}

}  // namespace

RankConfig default_threshold(const SpacingProfile& spacing, Eigen::Index n) {
    if (spacing.deltas.size() == 0)
        throw std::invalid_argument("default_threshold: empty spacing profile");
    std::vector<double> deltas(spacing.deltas.data(),
                               spacing.deltas.data() + spacing.deltas.size());
    const double med = median(std::move(deltas));
    RankConfig config;
    config.source = RankConfig::Source::default_heuristic;
    // Degenerate median (repeated values): fall back to the parameter-free
    // default p = 1. Factorizations of exactly-repeated values leave spacing
    // dust at the ulp level, so the check is relative to the largest gap.
    const double dust = 1e-12 * spacing.deltas.maxCoeff();
    if (med <= dust) {
        config.p = 1.0;
        config.degenerate_fallback = true;
        return config;
    }
    config.p = 0.6 * med * static_cast<double>(n);
    return config;
}

RankResult rank_estimate(const Spectrum& spec, const RankConfig& config) {
    const Eigen::Index n = spec.values.size();
    if (n < 4)
        throw std::invalid_argument("rank_estimate: need at least four spectrum values");
    if (!(config.p > 0))
        throw std::invalid_argument("rank_estimate: threshold constant must be positive");

    RankResult result;
    result.threshold = config.p / std::sqrt(static_cast<double>(n));
    const Eigen::Index half = n / 2;
    // Candidate j asserts a gap between positions j and j+1 (1-based), i.e.
    // Δ_{j+1} = values[j−1] − values[j] in 0-based storage.
    for (Eigen::Index j = 1; j <= half; ++j) {
        const double gap = spec.values[j - 1] - spec.values[j];
        if (gap > result.threshold)
            result.qualifying_indices.push_back(static_cast<int>(j));
    }
    result.r_hat = result.qualifying_indices.empty()
                       ? 0
                       : result.qualifying_indices.back();
    return result;
}

}  // namespace spectralfdr
