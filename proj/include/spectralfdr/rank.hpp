#pragma once

#include <vector>

#include "spectralfdr/spectral.hpp"

namespace spectralfdr {

// Threshold constant p for the spacing test Δ_{j+1} > p · n^{−1/2}.
struct RankConfig {
    enum class Source { user, default_heuristic };
    double p = 1.0;
    Source source = Source::user;
    // Set when the data-driven heuristic degenerated (median spacing zero)
    // and the value fell back to p = 1.
    bool degenerate_fallback = false;
};

struct RankResult {
    int r_hat = 0;
    double threshold = 0;                 // the evaluated cutoff p · n^{−1/2}
    std::vector<int> qualifying_indices;  // {j ≤ ⌊n/2⌋ | Δ_{j+1} > threshold}
};

// Data-driven threshold constant p = (3/5) · median({Δⱼ}) · n. A zero median
// (exactly repeated values) falls back to p = 1 with the flag set.
RankConfig default_threshold(const SpacingProfile& spacing, Eigen::Index n);

// Spacing-threshold rank estimate: the largest j ≤ ⌊n/2⌋ whose trailing gap
// Δ_{j+1} = values[j] − values[j+1] (1-based) exceeds p · n^{−1/2}, or 0 when
// no gap qualifies. n is the number of stored spectrum values.
RankResult rank_estimate(const Spectrum& spec, const RankConfig& config);

}  // namespace spectralfdr
