#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spectralfdr/transforms.hpp"

namespace spectralfdr {

// A limiting spectral measure with a density on a single interval [a, b]:
// the semicircle law, the Marchenko-Pastur law, the singular-value law of a
// Wishart factor, or a tabulated (piecewise-linear) density built from data.
class LimitLaw {
public:
    enum class Family { Semicircle, MarchenkoPastur, WishartFactor, Tabulated };

    static LimitLaw semicircle();
    static LimitLaw marchenko_pastur(double aspect);
    static LimitLaw wishart_factor(double aspect);
    // Piecewise-linear density through (t, f) pairs, renormalized to unit mass.
    static LimitLaw tabulated(std::vector<double> grid_t, std::vector<double> grid_f);
    // Histogram-based tabulated law from an observed spectrum.
    static LimitLaw from_sample(const Eigen::VectorXd& values, int bins = 64);

    Family family() const { return family_; }
    double aspect() const { return aspect_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    double density(double t) const;
    // Mass of [t, b]; complement of the CDF.
    double tail_mass(double t) const;
    double cdf(double t) const { return 1.0 - tail_mass(t); }

private:
    Family family_ = Family::Semicircle;
    double aspect_ = 1.0;
    double lo_ = -2.0, hi_ = 2.0;
    std::vector<double> grid_t_, grid_f_;
};

struct SpikeForecast {
    double theta = 0;
    double location = 0;      // limiting outlier position ρ, or the edge b
    double overlap = 0;       // limiting squared correlation, in [0, 1]
    bool above_threshold = false;
};

struct BbpThreshold {
    double threshold = 0;
    // False when the edge transform diverges (threshold reported as 0).
    bool edge_transform_finite = true;
};

enum class LawMode { eigen, singular };

// G(z) = ∫ (z−t)⁻¹ dμ(t) and its derivative, for z outside the support.
// Closed form for the semicircle; adaptive quadrature with the edge
// substitution t = b − u² otherwise.
TransformValue law_transform(const LimitLaw& law, double z);

// φ(z;q) and D(z) of a singular-value law (support in [0, ∞)).
TransformValue law_phi(const LimitLaw& law, double z, double q);
TransformValue law_d(const LimitLaw& law, double z);

// Detection threshold in θ: 1/G(b⁺) for eigen mode, D(b⁺)^{−1/2} for
// singular mode. A divergent edge transform reports threshold 0 with the
// flag cleared.
BbpThreshold bbp_threshold(const LimitLaw& law, LawMode mode);

// Limiting outlier location and squared eigenvector (or left singular
// vector) correlation for a spike of strength theta. θ exactly at the
// threshold counts as below.
SpikeForecast spike_forecast(const LimitLaw& law, double theta, LawMode mode);

// FDR^∞(k) = 1 + (1/k) Σ_{i ≤ min(k, r*)} Φ(ρᵢ) with r* the number of
// above-threshold spikes. Side selects φ(·;1) vs φ(·;aspect) in singular mode.
double fdr_infinity(const LimitLaw& law, const std::vector<double>& thetas,
                    int k, LawMode mode, Side side = Side::left);

// Typical location γᵢ of the i-th largest value: ∫_{γᵢ}^{b} f = i/n,
// solved by bisection to 1e-10 in mass.
double law_quantile(const LimitLaw& law, int i, int n);

}  // namespace spectralfdr
