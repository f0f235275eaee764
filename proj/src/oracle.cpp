#include "spectralfdr/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "spectralfdr/errors.hpp"

namespace spectralfdr {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr int kQuadDepth = 15;
constexpr double kQuadTol = 1e-11;

double positive_part(double x) { return x > 0 ? x : 0.0; }

}  // namespace

LimitLaw LimitLaw::semicircle() {
    LimitLaw law;
    law.family_ = Family::Semicircle;
    law.lo_ = -2.0;
    law.hi_ = 2.0;
    return law;
}

LimitLaw LimitLaw::marchenko_pastur(double aspect) {
    if (!(aspect > 0.0 && aspect <= 1.0))
        throw std::invalid_argument("marchenko_pastur: aspect outside (0, 1]");
    LimitLaw law;
    law.family_ = Family::MarchenkoPastur;
    law.aspect_ = aspect;
    law.lo_ = (1.0 - std::sqrt(aspect)) * (1.0 - std::sqrt(aspect));
    law.hi_ = (1.0 + std::sqrt(aspect)) * (1.0 + std::sqrt(aspect));
    return law;
}

LimitLaw LimitLaw::wishart_factor(double aspect) {
    LimitLaw law = marchenko_pastur(aspect);
    law.family_ = Family::WishartFactor;
    law.lo_ = 1.0 - std::sqrt(aspect);
    law.hi_ = 1.0 + std::sqrt(aspect);
    return law;
}

LimitLaw LimitLaw::tabulated(std::vector<double> grid_t, std::vector<double> grid_f) {
    if (grid_t.size() != grid_f.size() || grid_t.size() < 2)
        throw std::invalid_argument("tabulated: need at least two (t, density) pairs");
    for (std::size_t i = 1; i < grid_t.size(); ++i)
        if (grid_t[i] <= grid_t[i - 1])
            throw std::invalid_argument("tabulated: grid must be strictly increasing");
    for (double f : grid_f)
        if (f < 0) throw std::invalid_argument("tabulated: negative density");

    double mass = 0;
    for (std::size_t i = 1; i < grid_t.size(); ++i)
        mass += 0.5 * (grid_f[i] + grid_f[i - 1]) * (grid_t[i] - grid_t[i - 1]);
    if (mass <= 0) throw std::invalid_argument("tabulated: zero total mass");
    for (double& f : grid_f) f /= mass;

    LimitLaw law;
    law.family_ = Family::Tabulated;
    law.lo_ = grid_t.front();
    law.hi_ = grid_t.back();
    law.grid_t_ = std::move(grid_t);
    law.grid_f_ = std::move(grid_f);
    return law;
}

LimitLaw LimitLaw::from_sample(const Eigen::VectorXd& values, int bins) {
    if (values.size() < 2)
        throw std::invalid_argument("from_sample: need at least two values");
    if (bins < 2) throw std::invalid_argument("from_sample: need at least two bins");
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    if (!(hi > lo)) throw std::invalid_argument("from_sample: degenerate sample");
    const double width = (hi - lo) / bins;
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        int b = static_cast<int>((values[i] - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    std::vector<double> grid_t, grid_f;
    grid_t.reserve(static_cast<std::size_t>(bins) + 2);
    grid_f.reserve(static_cast<std::size_t>(bins) + 2);
    grid_t.push_back(lo);
    grid_f.push_back(0.0);
    const double norm = static_cast<double>(values.size()) * width;
    for (int b = 0; b < bins; ++b) {
        grid_t.push_back(lo + (b + 0.5) * width);
        grid_f.push_back(counts[static_cast<std::size_t>(b)] / norm);
    }
    grid_t.push_back(hi);
    grid_f.push_back(0.0);
    return tabulated(std::move(grid_t), std::move(grid_f));
}

double LimitLaw::density(double t) const {
    if (t < lo_ || t > hi_) return 0.0;
    switch (family_) {
        case Family::Semicircle:
            return std::sqrt(positive_part(4.0 - t * t)) / (2.0 * kPi);
        case Family::MarchenkoPastur:
            if (t <= 0) return 0.0;
            return std::sqrt(positive_part((hi_ - t) * (t - lo_))) /
                   (2.0 * kPi * aspect_ * t);
        case Family::WishartFactor: {
            if (t <= 0) return 0.0;
            const double s = t * t;
            const double c_lo = lo_ * lo_, c_hi = hi_ * hi_;
            return std::sqrt(positive_part((c_hi - s) * (s - c_lo))) /
                   (kPi * aspect_ * t);
        }
        case Family::Tabulated: {
            const auto it = std::upper_bound(grid_t_.begin(), grid_t_.end(), t);
            if (it == grid_t_.begin()) return grid_f_.front();
            if (it == grid_t_.end()) return grid_f_.back();
            const std::size_t i = static_cast<std::size_t>(it - grid_t_.begin());
            const double w = (t - grid_t_[i - 1]) / (grid_t_[i] - grid_t_[i - 1]);
            return (1.0 - w) * grid_f_[i - 1] + w * grid_f_[i];
        }
    }
    return 0.0;
}

namespace {

// ∫ f(t)·w(t) dt over [from, hi] with the substitution t = hi − u² applied on
// the upper half (and t = lo + u² on the lower half when from == lo), so the
// √-vanishing edges integrate cleanly.
double integrate_weighted(const LimitLaw& law, double from,
                          const std::function<double(double)>& w,
                          double* err_out = nullptr) {
    const double lo = std::max(from, law.support_lo());
    const double hi = law.support_hi();
    if (lo >= hi) return 0.0;
    const double mid = 0.5 * (lo + hi);
    double total_err = 0;

    auto upper = [&](double u) {
        const double t = hi - u * u;
        return 2.0 * u * law.density(t) * w(t);
    };
    double err = 0;
    double result = Quadrature::integrate(upper, 0.0, std::sqrt(hi - mid),
                                          kQuadDepth, kQuadTol, &err);
    total_err += err;

    if (lo == law.support_lo()) {
        auto lower = [&](double u) {
            const double t = lo + u * u;
            return 2.0 * u * law.density(t) * w(t);
        };
        result += Quadrature::integrate(lower, 0.0, std::sqrt(mid - lo),
                                        kQuadDepth, kQuadTol, &err);
    } else {
        auto plain = [&](double t) { return law.density(t) * w(t); };
        result += Quadrature::integrate(plain, lo, mid, kQuadDepth, kQuadTol, &err);
    }
    total_err += err;
    if (err_out) *err_out = total_err;
    return result;
}

void require_outside_support(const LimitLaw& law, double z) {
    if (z >= law.support_lo() && z <= law.support_hi())
        throw NumericalError("oracle: evaluation inside the support of the law");
}

// G(z) for z above the support, defined at z == b as the edge limit G(b⁺).
double law_cauchy_g(const LimitLaw& law, double z, double* err_out = nullptr) {
    if (law.family() == LimitLaw::Family::Semicircle && z >= 2.0)
        return (z - std::sqrt(z * z - 4.0)) / 2.0;
    if (law.family() == LimitLaw::Family::Semicircle && z <= -2.0)
        return (z + std::sqrt(z * z - 4.0)) / 2.0;
    return integrate_weighted(
        law, law.support_lo(), [&](double t) { return 1.0 / (z - t); }, err_out);
}

double law_cauchy_gprime(const LimitLaw& law, double z) {
    if (law.family() == LimitLaw::Family::Semicircle) {
        const double root = std::sqrt(z * z - 4.0);
        return (1.0 - std::abs(z) / root) / 2.0;
    }
    return -integrate_weighted(law, law.support_lo(), [&](double t) {
        const double d = z - t;
        return 1.0 / (d * d);
    });
}

}  // namespace

TransformValue law_transform(const LimitLaw& law, double z) {
    require_outside_support(law, z);
    return {law_cauchy_g(law, z), law_cauchy_gprime(law, z), z};
}

TransformValue law_phi(const LimitLaw& law, double z, double q) {
    if (law.support_lo() < 0)
        throw std::invalid_argument("law_phi: law is not a singular-value law");
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("law_phi: q outside (0, 1]");
    if (z <= law.support_hi())
        throw NumericalError("law_phi: z must lie above the support");
    const double moment = integrate_weighted(
        law, law.support_lo(), [&](double t) { return z / (z * z - t * t); });
    const double dmoment = integrate_weighted(law, law.support_lo(), [&](double t) {
        const double d = z * z - t * t;
        return (z * z + t * t) / (d * d);
    });
    TransformValue v;
    v.at = z;
    v.g = q * moment + (1.0 - q) / z;
    v.g_prime = -q * dmoment - (1.0 - q) / (z * z);
    return v;
}

TransformValue law_d(const LimitLaw& law, double z) {
    const TransformValue phi1 = law_phi(law, z, 1.0);
    const TransformValue phia = law_phi(law, z, law.aspect());
    TransformValue v;
    v.at = z;
    v.g = phi1.g * phia.g;
    v.g_prime = phi1.g_prime * phia.g + phi1.g * phia.g_prime;
    return v;
}

BbpThreshold bbp_threshold(const LimitLaw& law, LawMode mode) {
    const double b = law.support_hi();
    if (mode == LawMode::eigen) {
        if (law.family() == LimitLaw::Family::Semicircle) return {1.0, true};
        double err = 0;
        const double g_edge = law_cauchy_g(law, b, &err);
        if (!std::isfinite(g_edge) || g_edge > 1e10 || err > 1e-3 * std::abs(g_edge))
            return {0.0, false};
        return {1.0 / g_edge, true};
    }
    // Singular mode: threshold = D(b⁺)^{−1/2}.
    if (law.support_lo() < 0)
        throw std::invalid_argument("bbp_threshold: singular mode needs a singular-value law");
    if (b <= 0) return {0.0, false};
    double err1 = 0;
    const double moment = integrate_weighted(
        law, law.support_lo(), [&](double t) { return b / (b * b - t * t); },
        &err1);
    if (!std::isfinite(moment) || moment > 1e10 || err1 > 1e-3 * std::abs(moment))
        return {0.0, false};
    const double phi1 = moment;
    const double phia = law.aspect() * moment + (1.0 - law.aspect()) / b;
    const double d_edge = phi1 * phia;
    if (d_edge > 1e20) return {0.0, false};
    return {1.0 / std::sqrt(d_edge), true};
}

namespace {

// Bisection for a strictly decreasing map on (b, b + span]. The stopping
// rule (1e-12 in the function value) is tighter than the 1e-10 contract so
// identities derived from the inverse hold at 1e-10 as well.
double invert_decreasing(const std::function<double(double)>& fn, double b,
                         double span, double target) {
    double lo = b + 1e-12;
    double hi = b + span;
    double f_lo = fn(lo) - target;
    if (f_lo < 0)
        throw NumericalError("oracle: inversion target above the edge value");
    for (int iter = 0; iter < 300; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = fn(mid) - target;
        if (std::abs(f_mid) <= 1e-12 || hi - lo <= 1e-15 * hi) return mid;
        if (f_mid > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SpikeForecast spike_forecast(const LimitLaw& law, double theta, LawMode mode) {
    if (!(theta > 0)) throw std::invalid_argument("spike_forecast: theta must be positive");
    const BbpThreshold thr = bbp_threshold(law, mode);
    SpikeForecast fc;
    fc.theta = theta;
    // θ exactly at the threshold counts as subsumed (strict inequality).
    if (theta <= thr.threshold) {
        fc.location = law.support_hi();
        fc.overlap = 0.0;
        fc.above_threshold = false;
        return fc;
    }
    fc.above_threshold = true;
    const double span = 10.0 * theta + 10.0;
    if (mode == LawMode::eigen) {
        const double rho = invert_decreasing(
            [&](double z) { return law_cauchy_g(law, z); }, law.support_hi(), span,
            1.0 / theta);
        const double g = law_cauchy_g(law, rho);
        const double gp = law_cauchy_gprime(law, rho);
        fc.location = rho;
        fc.overlap = std::clamp(-g * g / gp, 0.0, 1.0);
    } else {
        const double rho = invert_decreasing(
            [&](double z) { return law_d(law, z).g; }, law.support_hi(), span,
            1.0 / (theta * theta));
        const TransformValue d = law_d(law, rho);
        const TransformValue phi1 = law_phi(law, rho, 1.0);
        fc.location = rho;
        fc.overlap = std::clamp(-2.0 * d.g * phi1.g / d.g_prime, 0.0, 1.0);
    }
    return fc;
}

double fdr_infinity(const LimitLaw& law, const std::vector<double>& thetas,
                    int k, LawMode mode, Side side) {
    if (k < 1) throw std::invalid_argument("fdr_infinity: k must be at least 1");
    const BbpThreshold thr = bbp_threshold(law, mode);
    int r_star = 0;
    for (double theta : thetas)
        if (theta > thr.threshold) ++r_star;

    double sum = 0;
    const int terms = std::min<int>(k, r_star);
    for (int i = 0; i < terms; ++i) {
        const SpikeForecast fc = spike_forecast(law, thetas[static_cast<std::size_t>(i)], mode);
        if (mode == LawMode::eigen || side == Side::left) {
            sum += -fc.overlap;
        } else {
            const TransformValue d = law_d(law, fc.location);
            const TransformValue phia = law_phi(law, fc.location, law.aspect());
            sum += std::clamp(2.0 * d.g * phia.g / d.g_prime, -1.0, 0.0);
        }
    }
    return std::clamp(1.0 + sum / k, 0.0, 1.0);
}

double LimitLaw::tail_mass(double t) const {
    if (t <= lo_) return 1.0;
    if (t >= hi_) return 0.0;
    if (family_ == Family::Tabulated) {
        // Exact trapezoid mass of the piecewise-linear density on [t, hi].
        double mass = 0;
        for (std::size_t i = grid_t_.size() - 1; i-- > 0;) {
            const double a = grid_t_[i], b = grid_t_[i + 1];
            if (b <= t) break;
            const double from = std::max(a, t);
            const double fa = density(from), fb = grid_f_[i + 1];
            mass += 0.5 * (fa + fb) * (b - from);
        }
        return mass;
    }
    return integrate_weighted(*this, t, [](double) { return 1.0; });
}

double law_quantile(const LimitLaw& law, int i, int n) {
    if (n < 1 || i < 1 || i > n)
        throw std::invalid_argument("law_quantile: need 1 <= i <= n");
    const double target = static_cast<double>(i) / n;
    double lo = law.support_lo();
    double hi = law.support_hi();
    // tail_mass is decreasing in γ; bisect to 1e-10 in mass.
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double mass = law.tail_mass(mid);
        if (std::abs(mass - target) <= 1e-10) return mid;
        if (mass > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace spectralfdr
