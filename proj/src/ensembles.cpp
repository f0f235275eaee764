#include "spectralfdr/ensembles.hpp"

#include <cmath>
#include <stdexcept>

#include "spectralfdr/transforms.hpp"

namespace spectralfdr {

namespace {

// Substream tags for the per-instance Philox streams.
constexpr std::uint64_t kStreamNoiseG = 0;
constexpr std::uint64_t kStreamNoiseW = 1;
constexpr std::uint64_t kStreamSignalU = 2;
constexpr std::uint64_t kStreamSignalV = 3;

// Key of the fixed pilot stream used for the data-driven BBP estimate; kept
// independent of experiment seeds so the signal spectrum is a property of
// the ensemble alone.
constexpr std::uint64_t kPilotSeed = 0x70696C6F74ULL;  // "pilot"

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                double stddev, PhiloxRng& rng) {
    Eigen::MatrixXd g(rows, cols);
    rng.fill_gaussian({g.data(), static_cast<std::size_t>(g.size())}, stddev);
    return g;
}

// Exactly symmetric template (F + Fᵀ)/√2; the √2 keeps unit-variance
// off-diagonal entries when F has N(0, 1/n) entries, which puts the Wigner
// bulk edge at ±2.
Eigen::MatrixXd symmetrized_template(const Eigen::MatrixXd& f) {
    return (f + f.transpose()) / std::sqrt(2.0);
}

// W factor for the Fisher families: an m×m Wishart with inner dimension 2m,
// scaled to unit mean eigenvalue so it stays well-conditioned.
Eigen::MatrixXd fisher_w(Eigen::Index m, PhiloxRng& rng) {
    Eigen::MatrixXd z =
        gaussian_matrix(m, 2 * m, 1.0 / std::sqrt(2.0 * static_cast<double>(m)), rng);
    return z * z.transpose();
}

}  // namespace

bool family_is_symmetric(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::Wigner:
        case NoiseFamily::Wishart:
        case NoiseFamily::Fisher:
        case NoiseFamily::Uniform:
            return true;
        default:
            return false;
    }
}

std::string family_name(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::Wigner: return "wigner";
        case NoiseFamily::Wishart: return "wishart";
        case NoiseFamily::WishartFactor: return "wishart-factor";
        case NoiseFamily::Fisher: return "fisher";
        case NoiseFamily::FisherFactor: return "fisher-factor";
        case NoiseFamily::Uniform: return "uniform";
        case NoiseFamily::UniformFactor: return "uniform-factor";
    }
    return "?";
}

NoiseFamily parse_family(const std::string& name) {
    for (NoiseFamily f :
         {NoiseFamily::Wigner, NoiseFamily::Wishart, NoiseFamily::WishartFactor,
          NoiseFamily::Fisher, NoiseFamily::FisherFactor, NoiseFamily::Uniform,
          NoiseFamily::UniformFactor}) {
        if (family_name(f) == name) return f;
    }
    throw std::invalid_argument("unknown ensemble: " + name);
}

SignalKind parse_signal_kind(const std::string& name) {
    if (name == "well-separated") return SignalKind::well_separated;
    if (name == "barely-separated") return SignalKind::barely_separated;
    if (name == "entangled") return SignalKind::entangled;
    throw std::invalid_argument("unknown signal kind: " + name);
}

std::string signal_kind_name(SignalKind kind) {
    switch (kind) {
        case SignalKind::well_separated: return "well-separated";
        case SignalKind::barely_separated: return "barely-separated";
        case SignalKind::entangled: return "entangled";
    }
    return "?";
}

NoiseSpec NoiseSpec::make(NoiseFamily family, Eigen::Index n, Eigen::Index m) {
    if (n < 4) throw std::invalid_argument("NoiseSpec: n must be at least 4");
    NoiseSpec spec;
    spec.family = family;
    spec.n = n;
    const bool square_template = family == NoiseFamily::Wigner ||
                                 family == NoiseFamily::Fisher ||
                                 family == NoiseFamily::Uniform;
    if (square_template) {
        spec.m = n;
    } else {
        // Wishart keeps m as the factor's inner dimension; the factor
        // families produce n×m output.
        spec.m = m > 0 ? m : 2 * n;
        if (spec.m < n)
            throw std::invalid_argument("NoiseSpec: need m >= n");
    }
    return spec;
}

double signal_shift(SignalKind kind) {
    switch (kind) {
        case SignalKind::well_separated: return 1.0;
        case SignalKind::barely_separated: return 0.0;
        case SignalKind::entangled: return -10.0 * std::pow(1.3, -9.0);
    }
    return 0.0;
}

Eigen::VectorXd signal_spectrum(const SignalSpec& spec) {
    if (spec.r < 1) throw std::invalid_argument("signal_spectrum: r must be at least 1");
    if (!(spec.bbp_estimate > 0))
        throw std::invalid_argument("signal_spectrum: bbp_estimate must be positive");
    Eigen::VectorXd thetas(spec.r);
    for (int i = 1; i <= spec.r; ++i)
        thetas[i - 1] = spec.bbp_estimate + spec.shift + 10.0 * std::pow(1.3, 1.0 - i);
    if (thetas[spec.r - 1] <= 0)
        throw std::invalid_argument("signal_spectrum: spectrum reaches zero (theta_r <= 0)");
    return thetas;
}

SignalSpec SignalSpec::make(SignalKind kind, int r, double bbp_estimate) {
    SignalSpec spec;
    spec.kind = kind;
    spec.r = r;
    spec.bbp_estimate = bbp_estimate;
    spec.shift = signal_shift(kind);
    spec.thetas = signal_spectrum(spec);
    return spec;
}

Eigen::MatrixXd sample_noise(const NoiseSpec& spec, PhiloxRng rng) {
    const Eigen::Index n = spec.n;
    const Eigen::Index m = spec.m;
    PhiloxRng rng_g = rng.substream(kStreamNoiseG);
    PhiloxRng rng_w = rng.substream(kStreamNoiseW);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

    switch (spec.family) {
        case NoiseFamily::Wigner:
            return symmetrized_template(gaussian_matrix(n, n, inv_sqrt_n, rng_g));
        case NoiseFamily::Wishart: {
            // Factor entries have variance 1/m so the eigenvalue bulk is
            // Marchenko-Pastur with edges (1 ± √(n/m))².
            Eigen::MatrixXd y = gaussian_matrix(n, m, inv_sqrt_m, rng_g);
            return y * y.transpose();
        }
        case NoiseFamily::WishartFactor:
            return gaussian_matrix(n, m, inv_sqrt_m, rng_g);
        case NoiseFamily::Fisher: {
            Eigen::MatrixXd g = gaussian_matrix(n, n, inv_sqrt_n, rng_g);
            return symmetrized_template(g * fisher_w(n, rng_w));
        }
        case NoiseFamily::FisherFactor: {
            Eigen::MatrixXd g = gaussian_matrix(n, m, inv_sqrt_n, rng_g);
            return g * fisher_w(m, rng_w);
        }
        case NoiseFamily::Uniform: {
            Eigen::MatrixXd g = gaussian_matrix(n, n, inv_sqrt_n, rng_g);
            Eigen::VectorXd diag(n);
            for (Eigen::Index i = 0; i < n; ++i) diag[i] = rng_w.uniform01();
            return symmetrized_template(g * diag.asDiagonal());
        }
        case NoiseFamily::UniformFactor: {
            Eigen::MatrixXd g = gaussian_matrix(n, m, inv_sqrt_n, rng_g);
            Eigen::VectorXd diag(m);
            for (Eigen::Index i = 0; i < m; ++i) diag[i] = rng_w.uniform01();
            return g * diag.asDiagonal();
        }
    }
    throw std::invalid_argument("sample_noise: unknown family");
}

Eigen::MatrixXd sample_noise(const NoiseSpec& spec, std::uint64_t seed) {
    return sample_noise(spec, PhiloxRng(seed));
}

Eigen::MatrixXd haar_frame(Eigen::Index n, Eigen::Index r, PhiloxRng& rng) {
    Eigen::MatrixXd g = gaussian_matrix(n, r, 1.0, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
    // Fixing the signs of R's diagonal makes Q Haar-distributed.
    const Eigen::MatrixXd& qr_mat = qr.matrixQR();
    for (Eigen::Index j = 0; j < r; ++j)
        if (qr_mat(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

EnsembleInstance sample_instance(const NoiseSpec& noise, const SignalSpec& signal,
                                 PhiloxRng rng, double noise_scale) {
    if (signal.thetas.size() != signal.r)
        throw std::invalid_argument("sample_instance: signal spectrum not materialized");
    if (signal.r > noise.n)
        throw std::invalid_argument("sample_instance: rank exceeds dimension");

    EnsembleInstance inst;
    inst.thetas = signal.thetas;

    PhiloxRng rng_u = rng.substream(kStreamSignalU);
    inst.signal_left_basis = haar_frame(noise.n, signal.r, rng_u);
    if (family_is_symmetric(noise.family)) {
        inst.A = inst.signal_left_basis * signal.thetas.asDiagonal() *
                 inst.signal_left_basis.transpose();
    } else {
        PhiloxRng rng_v = rng.substream(kStreamSignalV);
        inst.signal_right_basis = haar_frame(noise.m, signal.r, rng_v);
        inst.A = inst.signal_left_basis * signal.thetas.asDiagonal() *
                 inst.signal_right_basis->transpose();
    }

    inst.E = sample_noise(noise, rng);
    if (noise_scale != 1.0) inst.E *= noise_scale;
    inst.X = inst.A + inst.E;
    return inst;
}

EnsembleInstance sample_instance(const NoiseSpec& noise, const SignalSpec& signal,
                                 std::uint64_t seed, double noise_scale) {
    EnsembleInstance inst =
        sample_instance(noise, signal, PhiloxRng(seed), noise_scale);
    inst.seed = seed;
    return inst;
}

double bbp_upper_estimate(const NoiseSpec& spec) {
    PhiloxRng rng(kPilotSeed, static_cast<std::uint64_t>(spec.family));
    const Eigen::MatrixXd pilot = sample_noise(spec, rng);
    const bool symmetric = family_is_symmetric(spec.family);
    const Spectrum spectrum =
        symmetric ? symmetric_spectrum(pilot, Tolerances{}, /*want_vectors=*/false)
                  : singular_spectrum(pilot, Tolerances{}, /*want_vectors=*/false);

    const Eigen::VectorXd& v = spectrum.values;
    const double top = v[0];
    const double med = v[v.size() / 2];
    // Evaluation point slightly past the observed edge; pushing outward keeps
    // the mapped threshold an upper estimate.
    const double y = top + 0.1 * (top - med);

    const BulkSpectrum bulk = make_bulk(spectrum, 0);
    if (symmetric) {
        const TransformValue g = cauchy_estimate(bulk, y);
        return 1.0 / g.g;
    }
    const TransformValue d = d_transform_estimate(bulk, y, spectrum.aspect());
    return 1.0 / std::sqrt(d.g);
}

}  // namespace spectralfdr
