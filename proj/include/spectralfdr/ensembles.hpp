#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "spectralfdr/rng.hpp"
#include "spectralfdr/spectral.hpp"

namespace spectralfdr {

enum class NoiseFamily {
    Wigner,
    Wishart,
    WishartFactor,
    Fisher,
    FisherFactor,
    Uniform,
    UniformFactor
};

bool family_is_symmetric(NoiseFamily family);
std::string family_name(NoiseFamily family);
// Parses preset names like "wigner" or "wishart-factor"; throws on unknown.
NoiseFamily parse_family(const std::string& name);

// Which noise ensemble to draw and at what size. For symmetric families the
// output is n×n (m is forced to n); rectangular families produce n×m with
// m ≥ n.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Wigner;
    Eigen::Index n = 0;
    Eigen::Index m = 0;

    static NoiseSpec make(NoiseFamily family, Eigen::Index n,
                          Eigen::Index m = 0);
};

enum class SignalKind { well_separated, barely_separated, entangled };

SignalKind parse_signal_kind(const std::string& name);
std::string signal_kind_name(SignalKind kind);

// Signal spectrum θᵢ = bbp_estimate + shift + 10 · 1.3^{1−i}, i = 1..r, with
// the shift selected by the kind: +1 (well separated), 0 (barely separated),
// −10 · 1.3^{−9} (entangled, which cancels the i = 10 term exactly).
struct SignalSpec {
    int r = 20;
    SignalKind kind = SignalKind::well_separated;
    double bbp_estimate = 1.0;
    double shift = 1.0;
    Eigen::VectorXd thetas;

    static SignalSpec make(SignalKind kind, int r, double bbp_estimate);
};

double signal_shift(SignalKind kind);
Eigen::VectorXd signal_spectrum(const SignalSpec& spec);

// One sampled problem instance X = A + E with the signal's spectral data
// recorded so the true FDR can be measured against it.
struct EnsembleInstance {
    Eigen::MatrixXd X;
    Eigen::MatrixXd A;
    Eigen::MatrixXd E;
    Eigen::MatrixXd signal_left_basis;                 // n×r
    std::optional<Eigen::MatrixXd> signal_right_basis; // m×r, rectangular case
    Eigen::VectorXd thetas;
    std::uint64_t seed = 0;
};

// Deterministic noise draw for (spec, seed); symmetric families return an
// exactly symmetric matrix.
Eigen::MatrixXd sample_noise(const NoiseSpec& spec, PhiloxRng rng);
Eigen::MatrixXd sample_noise(const NoiseSpec& spec, std::uint64_t seed);

// Signal bases are Haar frames from QR of independent Gaussian columns.
// noise_scale = 0 gives the noiseless instance X = A.
EnsembleInstance sample_instance(const NoiseSpec& noise, const SignalSpec& signal,
                                 PhiloxRng rng, double noise_scale = 1.0);
EnsembleInstance sample_instance(const NoiseSpec& noise, const SignalSpec& signal,
                                 std::uint64_t seed, double noise_scale = 1.0);

// Upper estimate of the family's BBP transition point: the largest value of
// a pilot noise sample pushed slightly past the edge and mapped through the
// empirical transform (1/Ĝ for eigen spectra, D̂^{−1/2} for singular ones).
// Deterministic per (family, n, m); does not depend on experiment seeds.
double bbp_upper_estimate(const NoiseSpec& spec);

// Haar-distributed n×r orthonormal frame.
Eigen::MatrixXd haar_frame(Eigen::Index n, Eigen::Index r, PhiloxRng& rng);

}  // namespace spectralfdr
