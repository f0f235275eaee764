#pragma once

#include <Eigen/Dense>
#include <optional>

namespace spectralfdr {

enum class SpectrumKind { eigen, singular };

// Numerical tolerances used by the factorization and overlap routines.
// Module-level defaults; every entry point accepts an override.
struct Tolerances {
    double symmetry = 1e-8;        // relative max asymmetry accepted as symmetric
    double orthonormality = 1e-6;  // max-norm of BᵀB − I for user-supplied bases
    double basis_check = 1e-8;     // same check for bases we produce ourselves
    double reconstruction = 1e-9;  // relative Frobenius residual of U Λ Uᵀ
};

// Ordered spectrum of one matrix: eigenvalues of a symmetric matrix or
// singular values of a rectangular one, with the associated orthonormal
// bases when they were computed. `values` is always nonincreasing. For
// singular spectra the stored orientation satisfies n ≤ m; `transposed`
// records whether the input was flipped to achieve that, in which case
// "left"/"right" labels downstream refer to the original orientation.
struct Spectrum {
    SpectrumKind kind = SpectrumKind::eigen;
    Eigen::VectorXd values;
    Eigen::Index n = 0;  // row dimension (stored orientation)
    Eigen::Index m = 0;  // column dimension; equals n for eigen spectra
    bool transposed = false;
    std::optional<Eigen::MatrixXd> left_basis;
    std::optional<Eigen::MatrixXd> right_basis;  // singular spectra only

    double aspect() const { return static_cast<double>(n) / static_cast<double>(m); }
};

// Consecutive differences Δⱼ = values[j−1] − values[j] (1-based j = 2..n),
// the statistic driving rank estimation.
struct SpacingProfile {
    Eigen::VectorXd deltas;  // length n − 1
    Eigen::Index n = 0;      // length of the source spectrum
};

// Eigenvalue factorization of a symmetric matrix; values nonincreasing and
// eigenvector columns reordered to match. The input must be symmetric to
// within tol.symmetry (relative max asymmetry); use symmetrize() first if a
// matrix is only numerically symmetric.
Spectrum symmetric_spectrum(const Eigen::MatrixXd& M, const Tolerances& tol = {},
                            bool want_vectors = true);

// SVD of a rectangular matrix. Inputs with more rows than columns are
// transposed internally (flag recorded on the result).
Spectrum singular_spectrum(const Eigen::MatrixXd& M, const Tolerances& tol = {},
                           bool want_vectors = true);

SpacingProfile spacings(const Spectrum& spec);

// tr(P_span(B1) · P_span(B2)) = ‖B1ᵀB2‖_F², the squared-cosine mass shared by
// the two subspaces; lies in [0, min(k, r)].
double projection_overlap(const Eigen::MatrixXd& B1, const Eigen::MatrixXd& B2,
                          const Tolerances& tol = {});

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) {
    return (M + M.transpose()) / 2.0;
}

// True when the relative max asymmetry of M is within tol.symmetry.
bool is_symmetric(const Eigen::MatrixXd& M, const Tolerances& tol = {});

// Pins the BLAS backend to one thread; called once before any factorization
// so results do not depend on this library's own worker count.
void pin_blas_threads();

}  // namespace spectralfdr
