#include "spectralfdr/spectral.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <string>
#include <vector>

#include "spectralfdr/errors.hpp"

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a,
             const int* lda, double* w, double* work, const int* lwork,
             int* iwork, const int* liwork, int* info);
void dgesdd_(const char* jobz, const int* m, const int* n, double* a,
             const int* lda, double* s, double* u, const int* ldu, double* vt,
             const int* ldvt, double* work, const int* lwork, int* iwork,
             int* info);
// Present when the BLAS is OpenBLAS; resolved at runtime if available.
void openblas_set_num_threads(int) __attribute__((weak));
}

namespace spectralfdr {

void pin_blas_threads() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        ::setenv("OPENBLAS_NUM_THREADS", "1", 0);
        ::setenv("OMP_NUM_THREADS", "1", 0);
        if (openblas_set_num_threads != nullptr) openblas_set_num_threads(1);
    });
}

bool is_symmetric(const Eigen::MatrixXd& M, const Tolerances& tol) {
    if (M.rows() != M.cols()) return false;
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    return asym <= tol.symmetry * scale;
}

namespace {

void require_finite(const Eigen::MatrixXd& M, const char* op) {
    if (!M.allFinite())
        throw std::invalid_argument(std::string(op) + ": non-finite entries");
}

}  // namespace

Spectrum symmetric_spectrum(const Eigen::MatrixXd& M, const Tolerances& tol,
                            bool want_vectors) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("symmetric_spectrum: matrix is not square");
    if (M.size() == 0)
        throw std::invalid_argument("symmetric_spectrum: empty matrix");
    require_finite(M, "symmetric_spectrum");
    if (!is_symmetric(M, tol))
        throw std::invalid_argument(
            "symmetric_spectrum: asymmetry beyond tolerance (pass --symmetrize "
            "or call symmetrize() to force (M + Mᵀ)/2)");
    pin_blas_threads();

    const int n = static_cast<int>(M.rows());
    // Killing sub-tolerance asymmetry keeps the factorization independent of
    // which triangle LAPACK reads.
    Eigen::MatrixXd A = symmetrize(M);
    Eigen::VectorXd w(n);
    const char jobz = want_vectors ? 'V' : 'N';
    const char uplo = 'U';
    int info = 0, lwork = -1, liwork = -1;
    double work_query = 0;
    int iwork_query = 0;
    dsyevd_(&jobz, &uplo, &n, A.data(), &n, w.data(), &work_query, &lwork,
            &iwork_query, &liwork, &info);
    lwork = static_cast<int>(work_query);
    liwork = iwork_query;
    std::vector<double> work(static_cast<std::size_t>(lwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    dsyevd_(&jobz, &uplo, &n, A.data(), &n, w.data(), work.data(), &lwork,
            iwork.data(), &liwork, &info);
    if (info != 0)
        throw NumericalError("symmetric_spectrum: dsyevd failed, info = " +
                             std::to_string(info));

    Spectrum spec;
    spec.kind = SpectrumKind::eigen;
    spec.n = spec.m = n;
    spec.values = w.reverse();  // LAPACK returns ascending order
    if (want_vectors) spec.left_basis = A.rowwise().reverse();
    return spec;
}

Spectrum singular_spectrum(const Eigen::MatrixXd& M, const Tolerances& tol,
                           bool want_vectors) {
    (void)tol;
    if (M.size() == 0)
        throw std::invalid_argument("singular_spectrum: empty matrix");
    require_finite(M, "singular_spectrum");
    pin_blas_threads();

    const bool flip = M.rows() > M.cols();
    Eigen::MatrixXd A = flip ? M.transpose() : M;
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(A.cols());

    Eigen::VectorXd s(n);
    Eigen::MatrixXd U, VT;
    const char jobz = want_vectors ? 'S' : 'N';
    int info = 0, lwork = -1;
    double work_query = 0;
    std::vector<int> iwork(static_cast<std::size_t>(8) * n);
    if (want_vectors) {
        U.resize(n, n);
        VT.resize(n, m);
    }
    double* u_ptr = want_vectors ? U.data() : nullptr;
    double* vt_ptr = want_vectors ? VT.data() : nullptr;
    const int ldu = n;
    const int ldvt = n;
    dgesdd_(&jobz, &n, &m, A.data(), &n, s.data(), u_ptr, &ldu, vt_ptr, &ldvt,
            &work_query, &lwork, iwork.data(), &info);
    lwork = static_cast<int>(work_query);
    std::vector<double> work(static_cast<std::size_t>(lwork));
    dgesdd_(&jobz, &n, &m, A.data(), &n, s.data(), u_ptr, &ldu, vt_ptr, &ldvt,
            work.data(), &lwork, iwork.data(), &info);
    if (info != 0)
        throw NumericalError("singular_spectrum: dgesdd failed, info = " +
                             std::to_string(info));

    Spectrum spec;
    spec.kind = SpectrumKind::singular;
    spec.n = n;
    spec.m = m;
    spec.transposed = flip;
    spec.values = s;  // dgesdd returns nonincreasing order
    if (want_vectors) {
        spec.left_basis = std::move(U);
        spec.right_basis = VT.transpose();
    }
    return spec;
}

SpacingProfile spacings(const Spectrum& spec) {
    const Eigen::Index n = spec.values.size();
    if (n < 2)
        throw std::invalid_argument("spacings: need at least two spectrum values");
    SpacingProfile profile;
    profile.n = n;
    profile.deltas = spec.values.head(n - 1) - spec.values.tail(n - 1);
    return profile;
}

double projection_overlap(const Eigen::MatrixXd& B1, const Eigen::MatrixXd& B2,
                          const Tolerances& tol) {
    if (B1.rows() != B2.rows())
        throw std::invalid_argument("projection_overlap: ambient dimension mismatch");
    auto check_orthonormal = [&](const Eigen::MatrixXd& B, const char* which) {
        const Eigen::MatrixXd gram = B.transpose() * B;
        const double dev =
            (gram - Eigen::MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff();
        if (dev > tol.orthonormality)
            throw std::invalid_argument(std::string("projection_overlap: ") + which +
                                        " basis is not orthonormal");
    };
    check_orthonormal(B1, "first");
    check_orthonormal(B2, "second");
    const double overlap = (B1.transpose() * B2).squaredNorm();
    const double cap = static_cast<double>(std::min(B1.cols(), B2.cols()));
    return std::clamp(overlap, 0.0, cap);
}

}  // namespace spectralfdr
