#ifndef POIMPS_LINALG_HPP
#define POIMPS_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace poimps {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigensolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// QR decomposition with the diagonal of R fixed to be strictly positive,
/// which makes the factorization unique for full-column-rank input.
struct GaugedQr {
    MatrixXcd Q;  // m x n isometry
    MatrixXcd R;  // n x n upper triangular, positive diagonal
};
GaugedQr gauged_qr(const MatrixXcd& M, double rank_tol = 1e-14);

/// SVD with the phase of each left singular vector fixed: the first component
/// of magnitude > 1e-12 is made real positive, right vectors absorb the phase.
struct GaugedSvd {
    MatrixXcd U;
    VectorXd S;  // descending
    MatrixXcd V;
    bool degenerate = false;  // singular values closer than 1e-12
};
GaugedSvd gauged_svd(const MatrixXcd& M);

/// Unitary (isometric) factor of the polar decomposition M = U P,
/// P Hermitian positive semidefinite. Requires rows >= cols.
/// min_sv receives the smallest singular value when non-null.
MatrixXcd polar_unitary(const MatrixXcd& M, double* min_sv = nullptr);

/// Largest-|lambda| eigenvalue (and optionally an eigenvector) of a general
/// complex matrix map given by `apply` on a dim-dimensional space.
/// Dense eigendecomposition for small dim, restarted Arnoldi above.
struct DominantEig {
    cd value;
    VectorXcd vector;
};
DominantEig dominant_eig(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                         int dim, double tol = 1e-15,
                         const VectorXcd* guess = nullptr, bool want_vector = true);

/// All eigenvalues of a dense complex matrix, sorted by descending magnitude.
std::vector<cd> eigenvalues_by_magnitude(const MatrixXcd& M);

/// w = exp(z * G) v for a linear map G supplied through `apply`, evaluated
/// by a Taylor series with automatic substepping. Exact to `tol` relative
/// accuracy; intended for |z|*||G|| up to order one.
VectorXcd expm_apply(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                     const VectorXcd& v, cd z, double tol = 1e-13);

/// Dense matrix of a linear map by application to coordinate basis vectors.
MatrixXcd materialize(const std::function<void(const VectorXcd&, VectorXcd&)>& apply, int dim);

/// Solve A x = b for a general complex map. Dense LU for small dim,
/// restarted GMRES above. Throws EigensolverError on non-convergence.
VectorXcd solve_linear(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                       const VectorXcd& b, double tol, int dim);

/// Discrete Fourier magnitudes |X_k| for k = 0..N/2, with frequencies
/// omega_k = 2 pi k / N. The mean (k = 0 component) is removed first.
std::vector<double> dft_magnitudes(const std::vector<double>& x);

}  // namespace poimps

#endif
