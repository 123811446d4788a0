#include "poimps/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace poimps {

GaugedQr gauged_qr(const MatrixXcd& M, double rank_tol) {
    const int m = static_cast<int>(M.rows());
    const int n = static_cast<int>(M.cols());
    if (m < n) throw std::invalid_argument("gauged_qr: need rows >= cols");

    Eigen::HouseholderQR<MatrixXcd> qr(M);
    MatrixXcd Q = qr.householderQ() * MatrixXcd::Identity(m, n);
    MatrixXcd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();

    const double scale = std::max(M.norm(), 1.0);
    for (int j = 0; j < n; ++j) {
        const cd r = R(j, j);
        if (std::abs(r) <= rank_tol * scale)
            throw DegenerateInputError("gauged_qr: rank-deficient input");
        const cd phase = r / std::abs(r);
        R.row(j) *= std::conj(phase);
        Q.col(j) *= phase;
    }
    return {std::move(Q), std::move(R)};
}

GaugedSvd gauged_svd(const MatrixXcd& M) {
    Eigen::JacobiSVD<MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    GaugedSvd out;
    out.U = svd.matrixU();
    out.S = svd.singularValues();
    out.V = svd.matrixV();

    const int n = static_cast<int>(out.S.size());
    for (int k = 0; k + 1 < n; ++k)
        if (out.S(k) - out.S(k + 1) < 1e-12) out.degenerate = true;

    for (int k = 0; k < n; ++k) {
        int lead = -1;
        for (int i = 0; i < out.U.rows(); ++i)
            if (std::abs(out.U(i, k)) > 1e-12) { lead = i; break; }
        if (lead < 0) continue;
        const cd u = out.U(lead, k);
        const cd phase = u / std::abs(u);
        out.U.col(k) *= std::conj(phase);
        out.V.col(k) *= std::conj(phase);
    }
    return out;
}

MatrixXcd polar_unitary(const MatrixXcd& M, double* min_sv) {
    Eigen::JacobiSVD<MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (min_sv) *min_sv = svd.singularValues().minCoeff();
    return svd.matrixU() * svd.matrixV().adjoint();
}

std::vector<cd> eigenvalues_by_magnitude(const MatrixXcd& M) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success)
        throw EigensolverError("dense eigensolver failed to converge");
    std::vector<cd> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](cd a, cd b) { return std::abs(a) > std::abs(b); });
    return ev;
}

namespace {

constexpr int kDenseEigLimit = 64;

DominantEig dominant_eig_dense(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                               int dim, bool want_vector) {
    const MatrixXcd M = materialize(apply, dim);
    Eigen::ComplexEigenSolver<MatrixXcd> es(M, want_vector);
    if (es.info() != Eigen::Success)
        throw EigensolverError("dense eigensolver failed to converge");
    int best = 0;
    for (int i = 1; i < dim; ++i)
        if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(best))) best = i;
    DominantEig out;
    out.value = es.eigenvalues()(best);
    if (want_vector) out.vector = es.eigenvectors().col(best);
    return out;
}

// One Arnoldi factorization of size m; returns Ritz pair closest to the
// dominant eigenvalue. Restarted from the previous Ritz vector.
DominantEig dominant_eig_arnoldi(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                                 int dim, double tol, const VectorXcd* guess) {
    const int m = std::min(dim, 30);
    const int max_restarts = 200;

    VectorXcd v0;
    if (guess && guess->size() == dim && guess->norm() > 0)
        v0 = *guess / guess->norm();
    else {
        v0 = VectorXcd::Zero(dim);
        for (int i = 0; i < dim; ++i) v0(i) = cd(std::cos(0.7 * i + 0.3), std::sin(1.3 * i));
        v0 /= v0.norm();
    }

    for (int restart = 0; restart < max_restarts; ++restart) {
        std::vector<VectorXcd> V;
        V.reserve(m + 1);
        V.push_back(v0);
        MatrixXcd H = MatrixXcd::Zero(m + 1, m);
        int k = 0;
        VectorXcd w(dim);
        for (; k < m; ++k) {
            apply(V[k], w);
            for (int i = 0; i <= k; ++i) {
                H(i, k) = V[i].dot(w);
                w -= H(i, k) * V[i];
            }
            // one re-orthogonalization pass
            for (int i = 0; i <= k; ++i) {
                const cd c = V[i].dot(w);
                H(i, k) += c;
                w -= c * V[i];
            }
            H(k + 1, k) = w.norm();
            if (std::abs(H(k + 1, k)) < 1e-14) { ++k; break; }
            V.push_back(w / H(k + 1, k));
        }
        const MatrixXcd Hk = H.topLeftCorner(k, k);
        Eigen::ComplexEigenSolver<MatrixXcd> es(Hk, true);
        if (es.info() != Eigen::Success) throw EigensolverError("arnoldi: dense solve failed");
        int best = 0;
        for (int i = 1; i < k; ++i)
            if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(best))) best = i;
        const cd theta = es.eigenvalues()(best);
        VectorXcd y = es.eigenvectors().col(best);
        VectorXcd x = VectorXcd::Zero(dim);
        for (int i = 0; i < k; ++i) x += y(i) * V[i];
        x /= x.norm();
        double resid = (k < m || std::abs(H(k, k - 1)) < 1e-14)
                           ? 0.0
                           : std::abs(H(k, k - 1)) * std::abs(y(k - 1));
        if (resid < tol * std::max(1.0, std::abs(theta)) || k < m)
            return {theta, x};
        v0 = x;
    }
    throw EigensolverError("arnoldi: no convergence for dominant eigenvalue");
}

}  // namespace

DominantEig dominant_eig(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                         int dim, double tol, const VectorXcd* guess, bool want_vector) {
    if (dim <= kDenseEigLimit) return dominant_eig_dense(apply, dim, want_vector);
    return dominant_eig_arnoldi(apply, dim, tol, guess);
}

MatrixXcd materialize(const std::function<void(const VectorXcd&, VectorXcd&)>& apply, int dim) {
    MatrixXcd M(dim, dim);
    VectorXcd e = VectorXcd::Zero(dim), col(dim);
    for (int j = 0; j < dim; ++j) {
        e(j) = 1.0;
        apply(e, col);
        M.col(j) = col;
        e(j) = 0.0;
    }
    return M;
}

VectorXcd expm_apply(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                     const VectorXcd& v, cd z, double tol) {
    VectorXcd gv(v.size());
    apply(v, gv);
    const double vn = v.norm();
    if (vn == 0.0) return v;
    // crude spectral scale estimate; substep so the Taylor series converges fast
    const double theta = std::abs(z) * gv.norm() / vn;
    const int nsub = std::max(1, static_cast<int>(std::ceil(theta / 0.5)));
    const cd zs = z / static_cast<double>(nsub);

    VectorXcd w = v, term(v.size()), tmp(v.size());
    for (int s = 0; s < nsub; ++s) {
        term = w;
        VectorXcd acc = w;
        for (int k = 1; k <= 80; ++k) {
            apply(term, tmp);
            term = (zs / static_cast<double>(k)) * tmp;
            acc += term;
            if (term.norm() <= tol * acc.norm()) break;
        }
        w = acc;
    }
    return w;
}

namespace {

constexpr int kDenseSolveLimit = 100;

VectorXcd gmres(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                const VectorXcd& b, double tol, int dim) {
    const int m = std::min(dim, 50);
    const int max_restarts = 100;
    VectorXcd x = VectorXcd::Zero(dim);
    VectorXcd r = b, w(dim);
    double bnorm = b.norm();
    if (bnorm == 0.0) return x;

    for (int restart = 0; restart < max_restarts; ++restart) {
        double beta = r.norm();
        if (beta <= tol * bnorm) return x;
        std::vector<VectorXcd> V;
        V.push_back(r / beta);
        MatrixXcd H = MatrixXcd::Zero(m + 1, m);
        int k = 0;
        for (; k < m; ++k) {
            apply(V[k], w);
            for (int i = 0; i <= k; ++i) {
                H(i, k) = V[i].dot(w);
                w -= H(i, k) * V[i];
            }
            H(k + 1, k) = w.norm();
            if (std::abs(H(k + 1, k)) < 1e-14) { ++k; break; }
            V.push_back(w / H(k + 1, k));
        }
        VectorXcd e1 = VectorXcd::Zero(k + 1);
        e1(0) = beta;
        const MatrixXcd Hk = H.topLeftCorner(k + 1, k);
        VectorXcd y = Hk.colPivHouseholderQr().solve(e1);
        for (int i = 0; i < k; ++i) x += y(i) * V[i];
        apply(x, w);
        r = b - w;
    }
    throw EigensolverError("gmres: no convergence");
}

}  // namespace

VectorXcd solve_linear(const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
                       const VectorXcd& b, double tol, int dim) {
    if (dim <= kDenseSolveLimit) {
        const MatrixXcd A = materialize(apply, dim);
        return A.partialPivLu().solve(b);
    }
    return gmres(apply, b, tol, dim);
}

std::vector<double> dft_magnitudes(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    double mean = 0;
    for (double v : x) mean += v;
    mean /= n;
    std::vector<double> mags(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
        cd acc = 0;
        for (int j = 0; j < n; ++j)
            acc += (x[j] - mean) * std::exp(cd(0, -2.0 * M_PI * k * j / n));
        mags[k] = std::abs(acc);
    }
    return mags;
}

}  // namespace poimps
