#include "poimps/tangent.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace poimps {

MatrixXcd null_space(const MpsTensor& A_L) {
    const int chi = A_L.chi_l, d = A_L.d;
    const MatrixXcd M = A_L.merged_left();
    if ((M.adjoint() * M - MatrixXcd::Identity(chi, chi)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("null_space: A_L is not left orthonormal");

    Eigen::HouseholderQR<MatrixXcd> qr(M);
    const MatrixXcd Qfull = qr.householderQ() * MatrixXcd::Identity(d * chi, d * chi);
    MatrixXcd nu = Qfull.rightCols((d - 1) * chi);

    if ((nu.adjoint() * M).cwiseAbs().maxCoeff() > 1e-12) {
        Eigen::JacobiSVD<MatrixXcd> svd(M, Eigen::ComputeFullU);
        nu = svd.matrixU().rightCols((d - 1) * chi);
    }
    return nu;
}

TangentBasis tangent_basis(const MpsTensor& A_L) {
    const int chi = A_L.chi_l, d = A_L.d;
    TangentBasis basis;
    basis.nu = null_space(A_L);

    const int nrows = (d - 1) * chi;
    basis.vectors_re.reserve(nrows * chi);
    basis.vectors_im.reserve(nrows * chi);
    for (int r = 0; r < nrows; ++r)
        for (int c = 0; c < chi; ++c) {
            MpsTensor v(chi, d, chi);
            for (int s = 0; s < d; ++s) v.m[s].col(c) = basis.nu.block(s * chi, r, chi, 1);
            MpsTensor vi = v;
            vi *= cd(0, 1);
            basis.vectors_re.push_back(std::move(v));
            basis.vectors_im.push_back(std::move(vi));
        }
    return basis;
}

}  // namespace poimps
