#ifndef POIMPS_TANGENT_HPP
#define POIMPS_TANGENT_HPP

#include "poimps/imps.hpp"

namespace poimps {

/// Gauge-fixed orthonormal tangent basis of the iMPS manifold at A_L.
/// Ordering is deterministic: alpha runs row-major over the entries of the
/// (d-1)chi x chi parameter matrix X, real directions before imaginary ones;
/// vectors_im[a] = i * vectors_re[a] exactly.
struct TangentBasis {
    MatrixXcd nu;  // d chi x (d-1) chi null space of the merged A_L
    std::vector<MpsTensor> vectors_re;
    std::vector<MpsTensor> vectors_im;

    int n_complex() const { return static_cast<int>(vectors_re.size()); }
    int size() const { return 2 * n_complex(); }

    /// Flat view over [re..., im...], index in [0, size()).
    const MpsTensor& vector(int i) const {
        return i < n_complex() ? vectors_re[i] : vectors_im[i - n_complex()];
    }
};

/// Orthonormal null space of the merged (bond, physical) A_L matrix:
/// nu^dag nu = 1 and nu^dag merged(A_L) = 0, with (d-1) chi columns.
MatrixXcd null_space(const MpsTensor& A_L);

TangentBasis tangent_basis(const MpsTensor& A_L);

}  // namespace poimps

#endif
