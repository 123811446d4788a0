#ifndef POIMPS_IMPS_HPP
#define POIMPS_IMPS_HPP

#include "poimps/linalg.hpp"

namespace poimps {

struct CanonicalizationStall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One translation-invariant MPS tensor of shape chi_l x d x chi_r,
/// stored as d bond matrices m[s] of shape chi_l x chi_r.
struct MpsTensor {
    int chi_l = 0, chi_r = 0, d = 0;
    std::vector<MatrixXcd> m;

    MpsTensor() = default;
    MpsTensor(int chi_l_, int d_, int chi_r_)
        : chi_l(chi_l_), chi_r(chi_r_), d(d_),
          m(d_, MatrixXcd::Zero(chi_l_, chi_r_)) {}

    int chi() const { return chi_l; }  // uniform states have chi_l == chi_r

    /// (d * chi_l) x chi_r matrix with row blocks grouped by the physical index.
    MatrixXcd merged_left() const;

    MpsTensor& operator+=(const MpsTensor& o);
    MpsTensor& operator*=(cd a);
    friend MpsTensor operator+(MpsTensor a, const MpsTensor& b) { return a += b; }
    friend MpsTensor operator*(cd a, MpsTensor t) { return t *= a; }

    double frobenius_norm() const;
};

struct MixedCanonicalState {
    MpsTensor A_L, A_R, A_C;
    MatrixXcd C;  // diagonal, nonnegative, descending
    bool schmidt_ill_conditioned = false;  // min(S)/max(S) < 1e-12

    int chi() const { return A_L.chi_l; }
    int d() const { return A_L.d; }
    VectorXd schmidt() const { return C.diagonal().real(); }
};

struct TransferMatrix {
    MatrixXcd matrix;  // (chi_i chi_j) x (chi_i chi_j), row = (bra_left, ket_left)
    int chi_i = 0, chi_j = 0;
};

/// Deterministic random tensor with Re and Im of every entry uniform in
/// [-1, 1], drawn in flat (left, physical, right) order from an mt19937_64.
MpsTensor random_tensor(int chi, int d, unsigned long long seed);

/// TM(A, B) = sum_s conj(A^s) (x) B^s with A on the bra side.
TransferMatrix transfer_matrix(const MpsTensor& A, const MpsTensor& B);

/// Left action sum_s (A^s)^dag l B^s and right action sum_s B^s r (A^s)^dag
/// of the mixed transfer matrix; pairing between the two is tr(l r).
MatrixXcd tm_left_apply(const MpsTensor& A, const MpsTensor& B, const MatrixXcd& l);
MatrixXcd tm_right_apply(const MpsTensor& A, const MpsTensor& B, const MatrixXcd& r);

/// Spectral radius of TM(A, A); equals 1 for a normalized state.
double state_norm_sq(const MpsTensor& A);

/// Rescales so the dominant transfer-matrix eigenvalue has magnitude one.
MpsTensor normalized(const MpsTensor& A);

/// Fidelity density D(A, B): the spectral radius of the mixed transfer
/// matrix. Gauge invariant; equals 1 iff the states coincide.
double fidelity_density(const MpsTensor& A, const MpsTensor& B);

/// Magnitude of the second-largest eigenvalue of TM(A, A).
/// Used as the injectivity filter; returns 0 at chi = 1 by convention.
double second_tm_eigenvalue(const MpsTensor& A);

/// Iterative gauged-QR left orthonormalization (fixed point of L A = A_L L)
/// with eigensolver refinement of the gauge transform. The input is
/// normalized internally. Throws CanonicalizationStall when the QR gauge
/// fails to converge (non-injective or ill-conditioned input).
struct LeftOrthoResult {
    MpsTensor A_L;
    MatrixXcd L;  // unit Frobenius norm
};
LeftOrthoResult left_orthonormalize(const MpsTensor& A, const MatrixXcd& L0, double eta = 1e-15);

struct RightOrthoResult {
    MpsTensor A_R;
    MatrixXcd R;
};
RightOrthoResult right_orthonormalize(const MpsTensor& A, const MatrixXcd& R0, double eta = 1e-15);

/// Left orthonormalize, right orthonormalize, gauged SVD of the gauge
/// C, and rotation of A_L, A_R into the diagonal gauge. Restarts stalls
/// with fresh random gauges up to 3 times before giving up.
MixedCanonicalState mixed_canonical(const MpsTensor& A, double eta = 1e-14);

/// Fast path for a tensor that is already left orthonormal (e.g. out of the
/// polar recombination of a TDVP step); C0 warm-starts the right gauge.
MixedCanonicalState mixed_canonical_from_left(const MpsTensor& A_L, const MatrixXcd& C0,
                                              double eta = 1e-14);

/// Rotates a mixed-canonical state with arbitrary (triangular) gauge C into
/// the diagonal gauge via the gauged SVD of C.
MixedCanonicalState regauge_diagonal(const MixedCanonicalState& state);

/// Von Neumann entropy of the Schmidt spectrum, 0 <= S <= ln chi.
double entanglement_entropy(const MixedCanonicalState& state);

/// Gauge-invariant per-site expectation value of a one-site (d x d) or
/// two-adjacent-site (d^2 x d^2) operator.
cd expectation(const MixedCanonicalState& state, const MatrixXcd& op);

/// Swap the bond indices of each physical slice (spatial reflection).
MpsTensor spatial_inversion(const MpsTensor& A);

}  // namespace poimps

#endif
