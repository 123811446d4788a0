#ifndef POIMPS_MODEL_HPP
#define POIMPS_MODEL_HPP

#include "poimps/linalg.hpp"

namespace poimps {

/// Pauli matrices and the 2x2 identity.
MatrixXcd pauli_x();
MatrixXcd pauli_y();
MatrixXcd pauli_z();
MatrixXcd pauli_id();

/// Kronecker product, row index (i, a) -> i * cols(B)... standard Eigen order.
MatrixXcd kron(const MatrixXcd& A, const MatrixXcd& B);

/// Couplings of the kicked Ising chain. Defaults follow the convention
/// h = 1, T = 1, g = J, leaving J as the single free parameter.
struct KickedIsingParams {
    double J = 0.0;
    double g = 0.0;
    double h = 1.0;
    double T = 1.0;

    KickedIsingParams() = default;
    explicit KickedIsingParams(double J_) : J(J_), g(J_) {}
    KickedIsingParams(double J_, double g_, double h_, double T_) : J(J_), g(g_), h(h_), T(T_) {}

    void validate() const;  // throws std::invalid_argument unless T > 0
};

/// One piecewise-constant interval of the drive. `two_site` is the
/// translation-invariant bond term h_{i,i+1} as a d^2 x d^2 Hermitian matrix
/// (row/column index s1 * d + s2).
struct ScheduleSegment {
    double duration = 0.0;
    MatrixXcd two_site;
    bool single_site_only = false;

    int phys_dim() const { return static_cast<int>(std::lround(std::sqrt(double(two_site.rows())))); }
    void validate() const;  // duration > 0, Hermiticity residual <= 1e-14
};

struct HamiltonianSchedule {
    std::vector<ScheduleSegment> segments;
    double total_period = 0.0;

    void validate() const;
};

/// Two-segment schedule of the kicked Ising drive: the zz + z half acts on
/// t mod T in [0, T/2), the x half on [T/2, T). Single-site fields are split
/// symmetrically across the bond, (h/2)(Z 1 + 1 Z) and (g/2)(X 1 + 1 X).
HamiltonianSchedule kicked_ising(const KickedIsingParams& params);

/// Exact one-site propagator exp(-i duration g X) of an x-field-only segment.
/// Rejects segments whose connected two-site part exceeds 1e-12 in max norm.
MatrixXcd segment_unitary_single_site(const ScheduleSegment& seg);

}  // namespace poimps

#endif
