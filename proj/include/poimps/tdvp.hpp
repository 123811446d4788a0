#ifndef POIMPS_TDVP_HPP
#define POIMPS_TDVP_HPP

#include <functional>

#include "poimps/imps.hpp"
#include "poimps/model.hpp"

namespace poimps {

struct DegenerateEvolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Regularized left/right Hamiltonian environments: L_h solves
///   (L_h| [1 + |R)(1| - TM(A_L, A_L)] = (l_h| - (l_h|R)(1|
/// and R_h the mirrored equation, with (x|y) = tr(x y).
struct Environments {
    MatrixXcd L_h, R_h;
    double energy_density = 0.0;
};

struct TdvpConfig {
    double dt = 1e-3;
    bool exact_single_site = false;
    double env_tol = 1e-12;
    double exp_tol = 1e-13;

    void validate() const;  // dt > 0, tolerances in (0, 1e-6]
};

Environments environments(const MixedCanonicalState& state, const ScheduleSegment& seg,
                          double tol = 1e-12);

/// Precomputed kernels of the effective one-site and zero-site maps G1, G2.
struct EffectiveMaps {
    int chi = 0, d = 0;
    std::vector<MatrixXcd> Q1;  // d*d blocks, index s*d + t: left two-site kernel
    std::vector<MatrixXcd> Q2;  // right two-site kernel
    std::vector<MatrixXcd> P;   // (A_L^s)^dag A_L^t
    MatrixXcd L_h, R_h;

    void apply_G1(const MpsTensor& X, MpsTensor& out) const;
    void apply_G2(const MatrixXcd& Y, MatrixXcd& out) const;
};
EffectiveMaps effective_maps(const MixedCanonicalState& state, const Environments& env,
                             const ScheduleSegment& seg);

MpsTensor apply_G1(const MixedCanonicalState& state, const Environments& env,
                   const ScheduleSegment& seg, const MpsTensor& X);
MatrixXcd apply_G2(const MixedCanonicalState& state, const Environments& env,
                   const ScheduleSegment& seg, const MatrixXcd& Y);

/// One TDVP splitting step: A_C forward, C backward, polar recombination of
/// the new A_L, then re-canonicalization.
MixedCanonicalState tdvp_step(const MixedCanonicalState& state, const ScheduleSegment& seg,
                              double dt, const TdvpConfig& cfg);

/// Evolves through every segment of the schedule in order, n_periods times.
/// Single-site-only segments are applied exactly as one-site unitaries when
/// cfg.exact_single_site is set.
MixedCanonicalState propagate(const MixedCanonicalState& state, const HamiltonianSchedule& schedule,
                              int n_periods, const TdvpConfig& cfg);

/// Same, invoking `sample(t, state)` after every step (and after each exactly
/// applied segment). t = 0 is not reported.
MixedCanonicalState propagate_traced(
    const MixedCanonicalState& state, const HamiltonianSchedule& schedule, int n_periods,
    const TdvpConfig& cfg, const std::function<void(double, const MixedCanonicalState&)>& sample);

/// Instantaneous squared leakage per site, gamma^2 = ||(P - 1) H |psi>||^2:
/// the two-site null-space component of the Hamiltonian applied to the state.
double leakage(const MixedCanonicalState& state, const ScheduleSegment& seg);

/// Flat vector view used to exponentiate the effective maps (physical-major,
/// column-major within each bond matrix). Exposed for tests.
VectorXcd flatten_tensor(const MpsTensor& A);
MpsTensor unflatten_tensor(const VectorXcd& v, int chi, int d);

}  // namespace poimps

#endif
