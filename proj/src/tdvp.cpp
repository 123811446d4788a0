#include "poimps/tdvp.hpp"

#include "poimps/tangent.hpp"

namespace poimps {

void TdvpConfig::validate() const {
    if (!(dt > 0)) throw std::invalid_argument("TdvpConfig: dt must be positive");
    if (!(env_tol > 0 && env_tol <= 1e-6) || !(exp_tol > 0 && exp_tol <= 1e-6))
        throw std::invalid_argument("TdvpConfig: tolerances must lie in (0, 1e-6]");
}

VectorXcd flatten_tensor(const MpsTensor& A) {
    VectorXcd v(A.d * A.chi_l * A.chi_r);
    const int blk = A.chi_l * A.chi_r;
    for (int s = 0; s < A.d; ++s)
        v.segment(s * blk, blk) = Eigen::Map<const VectorXcd>(A.m[s].data(), blk);
    return v;
}

MpsTensor unflatten_tensor(const VectorXcd& v, int chi, int d) {
    MpsTensor A(chi, d, chi);
    const int blk = chi * chi;
    for (int s = 0; s < d; ++s)
        A.m[s] = Eigen::Map<const MatrixXcd>(v.data() + s * blk, chi, chi);
    return A;
}

Environments environments(const MixedCanonicalState& state, const ScheduleSegment& seg,
                          double tol) {
    const int chi = state.chi(), d = state.d();
    const MatrixXcd& h = seg.two_site;
    const MpsTensor& AL = state.A_L;
    const MpsTensor& AR = state.A_R;

    MatrixXcd l_h = MatrixXcd::Zero(chi, chi);
    for (int s1 = 0; s1 < d; ++s1)
        for (int t1 = 0; t1 < d; ++t1) {
            const MatrixXcd X = AL.m[s1].adjoint() * AL.m[t1];
            for (int s2 = 0; s2 < d; ++s2)
                for (int t2 = 0; t2 < d; ++t2) {
                    const cd c = h(s1 * d + s2, t1 * d + t2);
                    if (c == cd(0)) continue;
                    l_h.noalias() += c * (AL.m[s2].adjoint() * X * AL.m[t2]);
                }
        }

    MatrixXcd r_h = MatrixXcd::Zero(chi, chi);
    for (int s2 = 0; s2 < d; ++s2)
        for (int t2 = 0; t2 < d; ++t2) {
            const MatrixXcd Y = AR.m[t2] * AR.m[s2].adjoint();
            for (int s1 = 0; s1 < d; ++s1)
                for (int t1 = 0; t1 < d; ++t1) {
                    const cd c = h(s1 * d + s2, t1 * d + t2);
                    if (c == cd(0)) continue;
                    r_h.noalias() += c * (AR.m[t1] * Y * AR.m[s1].adjoint());
                }
        }

    const MatrixXcd Rfp = state.C * state.C.adjoint();   // right fixed point of TM(A_L, A_L)
    const MatrixXcd Lfp = state.C.adjoint() * state.C;   // left fixed point of TM(A_R, A_R)
    const cd e = (l_h * Rfp).trace();

    const int dim = chi * chi;
    auto unvec = [chi](const VectorXcd& v) {
        return MatrixXcd(Eigen::Map<const MatrixXcd>(v.data(), chi, chi));
    };
    auto vec = [](const MatrixXcd& M) { return VectorXcd(Eigen::Map<const VectorXcd>(M.data(), M.size())); };

    auto apply_L = [&](const VectorXcd& v, VectorXcd& out) {
        const MatrixXcd l = unvec(v);
        MatrixXcd r = l + (l * Rfp).trace() * MatrixXcd::Identity(chi, chi) - tm_left_apply(AL, AL, l);
        out = vec(r);
    };
    auto apply_R = [&](const VectorXcd& v, VectorXcd& out) {
        const MatrixXcd r = unvec(v);
        MatrixXcd l = r + (Lfp * r).trace() * MatrixXcd::Identity(chi, chi) - tm_right_apply(AR, AR, r);
        out = vec(l);
    };

    Environments env;
    env.energy_density = e.real();
    const MatrixXcd rhs_L = l_h - e * MatrixXcd::Identity(chi, chi);
    const MatrixXcd rhs_R = r_h - (Lfp * r_h).trace() * MatrixXcd::Identity(chi, chi);
    env.L_h = unvec(solve_linear(apply_L, vec(rhs_L), tol, dim));
    env.R_h = unvec(solve_linear(apply_R, vec(rhs_R), tol, dim));
    return env;
}

EffectiveMaps effective_maps(const MixedCanonicalState& state, const Environments& env,
                             const ScheduleSegment& seg) {
    const int chi = state.chi(), d = state.d();
    const MatrixXcd& h = seg.two_site;
    EffectiveMaps maps;
    maps.chi = chi;
    maps.d = d;
    maps.L_h = env.L_h;
    maps.R_h = env.R_h;
    maps.Q1.assign(d * d, MatrixXcd::Zero(chi, chi));
    maps.Q2.assign(d * d, MatrixXcd::Zero(chi, chi));
    maps.P.assign(d * d, MatrixXcd());

    std::vector<MatrixXcd> gramL(d * d), gramR(d * d);
    for (int u = 0; u < d; ++u)
        for (int v = 0; v < d; ++v) {
            gramL[u * d + v] = state.A_L.m[u].adjoint() * state.A_L.m[v];
            gramR[u * d + v] = state.A_R.m[v] * state.A_R.m[u].adjoint();
        }
    for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t) {
            maps.P[s * d + t] = gramL[s * d + t];
            for (int u = 0; u < d; ++u)
                for (int v = 0; v < d; ++v) {
                    const cd c1 = h(u * d + s, v * d + t);
                    if (c1 != cd(0)) maps.Q1[s * d + t] += c1 * gramL[u * d + v];
                    const cd c2 = h(s * d + u, t * d + v);
                    if (c2 != cd(0)) maps.Q2[s * d + t] += c2 * gramR[u * d + v];
                }
        }
    return maps;
}

void EffectiveMaps::apply_G1(const MpsTensor& X, MpsTensor& out) const {
    out = MpsTensor(chi, d, chi);
    for (int s = 0; s < d; ++s) {
        MatrixXcd acc = L_h * X.m[s] + X.m[s] * R_h;
        for (int t = 0; t < d; ++t) {
            acc.noalias() += Q1[s * d + t] * X.m[t];
            acc.noalias() += X.m[t] * Q2[s * d + t];
        }
        out.m[s] = std::move(acc);
    }
}

void EffectiveMaps::apply_G2(const MatrixXcd& Y, MatrixXcd& out) const {
    out = L_h * Y + Y * R_h;
    for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t) out.noalias() += P[s * d + t] * Y * Q2[s * d + t];
}

MpsTensor apply_G1(const MixedCanonicalState& state, const Environments& env,
                   const ScheduleSegment& seg, const MpsTensor& X) {
    MpsTensor out;
    effective_maps(state, env, seg).apply_G1(X, out);
    return out;
}

MatrixXcd apply_G2(const MixedCanonicalState& state, const Environments& env,
                   const ScheduleSegment& seg, const MatrixXcd& Y) {
    MatrixXcd out;
    effective_maps(state, env, seg).apply_G2(Y, out);
    return out;
}

namespace {

// Evolves A_C forward and C backward under the supplied frozen maps.
void evolve_centers(const MixedCanonicalState& state, const EffectiveMaps& maps, double dt,
                    const TdvpConfig& cfg, MpsTensor& ac_out, MatrixXcd& c_out) {
    const int chi = state.chi(), d = state.d();
    auto g1_op = [&](const VectorXcd& v, VectorXcd& out) {
        MpsTensor r;
        maps.apply_G1(unflatten_tensor(v, chi, d), r);
        out = flatten_tensor(r);
    };
    auto g2_op = [&](const VectorXcd& v, VectorXcd& out) {
        MatrixXcd r;
        maps.apply_G2(Eigen::Map<const MatrixXcd>(v.data(), chi, chi), r);
        out = Eigen::Map<const VectorXcd>(r.data(), r.size());
    };
    ac_out = unflatten_tensor(expm_apply(g1_op, flatten_tensor(state.A_C), cd(0, -dt), cfg.exp_tol),
                              chi, d);
    const VectorXcd c_flat = Eigen::Map<const VectorXcd>(state.C.data(), state.C.size());
    const VectorXcd c_new = expm_apply(g2_op, c_flat, cd(0, -dt), cfg.exp_tol);
    c_out = Eigen::Map<const MatrixXcd>(c_new.data(), chi, chi);
}

// Completes a left-orthonormal tensor into a mixed-canonical state without
// the diagonalizing SVD rotation, keeping the bond gauge continuously
// connected to the previous step (C comes out triangular, not diagonal).
MixedCanonicalState aligned_from_left(const MpsTensor& A_L, const MatrixXcd& C_prev) {
    const RightOrthoResult ro = right_orthonormalize(A_L, C_prev, 1e-14);
    MixedCanonicalState st;
    st.A_L = A_L;
    st.A_R = ro.A_R;
    st.C = ro.R;
    st.A_C = MpsTensor(A_L.chi_l, A_L.d, A_L.chi_r);
    for (int s = 0; s < A_L.d; ++s) st.A_C.m[s].noalias() = A_L.m[s] * st.C;
    return st;
}

MixedCanonicalState aligned_from_right(const MpsTensor& A_R, const MatrixXcd& C_prev) {
    const LeftOrthoResult lo = left_orthonormalize(A_R, C_prev, 1e-14);
    MixedCanonicalState st;
    st.A_L = lo.A_L;
    st.A_R = A_R;
    st.C = lo.L;
    st.A_C = MpsTensor(A_R.chi_l, A_R.d, A_R.chi_r);
    for (int s = 0; s < A_R.d; ++s) st.A_C.m[s].noalias() = st.A_L.m[s] * st.C;
    return st;
}

// Half scheme extracting the new A_L from the left polar factors.
MixedCanonicalState substep_left(const MixedCanonicalState& state, const EffectiveMaps& maps,
                                 double dt, const TdvpConfig& cfg) {
    const int chi = state.chi(), d = state.d();
    MpsTensor ac;
    MatrixXcd c;
    evolve_centers(state, maps, dt, cfg, ac, c);

    double sv_ac = 0, sv_c = 0;
    const MatrixXcd U_ac = polar_unitary(ac.merged_left(), &sv_ac);
    const MatrixXcd U_c = polar_unitary(c, &sv_c);
    if (sv_ac < 1e-14 || sv_c < 1e-14)
        throw DegenerateEvolutionError("tdvp_step: singular center tensor in polar extraction");

    MpsTensor A_L_new(chi, d, chi);
    const MatrixXcd U_c_dag = U_c.adjoint();
    for (int s = 0; s < d; ++s) A_L_new.m[s].noalias() = U_ac.block(s * chi, 0, chi, chi) * U_c_dag;
    return aligned_from_left(A_L_new, state.C);
}

// Mirror half scheme extracting the new A_R from the right polar factors.
MixedCanonicalState substep_right(const MixedCanonicalState& state, const ScheduleSegment& seg,
                                  double dt, const TdvpConfig& cfg) {
    const int chi = state.chi(), d = state.d();
    MpsTensor ac;
    MatrixXcd c;
    evolve_centers(state, seg, dt, cfg, ac, c);

    MatrixXcd Mr(chi, d * chi);
    for (int s = 0; s < d; ++s) Mr.middleCols(s * chi, chi) = ac.m[s];
    double sv_ac = 0, sv_c = 0;
    const MatrixXcd U_ac = polar_unitary(Mr.adjoint(), &sv_ac).adjoint();  // chi x d chi
    const MatrixXcd U_c = polar_unitary(c, &sv_c);
    if (sv_ac < 1e-14 || sv_c < 1e-14)
        throw DegenerateEvolutionError("tdvp_step: singular center tensor in polar extraction");

    MpsTensor A_R_new(chi, d, chi);
    const MatrixXcd U_c_dag = U_c.adjoint();
    for (int s = 0; s < d; ++s) A_R_new.m[s].noalias() = U_c_dag * U_ac.middleCols(s * chi, chi);
    return aligned_from_right(A_R_new, state.C);
}

}  // namespace

MixedCanonicalState tdvp_step(const MixedCanonicalState& state, const ScheduleSegment& seg,
                              double dt, const TdvpConfig& cfg) {
    // Symmetric composition of the left-moving scheme and its right-moving
    // mirror, each over half a step; the pair cancels the first-order error
    // of the one-sided recombination. Gauges stay continuously connected
    // inside the step; the diagonal gauge is restored at the end.
    const MixedCanonicalState mid = substep_left(state, seg, dt / 2, cfg);
    return regauge_diagonal(substep_right(mid, seg, dt / 2, cfg));
}

namespace {

MixedCanonicalState apply_exact_single_site(const MixedCanonicalState& state, const MatrixXcd& u) {
    const int d = state.d();
    MixedCanonicalState out = state;
    for (int s = 0; s < d; ++s) {
        out.A_L.m[s].setZero();
        out.A_R.m[s].setZero();
        out.A_C.m[s].setZero();
        for (int t = 0; t < d; ++t) {
            out.A_L.m[s].noalias() += u(s, t) * state.A_L.m[t];
            out.A_R.m[s].noalias() += u(s, t) * state.A_R.m[t];
            out.A_C.m[s].noalias() += u(s, t) * state.A_C.m[t];
        }
    }
    return out;
}

}  // namespace

MixedCanonicalState propagate_traced(
    const MixedCanonicalState& state, const HamiltonianSchedule& schedule, int n_periods,
    const TdvpConfig& cfg, const std::function<void(double, const MixedCanonicalState&)>& sample) {
    cfg.validate();
    MixedCanonicalState cur = state;
    double t = 0;
    for (int p = 0; p < n_periods; ++p) {
        for (const auto& seg : schedule.segments) {
            if (seg.single_site_only && cfg.exact_single_site) {
                cur = apply_exact_single_site(cur, segment_unitary_single_site(seg));
                t += seg.duration;
                if (sample) sample(t, cur);
                continue;
            }
            const int nsteps = std::max(1, static_cast<int>(std::lround(seg.duration / cfg.dt)));
            const double dt_eff = seg.duration / nsteps;
            for (int k = 0; k < nsteps; ++k) {
                cur = tdvp_step(cur, seg, dt_eff, cfg);
                t += dt_eff;
                if (sample) sample(t, cur);
            }
        }
    }
    return cur;
}

MixedCanonicalState propagate(const MixedCanonicalState& state, const HamiltonianSchedule& schedule,
                              int n_periods, const TdvpConfig& cfg) {
    return propagate_traced(state, schedule, n_periods, cfg, nullptr);
}

double leakage(const MixedCanonicalState& state, const ScheduleSegment& seg) {
    const int chi = state.chi(), d = state.d();
    const MatrixXcd& h = seg.two_site;

    const MatrixXcd VL = null_space(state.A_L);  // d chi x (d-1) chi

    // right null space K with K K^dag = 1 and K (merged A_R)^dag = 0
    MatrixXcd Mr(chi, d * chi);
    for (int s = 0; s < d; ++s) Mr.middleCols(s * chi, chi) = state.A_R.m[s];
    Eigen::HouseholderQR<MatrixXcd> qr(Mr.adjoint());
    const MatrixXcd Qfull = qr.householderQ() * MatrixXcd::Identity(d * chi, d * chi);
    const MatrixXcd K = Qfull.rightCols((d - 1) * chi).adjoint();

    MatrixXcd N2 = MatrixXcd::Zero((d - 1) * chi, (d - 1) * chi);
    for (int s1 = 0; s1 < d; ++s1)
        for (int s2 = 0; s2 < d; ++s2) {
            MatrixXcd T = MatrixXcd::Zero(chi, chi);
            for (int t1 = 0; t1 < d; ++t1)
                for (int t2 = 0; t2 < d; ++t2) {
                    const cd c = h(s1 * d + s2, t1 * d + t2);
                    if (c == cd(0)) continue;
                    T.noalias() += c * (state.A_C.m[t1] * state.A_R.m[t2]);
                }
            N2.noalias() += VL.block(s1 * chi, 0, chi, (d - 1) * chi).adjoint() * T *
                            K.middleCols(s2 * chi, chi).adjoint();
        }
    return N2.squaredNorm();
}

}  // namespace poimps
