#include "poimps/imps.hpp"

#include <random>

namespace poimps {

namespace {

VectorXcd vec(const MatrixXcd& M) {
    return Eigen::Map<const VectorXcd>(M.data(), M.size());
}

MatrixXcd unvec(const VectorXcd& v, int rows, int cols) {
    return Eigen::Map<const MatrixXcd>(v.data(), rows, cols);
}

double uniform_pm1(std::mt19937_64& eng) {
    return 2.0 * ((eng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
}

MatrixXcd random_gauge(std::mt19937_64& eng, int chi) {
    MatrixXcd M(chi, chi);
    for (int j = 0; j < chi; ++j)
        for (int i = 0; i < chi; ++i) {
            const double re = uniform_pm1(eng), im = uniform_pm1(eng);
            M(i, j) = cd(re, im);
        }
    return M;
}

/// Dominant eigenvalue of the mixed transfer matrix, dense for small bond
/// dimensions and Arnoldi on the left action above.
cd tm_dominant_value(const MpsTensor& A, const MpsTensor& B, const MatrixXcd* guess = nullptr) {
    if (A.d != B.d) throw std::invalid_argument("transfer matrix: physical dimension mismatch");
    const int dim = A.chi_l * B.chi_l;
    if (dim <= 64) {
        MatrixXcd tm = MatrixXcd::Zero(dim, dim);
        for (int s = 0; s < A.d; ++s) {
            const MatrixXcd ac = A.m[s].conjugate();
            for (int i = 0; i < A.chi_l; ++i)
                for (int j = 0; j < A.chi_r; ++j)
                    tm.block(i * B.chi_l, j * B.chi_r, B.chi_l, B.chi_r) += ac(i, j) * B.m[s];
        }
        return eigenvalues_by_magnitude(tm)[0];
    }
    auto apply = [&](const VectorXcd& v, VectorXcd& out) {
        out = vec(tm_left_apply(A, B, unvec(v, A.chi_l, B.chi_l)));
    };
    VectorXcd g;
    if (guess) g = vec(*guess);
    return dominant_eig(apply, dim, 1e-15, guess ? &g : nullptr, false).value;
}

}  // namespace

MatrixXcd MpsTensor::merged_left() const {
    MatrixXcd M(d * chi_l, chi_r);
    for (int s = 0; s < d; ++s) M.block(s * chi_l, 0, chi_l, chi_r) = m[s];
    return M;
}

MpsTensor& MpsTensor::operator+=(const MpsTensor& o) {
    for (int s = 0; s < d; ++s) m[s] += o.m[s];
    return *this;
}

MpsTensor& MpsTensor::operator*=(cd a) {
    for (int s = 0; s < d; ++s) m[s] *= a;
    return *this;
}

double MpsTensor::frobenius_norm() const {
    double acc = 0;
    for (const auto& ms : m) acc += ms.squaredNorm();
    return std::sqrt(acc);
}

MpsTensor random_tensor(int chi, int d, unsigned long long seed) {
    if (chi < 1 || d < 2) throw std::invalid_argument("random_tensor: need chi >= 1, d >= 2");
    std::mt19937_64 eng(seed);
    MpsTensor A(chi, d, chi);
    for (int i = 0; i < chi; ++i)
        for (int s = 0; s < d; ++s)
            for (int j = 0; j < chi; ++j) {
                const double re = uniform_pm1(eng), im = uniform_pm1(eng);
                A.m[s](i, j) = cd(re, im);
            }
    return A;
}

TransferMatrix transfer_matrix(const MpsTensor& A, const MpsTensor& B) {
    if (A.d != B.d) throw std::invalid_argument("transfer_matrix: physical dimension mismatch");
    TransferMatrix tm;
    tm.chi_i = A.chi_l;
    tm.chi_j = B.chi_l;
    const int dim = A.chi_l * B.chi_l;
    tm.matrix = MatrixXcd::Zero(dim, dim);
    for (int s = 0; s < A.d; ++s) {
        const MatrixXcd ac = A.m[s].conjugate();
        for (int i = 0; i < A.chi_l; ++i)
            for (int j = 0; j < A.chi_r; ++j)
                tm.matrix.block(i * B.chi_l, j * B.chi_r, B.chi_l, B.chi_r) += ac(i, j) * B.m[s];
    }
    return tm;
}

MatrixXcd tm_left_apply(const MpsTensor& A, const MpsTensor& B, const MatrixXcd& l) {
    MatrixXcd out = MatrixXcd::Zero(A.chi_r, B.chi_r);
    for (int s = 0; s < A.d; ++s) out.noalias() += A.m[s].adjoint() * l * B.m[s];
    return out;
}

MatrixXcd tm_right_apply(const MpsTensor& A, const MpsTensor& B, const MatrixXcd& r) {
    MatrixXcd out = MatrixXcd::Zero(B.chi_l, A.chi_l);
    for (int s = 0; s < A.d; ++s) out.noalias() += B.m[s] * r * A.m[s].adjoint();
    return out;
}

double state_norm_sq(const MpsTensor& A) { return std::abs(tm_dominant_value(A, A)); }

MpsTensor normalized(const MpsTensor& A) {
    const double rho = state_norm_sq(A);
    if (rho <= 0) throw std::invalid_argument("normalized: zero tensor");
    MpsTensor out = A;
    out *= cd(1.0 / std::sqrt(rho), 0);
    return out;
}

double fidelity_density(const MpsTensor& A, const MpsTensor& B) {
    return std::abs(tm_dominant_value(A, B));
}

double second_tm_eigenvalue(const MpsTensor& A) {
    if (A.chi_l == 1) return 0.0;
    const auto ev = eigenvalues_by_magnitude(transfer_matrix(A, A).matrix);
    return std::abs(ev[1]);
}

namespace {

struct QrStepResult {
    MpsTensor A_L;
    MatrixXcd R;
};

QrStepResult qr_gauge_step(const MatrixXcd& L, const MpsTensor& A) {
    const int chi = A.chi_l;
    MpsTensor LA(chi, A.d, chi);
    for (int s = 0; s < A.d; ++s) LA.m[s].noalias() = L * A.m[s];
    GaugedQr qr = gauged_qr(LA.merged_left());
    QrStepResult out;
    out.A_L = MpsTensor(chi, A.d, chi);
    for (int s = 0; s < A.d; ++s) out.A_L.m[s] = qr.Q.block(s * chi, 0, chi, chi);
    out.R = std::move(qr.R);
    return out;
}

}  // namespace

LeftOrthoResult left_orthonormalize(const MpsTensor& A_in, const MatrixXcd& L0, double eta) {
    const int chi = A_in.chi_l;
    if (A_in.chi_r != chi) throw std::invalid_argument("left_orthonormalize: uniform tensor required");
    const MpsTensor A = normalized(A_in);

    MatrixXcd L = (L0.rows() == chi && L0.cols() == chi) ? L0 : MatrixXcd::Identity(chi, chi);
    if (L.norm() == 0) L = MatrixXcd::Identity(chi, chi);
    L /= L.norm();

    MatrixXcd L_old = L;
    QrStepResult step;
    try {
        step = qr_gauge_step(L, A);
    } catch (const DegenerateInputError&) {
        throw CanonicalizationStall("left_orthonormalize: rank-deficient gauge");
    }
    L = step.R / step.R.norm();
    double delta = (L - L_old).norm();

    double best = delta;
    int stagnant = 0;
    for (int iter = 0; delta > eta; ++iter) {
        if (iter >= 100) throw CanonicalizationStall("left_orthonormalize: iteration cap");
        try {
            // refine the gauge with the dominant fixed point of X -> sum (A_L^s)^dag X A^s
            auto apply = [&](const VectorXcd& v, VectorXcd& out) {
                out = vec(tm_left_apply(step.A_L, A, unvec(v, chi, chi)));
            };
            const VectorXcd guess = vec(L);
            const DominantEig de =
                dominant_eig(apply, chi * chi, std::max(delta / 10, 1e-15), &guess);
            L = gauged_qr(unvec(de.vector, chi, chi)).R;
            L /= L.norm();
            L_old = L;
            step = qr_gauge_step(L, A);
        } catch (const DegenerateInputError&) {
            throw CanonicalizationStall("left_orthonormalize: rank-deficient gauge");
        } catch (const EigensolverError&) {
            throw CanonicalizationStall("left_orthonormalize: fixed-point eigensolver failed");
        }
        L = step.R / step.R.norm();
        delta = (L - L_old).norm();
        if (delta < 0.5 * best) {
            best = delta;
            stagnant = 0;
        } else if (++stagnant >= 3) {
            if (delta <= 1e-12) break;  // conditioning floor, accept
            throw CanonicalizationStall("left_orthonormalize: gauge iteration stagnated");
        }
    }
    return {std::move(step.A_L), std::move(L)};
}

MpsTensor spatial_inversion(const MpsTensor& A) {
    MpsTensor out(A.chi_r, A.d, A.chi_l);
    for (int s = 0; s < A.d; ++s) out.m[s] = A.m[s].transpose();
    return out;
}

RightOrthoResult right_orthonormalize(const MpsTensor& A, const MatrixXcd& R0, double eta) {
    const LeftOrthoResult lo = left_orthonormalize(spatial_inversion(A), R0.transpose(), eta);
    return {spatial_inversion(lo.A_L), lo.L.transpose()};
}

namespace {

MixedCanonicalState assemble_mixed(const MpsTensor& AL0, const MpsTensor& AR0, const MatrixXcd& C0) {
    const int chi = AL0.chi_l;
    GaugedSvd sv = gauged_svd(C0);
    VectorXd S = sv.S;
    S /= S.norm();

    MixedCanonicalState st;
    st.A_L = MpsTensor(chi, AL0.d, chi);
    st.A_R = MpsTensor(chi, AL0.d, chi);
    st.A_C = MpsTensor(chi, AL0.d, chi);
    st.C = MatrixXcd::Zero(chi, chi);
    st.C.diagonal() = S.cast<cd>();
    for (int s = 0; s < AL0.d; ++s) {
        st.A_L.m[s].noalias() = sv.U.adjoint() * AL0.m[s] * sv.U;
        st.A_R.m[s].noalias() = sv.V.adjoint() * AR0.m[s] * sv.V;
        st.A_C.m[s].noalias() = st.A_L.m[s] * st.C;
    }
    st.schmidt_ill_conditioned = S(chi - 1) / S(0) < 1e-12;
    return st;
}

template <typename F>
auto with_gauge_restarts(int chi, F&& attempt) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    for (int k = 0; k < 3; ++k) {
        try {
            return attempt(k == 0 ? MatrixXcd(MatrixXcd::Identity(chi, chi)) : random_gauge(rng, chi));
        } catch (const CanonicalizationStall&) {
        }
    }
    return attempt(random_gauge(rng, chi));  // last try propagates the stall
}

}  // namespace

MixedCanonicalState mixed_canonical(const MpsTensor& A, double eta) {
    const int chi = A.chi_l;
    const LeftOrthoResult lo = with_gauge_restarts(
        chi, [&](const MatrixXcd& g) { return left_orthonormalize(A, g, eta); });
    const RightOrthoResult ro = with_gauge_restarts(
        chi, [&](const MatrixXcd& g) { return right_orthonormalize(lo.A_L, g, eta); });
    return assemble_mixed(lo.A_L, ro.A_R, ro.R);
}

MixedCanonicalState mixed_canonical_from_left(const MpsTensor& A_L, const MatrixXcd& C0,
                                              double eta) {
    const int chi = A_L.chi_l;
    MatrixXcd gram = MatrixXcd::Zero(chi, chi);
    for (int s = 0; s < A_L.d; ++s) gram.noalias() += A_L.m[s].adjoint() * A_L.m[s];
    if ((gram - MatrixXcd::Identity(chi, chi)).cwiseAbs().maxCoeff() > 1e-10)
        return mixed_canonical(A_L, eta);

    bool warm = C0.rows() == chi && C0.cols() == chi;
    const RightOrthoResult ro = with_gauge_restarts(chi, [&](const MatrixXcd& g) {
        const MatrixXcd r0 = warm ? C0 : g;
        warm = false;  // fall back to fresh gauges on restart
        return right_orthonormalize(A_L, r0, eta);
    });
    return assemble_mixed(A_L, ro.A_R, ro.R);
}

MixedCanonicalState regauge_diagonal(const MixedCanonicalState& state) {
    return assemble_mixed(state.A_L, state.A_R, state.C);
}

double entanglement_entropy(const MixedCanonicalState& state) {
    const VectorXd c = state.schmidt();
    const double total = c.squaredNorm();
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("entanglement_entropy: unnormalized Schmidt spectrum");
    double S = 0;
    for (int i = 0; i < c.size(); ++i) {
        const double p = c(i) * c(i);
        if (p > 0) S -= p * std::log(p);
    }
    return S;
}

cd expectation(const MixedCanonicalState& state, const MatrixXcd& op) {
    const int d = state.d();
    if (op.rows() == d && op.cols() == d) {
        cd acc = 0;
        for (int t = 0; t < d; ++t)
            for (int s = 0; s < d; ++s) {
                if (op(t, s) == cd(0)) continue;
                acc += op(t, s) * (state.A_C.m[t].adjoint() * state.A_C.m[s]).trace();
            }
        return acc;
    }
    if (op.rows() == d * d && op.cols() == d * d) {
        cd acc = 0;
        for (int t1 = 0; t1 < d; ++t1)
            for (int t2 = 0; t2 < d; ++t2)
                for (int s1 = 0; s1 < d; ++s1)
                    for (int s2 = 0; s2 < d; ++s2) {
                        const cd o = op(t1 * d + t2, s1 * d + s2);
                        if (o == cd(0)) continue;
                        acc += o * ((state.A_C.m[t1] * state.A_R.m[t2]).adjoint() *
                                    (state.A_C.m[s1] * state.A_R.m[s2]))
                                       .trace();
                    }
        return acc;
    }
    throw std::invalid_argument("expectation: operator must act on one or two sites");
}

}  // namespace poimps
