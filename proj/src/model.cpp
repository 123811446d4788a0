#include "poimps/model.hpp"

#include <Eigen/Eigenvalues>

namespace poimps {

MatrixXcd pauli_x() {
    MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

MatrixXcd pauli_y() {
    MatrixXcd m(2, 2);
    m << 0, cd(0, -1), cd(0, 1), 0;
    return m;
}

MatrixXcd pauli_z() {
    MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

MatrixXcd pauli_id() { return MatrixXcd::Identity(2, 2); }

MatrixXcd kron(const MatrixXcd& A, const MatrixXcd& B) {
    MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

void KickedIsingParams::validate() const {
    if (!(T > 0)) throw std::invalid_argument("KickedIsingParams: period T must be positive");
}

void ScheduleSegment::validate() const {
    if (!(duration > 0)) throw std::invalid_argument("ScheduleSegment: duration must be positive");
    if (two_site.rows() != two_site.cols())
        throw std::invalid_argument("ScheduleSegment: bond term must be square");
    const double herm = (two_site - two_site.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-14)
        throw std::invalid_argument("ScheduleSegment: bond term is not Hermitian");
}

void HamiltonianSchedule::validate() const {
    double sum = 0;
    for (const auto& s : segments) {
        s.validate();
        sum += s.duration;
    }
    if (std::abs(sum - total_period) > 1e-12 * std::max(1.0, total_period))
        throw std::invalid_argument("HamiltonianSchedule: durations do not add up to the period");
}

HamiltonianSchedule kicked_ising(const KickedIsingParams& params) {
    params.validate();
    const MatrixXcd X = pauli_x(), Z = pauli_z(), I = pauli_id();

    ScheduleSegment zz;
    zz.duration = params.T / 2;
    zz.two_site = params.J * kron(Z, Z) + 0.5 * params.h * (kron(Z, I) + kron(I, Z));
    zz.single_site_only = false;

    ScheduleSegment kick;
    kick.duration = params.T / 2;
    kick.two_site = 0.5 * params.g * (kron(X, I) + kron(I, X));
    kick.single_site_only = true;

    HamiltonianSchedule sched;
    sched.segments = {std::move(zz), std::move(kick)};
    sched.total_period = params.T;
    return sched;
}

MatrixXcd segment_unitary_single_site(const ScheduleSegment& seg) {
    if (!seg.single_site_only)
        throw std::invalid_argument("segment_unitary_single_site: segment not flagged single-site");
    const int d = seg.phys_dim();
    const MatrixXcd& h2 = seg.two_site;

    // one-site generator O from h2 = (O x 1 + 1 x O) / 2
    MatrixXcd tr2 = MatrixXcd::Zero(d, d);
    for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t)
            for (int u = 0; u < d; ++u) tr2(s, t) += h2(s * d + u, t * d + u);
    const cd trh = h2.trace();
    MatrixXcd O = (2.0 / d) * tr2 - (trh / double(d * d)) * MatrixXcd::Identity(d, d);

    MatrixXcd connected = h2 - 0.5 * (kron(O, MatrixXcd::Identity(d, d)) +
                                      kron(MatrixXcd::Identity(d, d), O));
    if (connected.cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("segment_unitary_single_site: genuine two-site content");

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(O);
    const VectorXd w = es.eigenvalues();
    MatrixXcd phase = MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) phase(i, i) = std::exp(cd(0, -seg.duration * w(i)));
    return es.eigenvectors() * phase * es.eigenvectors().adjoint();
}

}  // namespace poimps
