#include "qkd/qsim.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qkd {

namespace {

double hermitian_residue(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void check_dims_match(int a, int b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
}

} // namespace

StateVector::StateVector(int n_qubits, CVector amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits < 0 || n_qubits > kMaxStateQubits)
        throw std::invalid_argument("StateVector: register size out of range");
    if (amps_.size() != (int64_t(1) << n_qubits))
        throw std::invalid_argument("StateVector: amplitude count != 2^n");
    if (std::abs(amps_.squaredNorm() - 1.0) > kConstructionTol)
        throw std::invalid_argument("StateVector: norm deviates from 1 beyond tolerance");
}

HermitianOp::HermitianOp(CMatrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) throw std::invalid_argument("HermitianOp: not square");
    if (mat_.rows() > kMaxDensityDim) throw std::invalid_argument("HermitianOp: dimension cap");
    if (hermitian_residue(mat_) > kConstructionTol)
        throw std::invalid_argument("HermitianOp: not Hermitian within tolerance");
}

double HermitianOp::projector_residue() const {
    return (mat_ * mat_ - mat_).cwiseAbs().maxCoeff();
}

DensityOperator::DensityOperator(CMatrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols()) throw std::invalid_argument("DensityOperator: not square");
    if (mat_.rows() > kMaxDensityDim)
        throw std::invalid_argument("DensityOperator: dimension cap exceeded");
    if (hermitian_residue(mat_) > kConstructionTol)
        throw std::invalid_argument("DensityOperator: not Hermitian within tolerance");
    if (std::abs(mat_.trace().real() - 1.0) > kConstructionTol ||
        std::abs(mat_.trace().imag()) > kConstructionTol)
        throw std::invalid_argument("DensityOperator: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -10 * kVerifyTol)
        throw std::invalid_argument("DensityOperator: negative eigenvalue beyond tolerance");
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
    return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
    return DensityOperator(CMatrix::Identity(dim, dim) / double(dim));
}

Pvm::Pvm(std::vector<std::pair<std::string, HermitianOp>> elements)
    : elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("Pvm: no elements");
    const int d = elements_.front().second.dim();
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& [label, op] : elements_) {
        check_dims_match(op.dim(), d, "Pvm");
        if (!op.is_projector())
            throw std::invalid_argument("Pvm: element '" + label + "' fails the projector check");
        sum += op.matrix();
    }
    for (size_t i = 0; i < elements_.size(); ++i)
        for (size_t j = i + 1; j < elements_.size(); ++j) {
            double residue =
                (elements_[i].second.matrix() * elements_[j].second.matrix()).cwiseAbs().maxCoeff();
            if (residue > kVerifyTol)
                throw std::invalid_argument("Pvm: elements '" + elements_[i].first + "' and '" +
                                            elements_[j].first + "' are not orthogonal");
        }
    if ((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kVerifyTol)
        throw std::invalid_argument("Pvm: elements do not sum to the identity");
}

int Pvm::dim() const { return elements_.front().second.dim(); }

StateVector prepare_bb84_qubit(int bit, Basis basis) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("prepare_bb84_qubit: bit must be 0/1");
    CVector amps(2);
    const double r = 1.0 / std::sqrt(2.0);
    if (basis == Basis::plus)
        amps << (bit == 0 ? 1.0 : 0.0), (bit == 1 ? 1.0 : 0.0);
    else
        amps << r, (bit == 0 ? r : -r);
    return StateVector(1, amps);
}

StateVector conjugate_basis_state(const BitString& z) {
    const int n = z.size();
    if (n > kMaxStateQubits) throw std::invalid_argument("conjugate_basis_state: register too large");
    const int64_t dim = int64_t(1) << n;
    const double scale = std::pow(2.0, -0.5 * n);
    const uint64_t zi = z.to_index();
    CVector amps(dim);
    for (int64_t x = 0; x < dim; ++x) {
        int parity = std::popcount(uint64_t(x) & zi) & 1;
        amps[x] = parity ? -scale : scale;
    }
    return StateVector(n, amps);
}

HermitianOp hamming_ball_projector(const BitString& center, int radius) {
    const int n = center.size();
    if (n > kMaxStateQubits)
        throw std::invalid_argument("hamming_ball_projector: register too large");
    if (radius < 0 || radius > n)
        throw std::invalid_argument("hamming_ball_projector: radius out of range");

    const int64_t dim = int64_t(1) << n;
    std::vector<uint64_t> centers;
    for (uint64_t s = 0; s < uint64_t(dim); ++s)
        if (std::popcount(s) <= radius) centers.push_back(center.to_index() ^ s);

    CMatrix v(dim, int64_t(centers.size()));
    for (size_t c = 0; c < centers.size(); ++c) {
        const StateVector conj = conjugate_basis_state(BitString::from_index(centers[c], n));
        v.col(int64_t(c)) = conj.amplitudes();
    }
    return HermitianOp(v * v.adjoint());
}

Pvm computational_pvm(int n_qubits) {
    const int64_t dim = int64_t(1) << n_qubits;
    std::vector<std::pair<std::string, HermitianOp>> elements;
    for (int64_t x = 0; x < dim; ++x) {
        CMatrix e = CMatrix::Zero(dim, dim);
        e(x, x) = 1.0;
        elements.emplace_back(BitString::from_index(uint64_t(x), n_qubits).to_string(),
                              HermitianOp(std::move(e)));
    }
    return Pvm(std::move(elements));
}

MeasureOutcome measure(const DensityOperator& state, const Pvm& pvm, uint64_t seed) {
    check_dims_match(state.dim(), pvm.dim(), "measure");

    std::vector<double> probs(size_t(pvm.size()));
    double total = 0.0;
    for (int i = 0; i < pvm.size(); ++i) {
        std::complex<double> tr = (pvm.element(i).matrix() * state.matrix()).trace();
        double p = std::max(0.0, tr.real());
        probs[size_t(i)] = p;
        total += p;
    }
    if (total <= kVerifyTol)
        throw std::runtime_error("measure: all outcome probabilities numerically zero");

    Rng rng(derive_seed(seed, 0x6d656173));
    const double u = rng.next_unit() * total;
    double acc = 0.0;
    int pick = pvm.size() - 1;
    for (int i = 0; i < pvm.size(); ++i) {
        acc += probs[size_t(i)];
        if (u < acc) {
            pick = i;
            break;
        }
    }

    const CMatrix& e = pvm.element(pick).matrix();
    CMatrix post = e * state.matrix() * e;
    post /= post.trace().real();
    return MeasureOutcome{pvm.label(pick), pick, DensityOperator(std::move(post))};
}

double expectation(const DensityOperator& state, const HermitianOp& op) {
    check_dims_match(state.dim(), op.dim(), "expectation");
    std::complex<double> tr = (state.matrix() * op.matrix()).trace();
    if (std::abs(tr.imag()) > kWarnTol)
        throw std::runtime_error("expectation: imaginary residue exceeds tolerance");
    return tr.real();
}

DensityOperator partial_trace(const DensityOperator& state, const std::vector<int>& dims,
                              const std::vector<bool>& keep) {
    if (dims.size() != keep.size())
        throw std::invalid_argument("partial_trace: dims/keep size mismatch");
    int64_t prod = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("partial_trace: bad factor dimension");
        prod *= d;
    }
    check_dims_match(int(prod), state.dim(), "partial_trace");

    int64_t kept_dim = 1, traced_dim = 1;
    for (size_t f = 0; f < dims.size(); ++f)
        (keep[f] ? kept_dim : traced_dim) *= dims[f];

    // strides, fastest-varying factor last
    const size_t nf = dims.size();
    std::vector<int64_t> stride(nf);
    int64_t s = 1;
    for (size_t f = nf; f-- > 0;) {
        stride[f] = s;
        s *= dims[f];
    }

    // enumerate kept and traced multi-indices as flat offsets
    std::vector<int64_t> kept_offsets, traced_offsets;
    kept_offsets.reserve(size_t(kept_dim));
    traced_offsets.reserve(size_t(traced_dim));
    for (int64_t k = 0; k < kept_dim; ++k) {
        int64_t rem = k, off = 0;
        for (size_t f = nf; f-- > 0;) {
            if (!keep[f]) continue;
            off += (rem % dims[f]) * stride[f];
            rem /= dims[f];
        }
        kept_offsets.push_back(off);
    }
    for (int64_t t = 0; t < traced_dim; ++t) {
        int64_t rem = t, off = 0;
        for (size_t f = nf; f-- > 0;) {
            if (keep[f]) continue;
            off += (rem % dims[f]) * stride[f];
            rem /= dims[f];
        }
        traced_offsets.push_back(off);
    }

    CMatrix out = CMatrix::Zero(kept_dim, kept_dim);
    for (int64_t i = 0; i < kept_dim; ++i)
        for (int64_t j = 0; j < kept_dim; ++j) {
            std::complex<double> acc = 0.0;
            for (int64_t t = 0; t < traced_dim; ++t)
                acc += state.matrix()(kept_offsets[size_t(i)] + traced_offsets[size_t(t)],
                                      kept_offsets[size_t(j)] + traced_offsets[size_t(t)]);
            out(i, j) = acc;
        }
    return DensityOperator(std::move(out));
}

BoundCheck verify_projection_perturbation(const DensityOperator& rho, const HermitianOp& p,
                                          const HermitianOp& q) {
    check_dims_match(rho.dim(), p.dim(), "verify_projection_perturbation");
    check_dims_match(rho.dim(), q.dim(), "verify_projection_perturbation");
    if (!p.is_projector() || !q.is_projector())
        throw std::invalid_argument("verify_projection_perturbation: inputs fail projector check");

    const CMatrix& pm = p.matrix();
    const double direct = (rho.matrix() * q.matrix()).trace().real();
    const double pinched = (rho.matrix() * pm * q.matrix() * pm).trace().real();
    const double escape =
        std::max(0.0, (rho.matrix() * (CMatrix::Identity(rho.dim(), rho.dim()) - pm))
                          .trace()
                          .real());

    BoundCheck r;
    r.lhs = std::abs(direct - pinched);
    r.rhs = 3.0 * std::sqrt(escape);
    r.holds = r.lhs <= r.rhs + kVerifyTol;
    return r;
}

DensityOperator random_density(int dim, int rank, Rng& rng) {
    if (rank < 1 || rank > dim) throw std::invalid_argument("random_density: bad rank");
    CMatrix g(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j)
            g(i, j) = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    // round away the tiny anti-Hermitian residue of the product
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    return DensityOperator(std::move(rho));
}

HermitianOp random_projector(int dim, int rank, Rng& rng) {
    if (rank < 0 || rank > dim) throw std::invalid_argument("random_projector: bad rank");
    if (rank == 0) return HermitianOp(CMatrix::Zero(dim, dim));
    CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            g(i, j) = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix qfull = qr.householderQ();
    CMatrix v = qfull.leftCols(rank);
    CMatrix p = v * v.adjoint();
    p = ((p + p.adjoint()) / 2.0).eval();
    return HermitianOp(std::move(p));
}

namespace {

BoundCheck perturbation_instance(int dim_min, int dim_max, uint64_t seed) {
    Rng rng(seed);
    const int dim = dim_min + int(rng.next_below(uint64_t(dim_max - dim_min + 1)));
    const int rho_rank = 1 + int(rng.next_below(uint64_t(dim)));
    const int p_rank = 1 + int(rng.next_below(uint64_t(dim)));
    const int q_rank = int(rng.next_below(uint64_t(dim) + 1));
    DensityOperator rho = random_density(dim, rho_rank, rng);
    HermitianOp p = random_projector(dim, p_rank, rng);
    HermitianOp q = random_projector(dim, q_rank, rng);
    return verify_projection_perturbation(rho, p, q);
}

} // namespace

PerturbationSweepReport run_perturbation_sweep(int instances, int dim_min, int dim_max,
                                               uint64_t seed) {
    PerturbationSweepReport rep;
    rep.instances = instances;
    int violations = 0;
    double max_ratio = 0.0, max_lhs = 0.0;
#pragma omp parallel for reduction(+ : violations) reduction(max : max_ratio, max_lhs) \
    schedule(dynamic, 16)
    for (int i = 0; i < instances; ++i) {
        BoundCheck c = perturbation_instance(dim_min, dim_max, derive_seed(seed, uint64_t(i)));
        if (!c.holds) ++violations;
        if (c.rhs > 1e-12) max_ratio = std::max(max_ratio, c.lhs / c.rhs);
        max_lhs = std::max(max_lhs, c.lhs);
    }
    rep.violations = violations;
    rep.max_ratio = max_ratio;
    rep.max_lhs = max_lhs;
    return rep;
}

PerturbationSweepReport run_perturbation_sweep_serial(int instances, int dim_min, int dim_max,
                                                      uint64_t seed) {
    PerturbationSweepReport rep;
    rep.instances = instances;
    for (int i = 0; i < instances; ++i) {
        BoundCheck c = perturbation_instance(dim_min, dim_max, derive_seed(seed, uint64_t(i)));
        if (!c.holds) ++rep.violations;
        if (c.rhs > 1e-12) rep.max_ratio = std::max(rep.max_ratio, c.lhs / c.rhs);
        rep.max_lhs = std::max(rep.max_lhs, c.lhs);
    }
    return rep;
}

} // namespace qkd
