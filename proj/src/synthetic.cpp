#include "qkd/synthetic.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qkd {

const HermitianOp& SyntheticSecurityInstance::coset_projector(int t, int y) const {
    return a_ops_.at(size_t(t)).at(size_t(y));
}

void SyntheticSecurityInstance::finalize() {
    const int n = code_.n();
    const int m = code_.m();
    const int adim = 1 << n;
    const int ydim = 1 << m;

    // per-label PVMs: block projector for y plus the label's slack slice
    pvms_.clear();
    for (size_t t = 0; t < labels_.size(); ++t) {
        std::vector<std::pair<std::string, HermitianOp>> elements;
        for (int y = 0; y < ydim; ++y) {
            CMatrix e = CMatrix::Zero(eve_dim_, eve_dim_);
            for (int b = 0; b < block_size_; ++b) e(y * block_size_ + b, y * block_size_ + b) = 1.0;
            for (size_t s = 0; s < slack_owner_[t].size(); ++s)
                if (slack_owner_[t][s] == y) {
                    int d = ydim * block_size_ + int(s);
                    e(d, d) = 1.0;
                }
            elements.emplace_back(BitString::from_index(uint64_t(y), m).to_string(),
                                  HermitianOp(std::move(e)));
        }
        pvms_.push_back(Pvm(std::move(elements)));
    }

    // A_t(y): diagonal on Alice's register
    a_ops_.clear();
    a_ops_.resize(labels_.size());
    for (size_t t = 0; t < labels_.size(); ++t) {
        for (int y = 0; y < ydim; ++y) {
            CMatrix a = CMatrix::Zero(adim, adim);
            for (int x = 0; x < adim; ++x) {
                if (assignment_[size_t(x)] != int(t)) continue;
                BitString xb = BitString::from_index(uint64_t(x), n);
                if (privacy_amplify(code_, xb).to_index() == uint64_t(y)) a(x, x) = 1.0;
            }
            a_ops_[t].push_back(HermitianOp(std::move(a)));
        }
    }

    // rho_AE = sum_x p(x) |x><x| (x) |e_x><e_x|
    CMatrix joint = CMatrix::Zero(int64_t(adim) * eve_dim_, int64_t(adim) * eve_dim_);
    for (int x = 0; x < adim; ++x) {
        if (p_[size_t(x)] == 0.0) continue;
        const CVector& e = eve_vecs_[size_t(x)];
        for (int i = 0; i < eve_dim_; ++i)
            for (int j = 0; j < eve_dim_; ++j)
                joint(int64_t(x) * eve_dim_ + i, int64_t(x) * eve_dim_ + j) =
                    p_[size_t(x)] * e(i) * std::conj(e(j));
    }
    joint_holder_.clear();
    joint_holder_.push_back(DensityOperator(std::move(joint)));
}

HermitianOp SyntheticSecurityInstance::listing_projector() const {
    const int adim = alice_dim();
    const int ydim = 1 << code_.m();
    CMatrix q = CMatrix::Zero(int64_t(adim) * eve_dim_, int64_t(adim) * eve_dim_);
    for (size_t t = 0; t < labels_.size(); ++t) {
        for (int y = 0; y < ydim; ++y) {
            const CMatrix& a = a_ops_[t][size_t(y)].matrix();
            const CMatrix& e = pvms_[t].element(y).matrix();
            for (int x = 0; x < adim; ++x) {
                if (a(x, x).real() < 0.5) continue;
                q.block(int64_t(x) * eve_dim_, int64_t(x) * eve_dim_, eve_dim_, eve_dim_) += e;
            }
        }
    }
    return HermitianOp(std::move(q));
}

double SyntheticSecurityInstance::distinguishability_residue() const {
    const int adim = alice_dim();
    const int ydim = 1 << code_.m();
    double residue = 0.0;
    for (size_t t = 0; t < labels_.size(); ++t) {
        for (int y = 0; y < ydim; ++y) {
            const CMatrix& e = pvms_[t].element(y).matrix();
            for (int x = 0; x < adim; ++x) {
                const CVector& v = eve_vecs_[size_t(x)];
                double prob = (v.adjoint() * e * v)(0).real();
                BitString xb = BitString::from_index(uint64_t(x), code_.n());
                double expected =
                    privacy_amplify(code_, xb).to_index() == uint64_t(y) ? 1.0 : 0.0;
                residue = std::max(residue, std::abs(prob - expected));
            }
        }
    }
    return residue;
}

double SyntheticSecurityInstance::classical_coverage() const {
    double covered = 0.0;
    for (size_t x = 0; x < p_.size(); ++x)
        if (assignment_[x] < int(labels_.size())) covered += p_[x];
    return covered;
}

SyntheticSecurityInstance SyntheticSecurityInstance::build_common(const LinearCode& code,
                                                                  uint64_t seed,
                                                                  int program_count,
                                                                  bool shared_eve_vector,
                                                                  bool uniform_probs) {
    if (code.n() > kMaxSyntheticQubits)
        throw std::invalid_argument("build_synthetic_instance: n exceeds the register budget");
    if (program_count < 1)
        throw std::invalid_argument("build_synthetic_instance: program_count must be >= 1");

    const int n = code.n();
    const int m = code.m();
    const int adim = 1 << n;
    const int ydim = 1 << m;

    Rng rng(derive_seed(seed, 0x73796e));

    SyntheticSecurityInstance inst;
    inst.code_ = code;

    // apparatus: one block per final-key value plus a little slack, capped
    // by the joint-dimension budget
    const int budget = kMaxJointDim / adim;
    if (budget < ydim)
        throw std::invalid_argument("build_synthetic_instance: dimension budget exceeded");
    const int max_block = budget / ydim;
    inst.block_size_ = 1 + int(rng.next_below(uint64_t(std::min(max_block, 2))));
    const int slack_room = budget - ydim * inst.block_size_;
    const int slack = int(rng.next_below(uint64_t(std::min(slack_room, 3)) + 1));
    inst.eve_dim_ = ydim * inst.block_size_ + slack;

    for (int t = 0; t < program_count; ++t) inst.labels_.push_back("t" + std::to_string(t));

    // partition strings over the labels plus one overflow bucket
    inst.assignment_.resize(size_t(adim));
    for (int x = 0; x < adim; ++x)
        inst.assignment_[size_t(x)] = int(rng.next_below(uint64_t(program_count) + 1));

    // per-label ownership of the slack dimensions
    inst.slack_owner_.assign(size_t(program_count), {});
    for (int t = 0; t < program_count; ++t)
        for (int s = 0; s < slack; ++s)
            inst.slack_owner_[size_t(t)].push_back(int(rng.next_below(uint64_t(ydim))));

    // Alice's distribution
    inst.p_.resize(size_t(adim));
    double total = 0.0;
    for (int x = 0; x < adim; ++x) {
        inst.p_[size_t(x)] = uniform_probs ? 1.0 : 0.05 + rng.next_unit();
        total += inst.p_[size_t(x)];
    }
    for (auto& v : inst.p_) v /= total;

    // Eve's conditional vectors
    auto random_block_vector = [&](int y) {
        CVector v = CVector::Zero(inst.eve_dim_);
        for (int b = 0; b < inst.block_size_; ++b)
            v(y * inst.block_size_ + b) =
                std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
        v.normalize();
        return v;
    };

    inst.eve_vecs_.resize(size_t(adim));
    if (shared_eve_vector) {
        CVector shared = random_block_vector(0);
        for (int x = 0; x < adim; ++x) inst.eve_vecs_[size_t(x)] = shared;
    } else {
        for (int x = 0; x < adim; ++x) {
            BitString xb = BitString::from_index(uint64_t(x), n);
            int y = int(privacy_amplify(code, xb).to_index());
            inst.eve_vecs_[size_t(x)] = random_block_vector(y);
        }
    }

    inst.exact_distinguishability_ = !shared_eve_vector;
    inst.finalize();
    return inst;
}

SyntheticSecurityInstance build_synthetic_instance(const LinearCode& code, uint64_t seed,
                                                   int program_count) {
    return SyntheticSecurityInstance::build_common(code, seed, program_count, false, false);
}

SyntheticSecurityInstance build_product_instance(const LinearCode& code, uint64_t seed,
                                                 int program_count) {
    return SyntheticSecurityInstance::build_common(code, seed, program_count, true, false);
}

SyntheticSecurityInstance build_entangled_instance(const LinearCode& code, uint64_t seed,
                                                   int program_count) {
    return SyntheticSecurityInstance::build_common(code, seed, program_count, true, true);
}

ListingBoundCheck verify_listing_bound(const SyntheticSecurityInstance& instance,
                                       double radius_fraction) {
    const int n = instance.n_alice();
    const int adim = instance.alice_dim();
    const int edim = instance.eve_dim();
    const int m = instance.code().m();

    ListingBoundCheck check;
    check.radius = int(std::floor(n * radius_fraction + 1e-12));
    if (check.radius < 0 || 2 * check.radius >= instance.code().min_distance())
        throw std::invalid_argument(
            "verify_listing_bound: ball radius must satisfy 2*radius < d(C)");

    // canonical purification |Psi> = sum_x sqrt(p(x)) |x>_A |x>_B |e_x>_E
    const int64_t dim = int64_t(adim) * adim * edim;
    CVector psi = CVector::Zero(dim);
    for (int x = 0; x < adim; ++x) {
        double amp = std::sqrt(instance.alice_probs()[size_t(x)]);
        if (amp == 0.0) continue;
        const CVector& e = instance.eve_vectors()[size_t(x)];
        const int64_t base = (int64_t(x) * adim + x) * edim;
        for (int k = 0; k < edim; ++k) psi(base + k) = amp * e(k);
    }

    // lhs: expectation of the listing projector on the (A,E) factors,
    // accumulated slice by slice over the Bob index
    const CMatrix q = instance.listing_projector().matrix();
    double lhs = 0.0;
    CVector slice(int64_t(adim) * edim);
    for (int b = 0; b < adim; ++b) {
        for (int a = 0; a < adim; ++a)
            for (int k = 0; k < edim; ++k)
                slice(int64_t(a) * edim + k) = psi((int64_t(a) * adim + b) * edim + k);
        lhs += (slice.adjoint() * q * slice)(0).real();
    }
    check.lhs = lhs;

    // conjugate-basis joint distribution: Hadamard every A and B qubit, then
    // accumulate |amplitude|^2 over the Eve index
    const double r = 1.0 / std::sqrt(2.0);
    CVector hpsi = psi;
    for (int axis = 0; axis < 2; ++axis) {
        // qubit q of axis 0 (A) has stride 2^{n-1-q} * adim * edim; of axis 1
        // (B) stride 2^{n-1-q} * edim
        for (int q = 0; q < n; ++q) {
            const int64_t stride =
                (axis == 0 ? int64_t(adim) * edim : int64_t(edim)) * (int64_t(1) << (n - 1 - q));
            for (int64_t base = 0; base < dim; ++base) {
                if ((base / stride) % 2 != 0) continue;
                const std::complex<double> u = hpsi(base);
                const std::complex<double> v = hpsi(base + stride);
                hpsi(base) = r * (u + v);
                hpsi(base + stride) = r * (u - v);
            }
        }
    }

    double tail = 0.0;
    for (int za = 0; za < adim; ++za)
        for (int zb = 0; zb < adim; ++zb) {
            if (std::popcount(uint64_t(za) ^ uint64_t(zb)) <= check.radius) continue;
            double mass = 0.0;
            for (int k = 0; k < edim; ++k)
                mass += std::norm(hpsi((int64_t(za) * adim + zb) * edim + k));
            tail += mass;
        }
    check.tail = tail;

    check.rhs = double(instance.program_labels().size()) * std::exp2(-m) +
                3.0 * std::sqrt(std::max(0.0, tail));
    check.holds = check.lhs <= check.rhs + kVerifyTol;
    return check;
}

namespace {

struct SweepAccumulator {
    int violations = 0;
    double dist = 0.0, proj = 0.0, cover = 0.0, ratio = 0.0;
};

SweepAccumulator listing_instance(uint64_t seed) {
    Rng rng(seed);

    // feasible (n, m, floor) shapes at n <= 4; floor >= 2 shapes allow a
    // radius-1 ball, the rest run at radius 0
    struct Shape {
        int n, m, floor;
    };
    static const Shape shapes[] = {{2, 1, 0}, {3, 1, 2}, {3, 2, 0}, {4, 1, 3},
                                   {4, 2, 1}, {4, 3, 0}, {3, 1, 1}, {4, 2, 0}};
    const Shape& shape = shapes[rng.next_below(8)];
    LinearCode code = construct_code({shape.n, shape.m, shape.floor}, rng.next_u64(), 2000);

    const int program_count = 1 + int(rng.next_below(3));
    const uint64_t inst_seed = rng.next_u64();

    const uint64_t kind = rng.next_below(4);
    SyntheticSecurityInstance inst =
        kind == 0   ? build_product_instance(code, inst_seed, program_count)
        : kind == 1 ? build_entangled_instance(code, inst_seed, program_count)
                    : build_synthetic_instance(code, inst_seed, program_count);
    const bool standard = inst.exact_distinguishability();

    const int max_radius = (code.min_distance() - 1) / 2;
    const int radius = int(rng.next_below(uint64_t(max_radius) + 1));
    const double fraction = (radius + 0.5) / code.n();

    SweepAccumulator acc;
    if (standard) {
        acc.dist = inst.distinguishability_residue();
        HermitianOp q = inst.listing_projector();
        acc.proj = q.projector_residue();
        acc.cover = std::abs(expectation(inst.joint_state(), q) - inst.classical_coverage());
    }
    ListingBoundCheck check = verify_listing_bound(inst, fraction);
    if (!check.holds) acc.violations = 1;
    if (check.rhs > 1e-12) acc.ratio = check.lhs / check.rhs;
    return acc;
}

} // namespace

ListingSweepReport run_listing_sweep(int instances, uint64_t seed) {
    ListingSweepReport rep;
    rep.instances = instances;
    int violations = 0;
    double dist = 0.0, proj = 0.0, cover = 0.0, ratio = 0.0;
#pragma omp parallel for reduction(+ : violations) reduction(max : dist, proj, cover, ratio) \
    schedule(dynamic, 8)
    for (int i = 0; i < instances; ++i) {
        SweepAccumulator acc = listing_instance(derive_seed(seed, uint64_t(i)));
        violations += acc.violations;
        dist = std::max(dist, acc.dist);
        proj = std::max(proj, acc.proj);
        cover = std::max(cover, acc.cover);
        ratio = std::max(ratio, acc.ratio);
    }
    rep.violations = violations;
    rep.max_distinguishability_residue = dist;
    rep.max_projector_residue = proj;
    rep.max_coverage_residue = cover;
    rep.max_ratio = ratio;
    return rep;
}

ListingSweepReport run_listing_sweep_serial(int instances, uint64_t seed) {
    ListingSweepReport rep;
    rep.instances = instances;
    for (int i = 0; i < instances; ++i) {
        SweepAccumulator acc = listing_instance(derive_seed(seed, uint64_t(i)));
        rep.violations += acc.violations;
        rep.max_distinguishability_residue =
            std::max(rep.max_distinguishability_residue, acc.dist);
        rep.max_projector_residue = std::max(rep.max_projector_residue, acc.proj);
        rep.max_coverage_residue = std::max(rep.max_coverage_residue, acc.cover);
        rep.max_ratio = std::max(rep.max_ratio, acc.ratio);
    }
    return rep;
}

} // namespace qkd
