// Synthetic joint Alice/Eve instances for the listing bound: with Q the
// joint projector that pairs, for each program label and each final-key
// value, Alice's matching computational states with the label's key-value
// projector on Eve's apparatus,
//
//   tr(rho Q) <= |labels| 2^{-m} + 3 sqrt(conjugate-basis tail probability)
//
// checked numerically together with the two identities that feed it: the
// perfect-distinguishability condition (Eve's measurement recovers the final
// key of every supported string exactly) and the classical-coverage identity
// (the expectation of Q equals the probability that Alice's string falls in
// a covered label).
//
// An instance is classical-quantum: Alice's register carries a distribution
// p(x) over {0,1}^n and Eve holds a unit vector confined to the block of
// y = f(x) in a block-structured apparatus space. Each program label owns a
// PVM whose outcome-y element is the y block plus a label-specific slice of
// slack dimensions, so the PVMs differ across labels while the
// distinguishability condition stays exact. Strings are partitioned across
// the covered labels plus one overflow label the projector does not cover,
// which keeps the coverage probability strictly below one.
//
// The conjugate-basis tail probability is evaluated on the canonical
// purification with a Bob register mirroring Alice's computational basis.

#ifndef QKD_SYNTHETIC_HPP
#define QKD_SYNTHETIC_HPP

#include <string>
#include <vector>

#include "qkd/lincode.hpp"
#include "qkd/qsim.hpp"

namespace qkd {

inline constexpr int kMaxSyntheticQubits = 6;
inline constexpr int kMaxJointDim = 128;

class SyntheticSecurityInstance {
public:
    const LinearCode& code() const { return code_; }
    int n_alice() const { return code_.n(); }
    int alice_dim() const { return 1 << code_.n(); }
    int eve_dim() const { return eve_dim_; }

    const std::vector<std::string>& program_labels() const { return labels_; }
    // label index per string x; labels_.size() marks the overflow label
    const std::vector<int>& assignment() const { return assignment_; }

    const std::vector<double>& alice_probs() const { return p_; }
    const std::vector<CVector>& eve_vectors() const { return eve_vecs_; }

    const Pvm& pvm(int t) const { return pvms_.at(size_t(t)); }
    // diagonal projector onto the strings assigned to label t with f(x) = y
    const HermitianOp& coset_projector(int t, int y) const;

    const DensityOperator& joint_state() const { return joint_holder_.front(); }

    // true when the builder guarantees that every label's PVM identifies
    // f(x) exactly on Eve's conditional vectors
    bool exact_distinguishability() const { return exact_distinguishability_; }

    // sum over covered labels and key values of
    // (Alice coset projector) tensor (Eve outcome projector)
    HermitianOp listing_projector() const;

    // max |tr(E rho_x) - [f(x) = y]| over labels, key values y, and x
    double distinguishability_residue() const;

    // classical coverage probability Pr(x in union of the L-label sets)
    double classical_coverage() const;

private:
    friend SyntheticSecurityInstance build_synthetic_instance(const LinearCode&, uint64_t, int);
    friend SyntheticSecurityInstance build_product_instance(const LinearCode&, uint64_t, int);
    friend SyntheticSecurityInstance build_entangled_instance(const LinearCode&, uint64_t, int);

    SyntheticSecurityInstance() = default;
    static SyntheticSecurityInstance build_common(const LinearCode& code, uint64_t seed,
                                                  int program_count, bool shared_eve_vector,
                                                  bool uniform_probs);
    void finalize(); // assembles pvms_, a_ops_, joint_

    LinearCode code_ = LinearCode::trivial(0);
    int eve_dim_ = 0;
    int block_size_ = 1;
    std::vector<std::string> labels_;
    std::vector<int> assignment_;
    std::vector<std::vector<int>> slack_owner_; // per label: owner y of each slack dim
    std::vector<double> p_;
    std::vector<CVector> eve_vecs_;
    std::vector<Pvm> pvms_;
    std::vector<std::vector<HermitianOp>> a_ops_;
    std::vector<DensityOperator> joint_holder_; // single slot, built in finalize
    bool exact_distinguishability_ = false;
};

// Standard instance: distinguishability holds exactly by construction.
SyntheticSecurityInstance build_synthetic_instance(const LinearCode& code, uint64_t seed,
                                                   int program_count);

// Eve uncorrelated with Alice: one shared apparatus vector for every x.
SyntheticSecurityInstance build_product_instance(const LinearCode& code, uint64_t seed,
                                                 int program_count);

// Uniform p(x) with a shared Eve vector; the canonical purification is a
// maximally entangled Alice-Bob pair, so the conjugate tail vanishes.
SyntheticSecurityInstance build_entangled_instance(const LinearCode& code, uint64_t seed,
                                                   int program_count);

struct ListingBoundCheck {
    double lhs = 0.0;   // expectation of the listing projector
    double rhs = 0.0;   // |labels| 2^{-m} + 3 sqrt(tail)
    double tail = 0.0;  // chance of conjugate outcomes farther apart than the radius
    int radius = 0;
    bool holds = false;
};

// radius = floor(n * radius_fraction); requires 2*radius < d(C)
ListingBoundCheck verify_listing_bound(const SyntheticSecurityInstance& instance,
                                       double radius_fraction);

struct ListingSweepReport {
    int instances = 0;
    int violations = 0;
    double max_distinguishability_residue = 0.0;
    double max_projector_residue = 0.0;
    double max_coverage_residue = 0.0;
    double max_ratio = 0.0; // lhs/rhs tightness, 1 means the bound is met with equality
};

// Random mixed sweep over feasible code shapes (n <= 4). OpenMP kernel plus
// a serial reference with identical statistics.
ListingSweepReport run_listing_sweep(int instances, uint64_t seed);
ListingSweepReport run_listing_sweep_serial(int instances, uint64_t seed);

} // namespace qkd

#endif
