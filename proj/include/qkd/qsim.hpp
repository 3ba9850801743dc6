// Dense complex-vector and density-matrix simulation for small registers:
// BB84 state preparation, conjugate-basis measurements, Hamming-ball
// projectors, and the projection-perturbation inequality verifier.
//
// Tolerance hierarchy: construction invariants at 1e-10, verification
// comparisons at 1e-9, user-facing warnings at 1e-6.

#ifndef QKD_QSIM_HPP
#define QKD_QSIM_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "qkd/bitstring.hpp"
#include "qkd/rng.hpp"

namespace qkd {

inline constexpr double kConstructionTol = 1e-10;
inline constexpr double kVerifyTol = 1e-9;
inline constexpr double kWarnTol = 1e-6;

inline constexpr int kMaxStateQubits = 12;  // vector dim cap 2^12
inline constexpr int kMaxDensityDim = 4096;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class Basis { plus, times };

class StateVector {
public:
    StateVector(int n_qubits, CVector amplitudes);

    int n_qubits() const { return n_qubits_; }
    int dim() const { return int(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }

private:
    int n_qubits_;
    CVector amps_;
};

class HermitianOp {
public:
    HermitianOp(CMatrix m); // checks hermiticity at construction tolerance

    int dim() const { return int(mat_.rows()); }
    const CMatrix& matrix() const { return mat_; }

    // max |P^2 - P| entry
    double projector_residue() const;
    bool is_projector(double tol = kVerifyTol) const { return projector_residue() <= tol; }

private:
    CMatrix mat_;
};

class DensityOperator {
public:
    // checks hermiticity, unit trace, and positivity at construction
    DensityOperator(CMatrix m);

    static DensityOperator pure(const StateVector& psi);
    static DensityOperator maximally_mixed(int dim);

    int dim() const { return int(mat_.rows()); }
    const CMatrix& matrix() const { return mat_; }

private:
    CMatrix mat_;
};

// projection valued measure: orthogonal projectors summing to the identity
class Pvm {
public:
    Pvm(std::vector<std::pair<std::string, HermitianOp>> elements);

    int dim() const;
    int size() const { return int(elements_.size()); }
    const std::string& label(int i) const { return elements_.at(size_t(i)).first; }
    const HermitianOp& element(int i) const { return elements_.at(size_t(i)).second; }

private:
    std::vector<std::pair<std::string, HermitianOp>> elements_;
};

// |0>,|1> in the + basis; (|0> +/- |1>)/sqrt(2) in the x basis
StateVector prepare_bb84_qubit(int bit, Basis basis);

// |z-bar> = H^{(x)n} |z>; amplitudes 2^{-n/2} (-1)^{x.z}
StateVector conjugate_basis_state(const BitString& z);

// projector onto conjugate-basis states within the given Hamming radius of
// the center string; rank = sum_{k<=radius} C(n,k)
HermitianOp hamming_ball_projector(const BitString& center, int radius);

// computational-basis PVM on n qubits, labels are bitstring text
Pvm computational_pvm(int n_qubits);

struct MeasureOutcome {
    std::string label;
    int index = 0;
    DensityOperator post_state;
};

// Born-rule sample: outcome with probability tr(E rho), post state
// E rho E / tr(E rho E)
MeasureOutcome measure(const DensityOperator& state, const Pvm& pvm, uint64_t seed);

// tr(rho . op); throws if the imaginary residue exceeds the warning tolerance
double expectation(const DensityOperator& state, const HermitianOp& op);

// reduced state on the factors with keep[i] set; dims are the tensor factor
// dimensions, fastest-varying factor last
DensityOperator partial_trace(const DensityOperator& state, const std::vector<int>& dims,
                              const std::vector<bool>& keep);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// lhs = |tr(rho Q) - tr(rho PQP)|, rhs = 3 sqrt(tr(rho (1-P))),
// holds = lhs <= rhs + 1e-9; inputs must pass the projector check
BoundCheck verify_projection_perturbation(const DensityOperator& rho, const HermitianOp& p,
                                          const HermitianOp& q);

// random instances for sweeps
DensityOperator random_density(int dim, int rank, Rng& rng);
HermitianOp random_projector(int dim, int rank, Rng& rng);

struct PerturbationSweepReport {
    int instances = 0;
    int violations = 0;
    double max_ratio = 0.0; // max lhs/rhs over instances with rhs > 1e-12
    double max_lhs = 0.0;
};

// random (rho, P, Q) instances with dims in [dim_min, dim_max]; OpenMP
// kernel plus a serial reference producing identical statistics
PerturbationSweepReport run_perturbation_sweep(int instances, int dim_min, int dim_max,
                                               uint64_t seed);
PerturbationSweepReport run_perturbation_sweep_serial(int instances, int dim_min, int dim_max,
                                                      uint64_t seed);

} // namespace qkd

#endif
