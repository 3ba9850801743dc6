// BB84 session engine: 2N qubits prepared in random bases, Bob measuring in
// the announced basis, a random N/N test/information split, threshold abort,
// idealized one-time-pad reconciliation with exact key-pool accounting, and
// linear-code privacy amplification. Eavesdropping is pluggable; the
// intercept-resend family is implemented.
//
// Sessions are deterministic: every random draw comes from streams derived
// from the config seed (bits, bases, eve, bob, test split, in that order).

#ifndef QKD_PROTOCOL_HPP
#define QKD_PROTOCOL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkd/algoinfo.hpp"
#include "qkd/lincode.hpp"

namespace qkd {

class PoolExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ChannelMode { per_qubit, joint_statevector };
enum class AttackKind { none, intercept_resend };
enum class BasisPolicy { random_per_qubit, always_plus, always_times };

struct AttackStrategy {
    AttackKind kind = AttackKind::none;
    BasisPolicy policy = BasisPolicy::random_per_qubit;

    static AttackStrategy none() { return {}; }
    static AttackStrategy intercept(BasisPolicy policy) {
        return {AttackKind::intercept_resend, policy};
    }
};

struct ProtocolConfig {
    int n = 0;              // information and test bits each; 2n qubits total
    double p = 0.0;         // error threshold
    double epsilon = 0.0;   // security parameter
    double delta = 0.0;     // randomness-deficiency parameter
    LinearCode code = LinearCode::trivial(0);
    uint64_t seed = 0;
    ChannelMode channel_mode = ChannelMode::per_qubit;
    int reconcile_const = 32;

    // throws std::invalid_argument naming the violated invariant
    void validate() const;
};

class KeyPool {
public:
    explicit KeyPool(int64_t bits);

    int64_t remaining_bits() const { return remaining_; }
    int64_t consumed_bits() const { return consumed_; }

    void debit(int64_t bits); // throws PoolExhausted

private:
    int64_t remaining_;
    int64_t consumed_ = 0;
};

// preshared bits an idealized reconciliation consumes: ceil(n h(p)) + const
int64_t reconcile_cost(int n, double p, int reconcile_const = 32);

struct EveRecord {
    AttackKind kind = AttackKind::none;
    BasisPolicy policy = BasisPolicy::random_per_qubit;
    BitString bases;    // empty unless intercepting
    BitString outcomes; // empty unless intercepting
};

struct ProtocolTranscript {
    uint64_t seed = 0;
    int n = 0;
    BitString basis; // 2n symbols, 0 = '+', 1 = 'x'
    std::vector<int> test_set;
    BitString z_t;
    BitString z_t_prime;
    int observed_error_count = 0;
    bool aborted = false;
    BitString sifted_alice; // empty when aborted
    BitString sifted_bob;   // Bob's raw information bits before correction
    bool reconciled = false;
    BitString final_key;
    int64_t pool_debit = 0;
    EveRecord eve_record;
};

// one batch of product-state qubits: (bit, basis) per position
struct QubitBatch {
    BitString bits;
    BitString bases;
};

// Applies the attack qubit by qubit and returns the delivered states plus
// Eve's classical record. Intercept-resend measures in the policy basis and
// forwards the post-measurement state.
std::pair<QubitBatch, EveRecord> eve_channel(const QubitBatch& sent, const AttackStrategy& attack,
                                             uint64_t seed);

// measurement of BB84 product states: matching basis reproduces the encoded
// bit, mismatched basis yields a fair coin
BitString measure_batch(const QubitBatch& states, const BitString& bases, Rng& rng);

struct ErrorEstimate {
    int count = 0;
    bool abort = false;
};

// abort when count > floor(n p)
ErrorEstimate estimate_error(const BitString& z_t, const BitString& z_t_prime, double p);

struct ReconcileResult {
    BitString bob_corrected;
    int64_t debit = 0;
};

// idealized reconciliation: Bob's string becomes Alice's, the pool pays the
// exact budget regardless of the error pattern
ReconcileResult reconcile(const BitString& alice_x, const BitString& bob_x, KeyPool& pool,
                          double p, int reconcile_const = 32);

ProtocolTranscript run_session(const ProtocolConfig& config, const AttackStrategy& attack,
                               KeyPool& pool);

// independent sessions with per-index derived seeds; pool accounting is
// replayed serially in index order, so results match the sequential run
std::vector<ProtocolTranscript> run_session_batch(const ProtocolConfig& config,
                                                  const AttackStrategy& attack, KeyPool& pool,
                                                  int sessions);
std::vector<ProtocolTranscript> run_session_batch_serial(const ProtocolConfig& config,
                                                         const AttackStrategy& attack,
                                                         KeyPool& pool, int sessions);

struct EveGuessProxy {
    int dl_bits = 0;
    double deficiency = 0.0; // M - dl_bits
};

// conditional description length of the final key given Eve's classical
// record, the public announcements, and the code description
EveGuessProxy eve_guess_proxy(const ProtocolTranscript& transcript, const LinearCode& code,
                              const Lz78Model& model);

// transcript JSON, schema "v1"; bitstrings in textual form, index sets as
// sorted arrays
std::string transcript_to_json(const ProtocolTranscript& t, const std::string& manifest_id = "");
ProtocolTranscript transcript_from_json(const std::string& text);

} // namespace qkd

#endif
