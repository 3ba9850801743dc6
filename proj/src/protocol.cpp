#include "qkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "qkd/analysis.hpp"
#include "qkd/qsim.hpp"

namespace qkd {

namespace {

// derived-stream indices, fixed as part of the session's determinism contract
enum Stream : uint64_t {
    kStreamBits = 1,
    kStreamBases = 2,
    kStreamEve = 3,
    kStreamBob = 4,
    kStreamTest = 5,
};

int64_t floor_with_guard(double v) { return int64_t(std::floor(v + 1e-9)); }

} // namespace

void ProtocolConfig::validate() const {
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (p < 0) throw std::invalid_argument("config: p must be >= 0");
    if (epsilon <= 0) throw std::invalid_argument("config: epsilon must be > 0");
    if (p + epsilon >= 0.5) throw std::invalid_argument("config: p + epsilon must be < 1/2");
    if (delta <= 0) throw std::invalid_argument("config: delta must be > 0");
    if (code.n() != n)
        throw std::invalid_argument("config: code.n (" + std::to_string(code.n()) +
                                    ") != n (" + std::to_string(n) + ")");
    if (double(code.min_distance()) <= 2.0 * n * (p + epsilon))
        throw std::invalid_argument("config: code distance " +
                                    std::to_string(code.min_distance()) +
                                    " does not exceed 2 n (p + epsilon)");
    if (channel_mode == ChannelMode::joint_statevector && 2 * n > kMaxStateQubits)
        throw std::invalid_argument("config: joint statevector mode needs 2n <= 12");
    if (reconcile_const < 0) throw std::invalid_argument("config: negative reconcile constant");
}

KeyPool::KeyPool(int64_t bits) : remaining_(bits) {
    if (bits < 0) throw std::invalid_argument("KeyPool: negative size");
}

void KeyPool::debit(int64_t bits) {
    if (bits < 0) throw std::invalid_argument("KeyPool: negative debit");
    if (bits > remaining_)
        throw PoolExhausted("key pool exhausted: need " + std::to_string(bits) + " bits, have " +
                            std::to_string(remaining_));
    remaining_ -= bits;
    consumed_ += bits;
}

int64_t reconcile_cost(int n, double p, int reconcile_const) {
    const double info = double(n) * binary_entropy(p);
    return int64_t(std::ceil(info - 1e-9)) + reconcile_const;
}

std::pair<QubitBatch, EveRecord> eve_channel(const QubitBatch& sent, const AttackStrategy& attack,
                                             uint64_t seed) {
    EveRecord record;
    record.kind = attack.kind;
    record.policy = attack.policy;
    if (attack.kind == AttackKind::none) return {sent, record};

    Rng rng(derive_seed(seed, 0x657665));
    const int count = sent.bits.size();
    QubitBatch delivered{BitString(count), BitString(count)};
    record.bases = BitString(count);
    record.outcomes = BitString(count);
    for (int i = 0; i < count; ++i) {
        bool basis; // 0 = '+', 1 = 'x'
        switch (attack.policy) {
            case BasisPolicy::random_per_qubit: basis = rng.next_bit(); break;
            case BasisPolicy::always_plus: basis = false; break;
            case BasisPolicy::always_times: basis = true; break;
            default: basis = false;
        }
        // one uniform draw per qubit keeps the stream aligned with the
        // joint-statevector path, which computes a Born probability per qubit
        const double u = rng.next_unit();
        const bool outcome = basis == sent.bases.get(i) ? sent.bits.get(i) : (u >= 0.5);
        record.bases.set(i, basis);
        record.outcomes.set(i, outcome);
        // forward the post-measurement eigenstate
        delivered.bits.set(i, outcome);
        delivered.bases.set(i, basis);
    }
    return {delivered, record};
}

BitString measure_batch(const QubitBatch& states, const BitString& bases, Rng& rng) {
    if (states.bits.size() != bases.size())
        throw std::invalid_argument("measure_batch: length mismatch");
    BitString out(bases.size());
    for (int i = 0; i < bases.size(); ++i) {
        const bool hit = states.bases.get(i) == bases.get(i);
        const double u = rng.next_unit(); // aligned with the joint-mode draw
        out.set(i, hit ? states.bits.get(i) : (u >= 0.5));
    }
    return out;
}

ErrorEstimate estimate_error(const BitString& z_t, const BitString& z_t_prime, double p) {
    if (z_t.size() != z_t_prime.size())
        throw std::invalid_argument("estimate_error: length mismatch");
    ErrorEstimate e;
    e.count = hamming_weight(z_t ^ z_t_prime);
    e.abort = int64_t(e.count) > floor_with_guard(double(z_t.size()) * p);
    return e;
}

ReconcileResult reconcile(const BitString& alice_x, const BitString& bob_x, KeyPool& pool,
                          double p, int reconcile_const) {
    if (alice_x.size() != bob_x.size())
        throw std::invalid_argument("reconcile: length mismatch");
    ReconcileResult r;
    r.debit = reconcile_cost(alice_x.size(), p, reconcile_const);
    pool.debit(r.debit);
    r.bob_corrected = alice_x;
    return r;
}

namespace {

// joint-statevector channel: the same protocol steps driven through a dense
// 2n-qubit register, used to cross-check the product-state fast path
struct JointOutcome {
    BitString bob;
    EveRecord record;
};

void apply_h(CVector& amps, int qubit) {
    const double r = 1.0 / std::sqrt(2.0);
    const int64_t stride = int64_t(1) << qubit;
    for (int64_t base = 0; base < amps.size(); ++base) {
        if ((base >> qubit) & 1) continue;
        const std::complex<double> u = amps(base);
        const std::complex<double> v = amps(base + stride);
        amps(base) = r * (u + v);
        amps(base + stride) = r * (u - v);
    }
}

bool measure_computational(CVector& amps, int qubit, Rng& rng) {
    double p0 = 0.0;
    for (int64_t i = 0; i < amps.size(); ++i)
        if (((i >> qubit) & 1) == 0) p0 += std::norm(amps(i));
    const bool outcome = !(rng.next_unit() < p0);
    double norm = 0.0;
    for (int64_t i = 0; i < amps.size(); ++i) {
        if (bool((i >> qubit) & 1) != outcome)
            amps(i) = 0.0;
        else
            norm += std::norm(amps(i));
    }
    amps /= std::sqrt(norm);
    return outcome;
}

bool measure_in_basis(CVector& amps, int qubit, bool times_basis, Rng& rng) {
    if (times_basis) apply_h(amps, qubit);
    const bool outcome = measure_computational(amps, qubit, rng);
    if (times_basis) apply_h(amps, qubit);
    return outcome;
}

JointOutcome run_joint_channel(const BitString& bits, const BitString& bases,
                               const AttackStrategy& attack, uint64_t eve_seed,
                               uint64_t bob_seed) {
    const int count = bits.size();
    const int64_t dim = int64_t(1) << count;
    CVector amps = CVector::Zero(dim);
    amps(0) = 1.0;
    // prepare each qubit: X to set the bit, then H for the 'x' basis
    for (int q = 0; q < count; ++q) {
        if (bits.get(q)) {
            const int64_t stride = int64_t(1) << q;
            for (int64_t i = 0; i < dim; ++i)
                if (((i >> q) & 1) == 0) std::swap(amps(i), amps(i + stride));
        }
        if (bases.get(q)) apply_h(amps, q);
    }

    JointOutcome out;
    out.record.kind = attack.kind;
    out.record.policy = attack.policy;

    if (attack.kind == AttackKind::intercept_resend) {
        Rng eve_rng(derive_seed(eve_seed, 0x657665));
        out.record.bases = BitString(count);
        out.record.outcomes = BitString(count);
        for (int q = 0; q < count; ++q) {
            bool basis;
            switch (attack.policy) {
                case BasisPolicy::random_per_qubit: basis = eve_rng.next_bit(); break;
                case BasisPolicy::always_plus: basis = false; break;
                case BasisPolicy::always_times: basis = true; break;
                default: basis = false;
            }
            const bool outcome = measure_in_basis(amps, q, basis, eve_rng);
            out.record.bases.set(q, basis);
            out.record.outcomes.set(q, outcome);
        }
    }

    Rng bob_rng(bob_seed);
    out.bob = BitString(count);
    for (int q = 0; q < count; ++q)
        out.bob.set(q, measure_in_basis(amps, q, bases.get(q), bob_rng));
    return out;
}

} // namespace

ProtocolTranscript run_session(const ProtocolConfig& config, const AttackStrategy& attack,
                               KeyPool& pool) {
    config.validate();
    const int n = config.n;
    const int64_t needed = reconcile_cost(n, config.p, config.reconcile_const);
    if (pool.remaining_bits() < needed)
        throw PoolExhausted("key pool too small for a session: need " + std::to_string(needed) +
                            " bits, have " + std::to_string(pool.remaining_bits()));

    ProtocolTranscript t;
    t.seed = config.seed;
    t.n = n;

    // (i) random payload and bases for 2n qubits
    Rng bits_rng(derive_seed(config.seed, kStreamBits));
    Rng bases_rng(derive_seed(config.seed, kStreamBases));
    const BitString alice_bits = BitString::random(2 * n, bits_rng);
    t.basis = BitString::random(2 * n, bases_rng);

    // channel with the attack applied, then (ii) Bob measures in the
    // announced basis
    BitString bob_bits(0);
    const uint64_t eve_seed = derive_seed(config.seed, kStreamEve);
    if (config.channel_mode == ChannelMode::per_qubit) {
        auto [delivered, record] = eve_channel({alice_bits, t.basis}, attack, eve_seed);
        t.eve_record = std::move(record);
        Rng bob_rng(derive_seed(config.seed, kStreamBob));
        bob_bits = measure_batch(delivered, t.basis, bob_rng);
    } else {
        JointOutcome joint = run_joint_channel(alice_bits, t.basis, attack, eve_seed,
                                               derive_seed(config.seed, kStreamBob));
        t.eve_record = std::move(joint.record);
        bob_bits = std::move(joint.bob);
    }

    // (iii) random test half
    Rng test_rng(derive_seed(config.seed, kStreamTest));
    std::vector<int> order(size_t(2 * n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < n; ++i) {
        const int j = i + int(test_rng.next_below(uint64_t(2 * n - i)));
        std::swap(order[size_t(i)], order[size_t(j)]);
    }
    t.test_set.assign(order.begin(), order.begin() + n);
    std::sort(t.test_set.begin(), t.test_set.end());
    std::vector<int> info_set(order.begin() + n, order.end());
    std::sort(info_set.begin(), info_set.end());

    t.z_t = select(alice_bits, t.test_set);
    t.z_t_prime = select(bob_bits, t.test_set);

    // (iv) threshold test
    const ErrorEstimate est = estimate_error(t.z_t, t.z_t_prime, config.p);
    t.observed_error_count = est.count;
    t.aborted = est.abort;
    if (t.aborted) {
        t.sifted_alice = BitString(0);
        t.sifted_bob = BitString(0);
        t.final_key = BitString(0);
        return t;
    }

    // (v) idealized reconciliation at the exact budget
    t.sifted_alice = select(alice_bits, info_set);
    t.sifted_bob = select(bob_bits, info_set);
    const ReconcileResult rec =
        reconcile(t.sifted_alice, t.sifted_bob, pool, config.p, config.reconcile_const);
    t.reconciled = true;
    t.pool_debit = rec.debit;

    // (vi) privacy amplification; both parties compute the same key
    t.final_key = privacy_amplify(config.code, t.sifted_alice);
    const BitString bob_key = privacy_amplify(config.code, rec.bob_corrected);
    if (!(bob_key == t.final_key))
        throw std::logic_error("run_session: reconciled keys diverge");
    return t;
}

namespace {

std::vector<ProtocolTranscript> batch_common(const ProtocolConfig& config,
                                             const AttackStrategy& attack, KeyPool& pool,
                                             int sessions, bool parallel) {
    config.validate();
    std::vector<ProtocolTranscript> out{size_t(sessions)};
    std::vector<char> failed(size_t(sessions), 0);
    std::vector<std::string> errors(static_cast<size_t>(sessions));

    // sessions are independent; run them against throwaway pools, then
    // replay the accounting in index order for sequential semantics
    const int64_t per_session = reconcile_cost(config.n, config.p, config.reconcile_const);

    auto run_one = [&](int i) {
        ProtocolConfig cfg = config;
        cfg.seed = derive_seed(config.seed, uint64_t(i));
        KeyPool scratch(per_session);
        try {
            out[size_t(i)] = run_session(cfg, attack, scratch);
        } catch (const std::exception& e) {
            failed[size_t(i)] = 1;
            errors[size_t(i)] = e.what();
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (int i = 0; i < sessions; ++i) run_one(i);
    } else {
        for (int i = 0; i < sessions; ++i) run_one(i);
    }

    for (int i = 0; i < sessions; ++i) {
        if (failed[size_t(i)]) throw std::runtime_error("session " + std::to_string(i) + ": " +
                                                        errors[size_t(i)]);
        if (pool.remaining_bits() < per_session)
            throw PoolExhausted("key pool exhausted before session " + std::to_string(i) +
                                ": need " + std::to_string(per_session) + " bits, have " +
                                std::to_string(pool.remaining_bits()));
        if (!out[size_t(i)].aborted) pool.debit(out[size_t(i)].pool_debit);
    }
    return out;
}

} // namespace

std::vector<ProtocolTranscript> run_session_batch(const ProtocolConfig& config,
                                                  const AttackStrategy& attack, KeyPool& pool,
                                                  int sessions) {
    return batch_common(config, attack, pool, sessions, true);
}

std::vector<ProtocolTranscript> run_session_batch_serial(const ProtocolConfig& config,
                                                         const AttackStrategy& attack,
                                                         KeyPool& pool, int sessions) {
    return batch_common(config, attack, pool, sessions, false);
}

EveGuessProxy eve_guess_proxy(const ProtocolTranscript& transcript, const LinearCode& code,
                              const Lz78Model& model) {
    if (transcript.aborted)
        throw std::invalid_argument("eve_guess_proxy: transcript is aborted");

    // side information: Eve's record, then the public announcements, then
    // the code generators
    BitString side = concat(transcript.eve_record.bases, transcript.eve_record.outcomes);
    side = concat(side, transcript.basis);
    BitString test_indicator(transcript.basis.size());
    for (int idx : transcript.test_set) test_indicator.set(idx, true);
    side = concat(side, test_indicator);
    side = concat(side, transcript.z_t);
    side = concat(side, transcript.z_t_prime);
    for (int r = 0; r < code.m(); ++r) side = concat(side, code.generators().row(r));

    EveGuessProxy p;
    p.dl_bits = model.dl(transcript.final_key, side);
    p.deficiency = double(transcript.final_key.size()) - double(p.dl_bits);
    return p;
}

namespace {

const char* attack_kind_name(AttackKind k) {
    return k == AttackKind::none ? "none" : "intercept_resend";
}

const char* policy_name(BasisPolicy p) {
    switch (p) {
        case BasisPolicy::random_per_qubit: return "random_per_qubit";
        case BasisPolicy::always_plus: return "always_plus";
        case BasisPolicy::always_times: return "always_times";
    }
    return "random_per_qubit";
}

} // namespace

std::string transcript_to_json(const ProtocolTranscript& t, const std::string& manifest_id) {
    nlohmann::ordered_json j;
    j["schema"] = "v1";
    j["manifest_id"] = manifest_id;
    j["seed"] = t.seed;
    j["n"] = t.n;
    j["basis"] = t.basis.to_string();
    j["test_set"] = t.test_set;
    j["z_t"] = t.z_t.to_string();
    j["z_t_prime"] = t.z_t_prime.to_string();
    j["observed_error_count"] = t.observed_error_count;
    j["aborted"] = t.aborted;
    j["sifted_alice"] = t.sifted_alice.to_string();
    j["sifted_bob"] = t.sifted_bob.to_string();
    j["reconciled"] = t.reconciled;
    j["final_key"] = t.final_key.to_string();
    j["pool_debit"] = t.pool_debit;
    j["eve_record"] = {{"kind", attack_kind_name(t.eve_record.kind)},
                       {"policy", policy_name(t.eve_record.policy)},
                       {"bases", t.eve_record.bases.to_string()},
                       {"outcomes", t.eve_record.outcomes.to_string()}};
    return j.dump(2) + "\n";
}

ProtocolTranscript transcript_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("schema").get<std::string>() != "v1")
        throw std::invalid_argument("transcript_from_json: unknown schema");

    ProtocolTranscript t;
    t.seed = j.at("seed").get<uint64_t>();
    t.n = j.at("n").get<int>();
    t.basis = BitString::from_string(j.at("basis").get<std::string>());
    t.test_set = j.at("test_set").get<std::vector<int>>();
    t.z_t = BitString::from_string(j.at("z_t").get<std::string>());
    t.z_t_prime = BitString::from_string(j.at("z_t_prime").get<std::string>());
    t.observed_error_count = j.at("observed_error_count").get<int>();
    t.aborted = j.at("aborted").get<bool>();
    t.sifted_alice = BitString::from_string(j.at("sifted_alice").get<std::string>());
    t.sifted_bob = BitString::from_string(j.at("sifted_bob").get<std::string>());
    t.reconciled = j.at("reconciled").get<bool>();
    t.final_key = BitString::from_string(j.at("final_key").get<std::string>());
    t.pool_debit = j.at("pool_debit").get<int64_t>();

    const auto& e = j.at("eve_record");
    const std::string kind = e.at("kind").get<std::string>();
    t.eve_record.kind = kind == "none" ? AttackKind::none : AttackKind::intercept_resend;
    const std::string policy = e.at("policy").get<std::string>();
    t.eve_record.policy = policy == "always_plus"    ? BasisPolicy::always_plus
                          : policy == "always_times" ? BasisPolicy::always_times
                                                     : BasisPolicy::random_per_qubit;
    t.eve_record.bases = BitString::from_string(e.at("bases").get<std::string>());
    t.eve_record.outcomes = BitString::from_string(e.at("outcomes").get<std::string>());
    return t;
}

} // namespace qkd
