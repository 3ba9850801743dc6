#include "qkd/algoinfo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qkd {

const char* const kDlProxyCaveat =
    "description lengths from the lz78-gamma compressor witness the counting "
    "skeleton only; they can exceed true program-length complexity by an "
    "unbounded amount";

namespace {

struct BitWriter {
    std::vector<bool> bits;

    void put(bool b) { bits.push_back(b); }

    // Elias gamma: floor(log2 v) zeros, then v's bits from the MSB down
    void put_gamma(uint64_t v) {
        int k = 63 - std::countl_zero(v);
        for (int i = 0; i < k; ++i) put(false);
        for (int i = k; i >= 0; --i) put((v >> i) & 1);
    }

    BitString take() const {
        BitString out(int(bits.size()));
        for (size_t i = 0; i < bits.size(); ++i) out.set(int(i), bits[i]);
        return out;
    }
};

struct BitReader {
    const BitString& src;
    int pos = 0;

    bool get() {
        if (pos >= src.size()) throw std::invalid_argument("decode: truncated codeword");
        return src.get(pos++);
    }

    uint64_t get_gamma() {
        int k = 0;
        while (!get()) {
            if (++k > 62) throw std::invalid_argument("decode: corrupt gamma prefix");
        }
        uint64_t v = 1;
        for (int i = 0; i < k; ++i) v = (v << 1) | uint64_t(get());
        return v;
    }
};

// LZ78 phrase dictionary: a binary trie for longest-match plus explicit
// phrase bits for decoding. Phrase indices follow insertion order; epsilon
// is phrase 0 at the root.
class PhraseDict {
public:
    PhraseDict() : nodes_(1), phrases_(1, std::vector<uint8_t>{}) { nodes_[0].phrase = 0; }

    int phrase_count() const { return int(phrases_.size()); }
    const std::vector<uint8_t>& phrase_bits(int idx) const { return phrases_.at(size_t(idx)); }

    // longest dictionary phrase matching x starting at pos, at most max_len bits
    std::pair<int, int> longest_match(const BitString& x, int pos, int max_len) const {
        int node = 0, best_idx = 0, best_len = 0;
        for (int l = 0; l < max_len; ++l) {
            int next = nodes_[size_t(node)].child[x.get(pos + l) ? 1 : 0];
            if (next < 0) break;
            node = next;
            if (nodes_[size_t(node)].phrase >= 0) {
                best_idx = nodes_[size_t(node)].phrase;
                best_len = l + 1;
            }
        }
        return {best_idx, best_len};
    }

    // insert the given bits as a phrase if absent
    bool insert(const std::vector<uint8_t>& bits) {
        int node = 0;
        for (uint8_t b : bits) {
            if (nodes_[size_t(node)].child[b] < 0) {
                nodes_[size_t(node)].child[b] = int(nodes_.size());
                nodes_.emplace_back();
            }
            node = nodes_[size_t(node)].child[b];
        }
        if (nodes_[size_t(node)].phrase >= 0) return false;
        nodes_[size_t(node)].phrase = int(phrases_.size());
        phrases_.push_back(bits);
        return true;
    }

    bool insert(const BitString& x, int pos, int len) {
        std::vector<uint8_t> bits(size_t(len), 0);
        for (int i = 0; i < len; ++i) bits[size_t(i)] = x.get(pos + i) ? 1 : 0;
        return insert(bits);
    }

    // parse a string LZ78-style growing the dictionary, then add the whole
    // string as one phrase so it can be copied with a single token
    void prime(const BitString& side) {
        int pos = 0;
        while (pos < side.size()) {
            auto [idx, len] = longest_match(side, pos, side.size() - pos);
            if (pos + len < side.size()) {
                insert(side, pos, len + 1);
                pos += len + 1;
            } else {
                pos = side.size();
            }
        }
        if (side.size() > 0) insert(side, 0, side.size());
    }

private:
    struct Node {
        int child[2] = {-1, -1};
        int phrase = -1;
    };
    std::vector<Node> nodes_;
    std::vector<std::vector<uint8_t>> phrases_;
};

int gamma_bits(uint64_t v) { return 2 * (63 - std::countl_zero(v)) + 1; }

} // namespace

int Lz78Model::header_bits(int len) { return gamma_bits(uint64_t(len) + 1); }

int Lz78Model::c_model(int len) { return header_bits(len) + 2; }

namespace {

// core LZ78 emitter against a prepared dictionary
void encode_with_dict(PhraseDict& dict, const BitString& x, BitWriter& out) {
    out.put_gamma(uint64_t(x.size()) + 1);
    int pos = 0;
    while (pos < x.size()) {
        auto [idx, len] = dict.longest_match(x, pos, x.size() - pos);
        out.put_gamma(uint64_t(dict.phrase_count() - idx));
        if (pos + len < x.size()) {
            out.put(x.get(pos + len));
            // w+bit cannot already be present: the match would have been longer
            dict.insert(x, pos, len + 1);
            pos += len + 1;
        } else {
            pos = x.size();
        }
    }
}

} // namespace

BitString Lz78Model::encode(const BitString& x, const BitString& side) const {
    // A nonempty side prepends a one-bit selector between the side-primed
    // dictionary and a plain one, so side information never hurts by more
    // than the selector.
    if (side.size() == 0) {
        PhraseDict dict;
        BitWriter out;
        encode_with_dict(dict, x, out);
        return out.take();
    }
    PhraseDict primed;
    primed.prime(side);
    BitWriter with_side;
    encode_with_dict(primed, x, with_side);

    PhraseDict plain_dict;
    BitWriter plain;
    encode_with_dict(plain_dict, x, plain);

    const bool use_primed = with_side.bits.size() <= plain.bits.size();
    BitWriter out;
    out.put(use_primed);
    for (bool b : (use_primed ? with_side : plain).bits) out.put(b);
    return out.take();
}

BitString Lz78Model::decode(const BitString& code, const BitString& side) const {
    PhraseDict dict;
    BitReader in{code};
    if (side.size() > 0) {
        if (in.get()) dict.prime(side);
    }
    const int len = int(in.get_gamma() - 1);
    BitString x(len);
    int pos = 0;
    while (pos < len) {
        const int dist = int(in.get_gamma());
        const int idx = dict.phrase_count() - dist;
        if (idx < 0) throw std::invalid_argument("decode: phrase distance out of range");
        const auto& phrase = dict.phrase_bits(idx);
        const int plen = int(phrase.size());
        if (pos + plen > len) throw std::invalid_argument("decode: phrase overruns length");
        for (int i = 0; i < plen; ++i) x.set(pos + i, phrase[size_t(i)] != 0);
        if (pos + plen < len) {
            const bool literal = in.get();
            x.set(pos + plen, literal);
            std::vector<uint8_t> grown = phrase;
            grown.push_back(literal ? 1 : 0);
            dict.insert(grown);
            pos += plen + 1;
        } else {
            pos = len;
        }
    }
    return x;
}

namespace {

int dl_with_dict(PhraseDict& dict, const BitString& x) {
    int bits = Lz78Model::header_bits(x.size());
    int pos = 0;
    while (pos < x.size()) {
        auto [idx, len] = dict.longest_match(x, pos, x.size() - pos);
        bits += gamma_bits(uint64_t(dict.phrase_count() - idx));
        if (pos + len < x.size()) {
            bits += 1;
            dict.insert(x, pos, len + 1);
            pos += len + 1;
        } else {
            pos = x.size();
        }
    }
    return bits;
}

} // namespace

int Lz78Model::dl(const BitString& x, const BitString& side) const {
    PhraseDict plain_dict;
    const int plain = dl_with_dict(plain_dict, x);
    if (side.size() == 0) return plain;
    PhraseDict primed;
    primed.prime(side);
    const int with_side = dl_with_dict(primed, x);
    return 1 + std::min(with_side, plain);
}

CountingReport counting_check_serial(const Lz78Model& model, int m, int threshold) {
    if (m > 16) throw std::invalid_argument("counting_check: m > 16");
    const uint64_t total = enumeration_size(m);
    int64_t count = 0;
    for (uint64_t v = 0; v < total; ++v)
        if (model.dl(BitString::from_index(v, m)) <= threshold) ++count;

    CountingReport r;
    r.m = m;
    r.threshold = threshold;
    r.count = count;
    r.bound = threshold < 0 ? 0 : (int64_t(1) << (threshold + 1)) - 1;
    r.holds = count <= r.bound;
    return r;
}

CountingReport counting_check(const Lz78Model& model, int m, int threshold) {
    if (m > 16) throw std::invalid_argument("counting_check: m > 16");
    const int64_t total = int64_t(enumeration_size(m));
    int64_t count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static)
    for (int64_t v = 0; v < total; ++v)
        if (model.dl(BitString::from_index(uint64_t(v), m)) <= threshold) ++count;

    CountingReport r;
    r.m = m;
    r.threshold = threshold;
    r.count = count;
    r.bound = threshold < 0 ? 0 : (int64_t(1) << (threshold + 1)) - 1;
    r.holds = count <= r.bound;
    return r;
}

std::vector<CountingReport> counting_check_all(const Lz78Model& model, int m) {
    if (m > 16) throw std::invalid_argument("counting_check_all: m > 16");
    const int64_t total = int64_t(enumeration_size(m));

    int max_dl = 0;
    std::vector<int64_t> hist(1, 0);
#pragma omp parallel
    {
        int local_max = 0;
        std::vector<int64_t> local_hist(64, 0);
#pragma omp for schedule(static) nowait
        for (int64_t v = 0; v < total; ++v) {
            int d = model.dl(BitString::from_index(uint64_t(v), m));
            if (d >= int(local_hist.size())) local_hist.resize(size_t(d) + 1, 0);
            ++local_hist[size_t(d)];
            local_max = std::max(local_max, d);
        }
#pragma omp critical
        {
            max_dl = std::max(max_dl, local_max);
            if (hist.size() < local_hist.size()) hist.resize(local_hist.size(), 0);
            for (size_t i = 0; i < local_hist.size(); ++i) hist[i] += local_hist[i];
        }
    }

    std::vector<CountingReport> out;
    int64_t cum = 0;
    for (int thr = 0; thr <= max_dl; ++thr) {
        if (thr < int(hist.size())) cum += hist[size_t(thr)];
        CountingReport r;
        r.m = m;
        r.threshold = thr;
        r.count = cum;
        r.bound = (int64_t(1) << (thr + 1)) - 1;
        r.holds = cum <= r.bound;
        out.push_back(r);
    }
    return out;
}

namespace {

OtpExperimentReport otp_common(const Lz78Model& model, int m, double delta, uint64_t key_seed,
                               bool parallel) {
    if (m > 14) throw std::invalid_argument("otp_experiment: m > 14 exceeds exhaustive budget");
    if (delta <= 0) throw std::invalid_argument("otp_experiment: delta must be positive");

    Rng rng(derive_seed(key_seed, 0x6f7470));
    const BitString key = BitString::random(m, rng);

    OtpExperimentReport r;
    r.m = m;
    r.delta = delta;
    r.dl_of_key = model.dl(key);
    r.c_model = Lz78Model::c_model(m);
    r.threshold = double(r.dl_of_key) - delta * m - r.c_model;
    r.bound = std::exp2((1.0 - delta) * m);
    r.exhaustive = true;
    r.caveat = kDlProxyCaveat;

    const int64_t total = int64_t(enumeration_size(m));
    int64_t count = 0;
    if (parallel) {
#pragma omp parallel for reduction(+ : count) schedule(static)
        for (int64_t v = 0; v < total; ++v) {
            BitString x = BitString::from_index(uint64_t(v), m);
            if (double(model.dl(x, x ^ key)) <= r.threshold) ++count;
        }
    } else {
        for (int64_t v = 0; v < total; ++v) {
            BitString x = BitString::from_index(uint64_t(v), m);
            if (double(model.dl(x, x ^ key)) <= r.threshold) ++count;
        }
    }
    r.b_delta_size = count;
    r.holds = double(count) <= r.bound;
    return r;
}

} // namespace

OtpExperimentReport otp_experiment(const Lz78Model& model, int m, double delta,
                                   uint64_t key_seed) {
    return otp_common(model, m, delta, key_seed, true);
}

OtpExperimentReport otp_experiment_serial(const Lz78Model& model, int m, double delta,
                                          uint64_t key_seed) {
    return otp_common(model, m, delta, key_seed, false);
}

ChainRuleAuditReport chain_rule_audit(const Lz78Model& model, int samples, int m, uint64_t seed) {
    if (m > 14) throw std::invalid_argument("chain_rule_audit: m > 14");
    ChainRuleAuditReport r;
    r.samples = samples;
    r.m = m;

#pragma omp parallel
    {
        int c1 = 0, c2 = 0, c3 = 0, c4 = 0;
#pragma omp for schedule(static) nowait
        for (int i = 0; i < samples; ++i) {
            Rng rng(derive_seed(seed, uint64_t(i)));
            BitString x = BitString::random(m, rng);
            BitString k = BitString::random(m, rng);
            BitString xk = x ^ k;
            int joint = model.dl(concat(x, k));
            c1 = std::max(c1, std::abs(joint - model.dl(k) - model.dl(x, k)));
            c2 = std::max(c2, std::abs(joint - model.dl(concat(xk, k))));
            c3 = std::max(c3, joint - model.dl(xk) - model.dl(x, xk));
            c4 = std::max(c4, model.dl(xk) - m);
        }
#pragma omp critical
        {
            r.c1_max = std::max(r.c1_max, c1);
            r.c2_max = std::max(r.c2_max, c2);
            r.c3_max = std::max(r.c3_max, c3);
            r.c4_max = std::max(r.c4_max, c4);
        }
    }
    return r;
}

} // namespace qkd
