#include "qkd/lincode.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace qkd {

namespace {

// generator rows packed as flat words, rows-major
struct PackedRows {
    int words_per_row;
    std::vector<uint64_t> data;

    explicit PackedRows(const Gf2Matrix& g)
        : words_per_row(int((size_t(g.cols()) + 63) / 64)) {
        data.reserve(size_t(g.rows()) * size_t(words_per_row));
        for (int r = 0; r < g.rows(); ++r) {
            const auto& w = g.row(r).words();
            for (int j = 0; j < words_per_row; ++j)
                data.push_back(j < int(w.size()) ? w[size_t(j)] : 0);
        }
    }

    const uint64_t* row(int r) const { return data.data() + size_t(r) * size_t(words_per_row); }
};

int weight_of(const uint64_t* w, int nwords) {
    int acc = 0;
    for (int j = 0; j < nwords; ++j) acc += std::popcount(w[j]);
    return acc;
}

void check_distance_dim(int m) {
    if (m > kMaxEnumerationBits)
        throw std::invalid_argument("min_distance: dimension " + std::to_string(m) +
                                    " exceeds exhaustive budget of 2^" +
                                    std::to_string(kMaxEnumerationBits));
}

} // namespace

int min_distance_serial(const Gf2Matrix& generators) {
    const int m = generators.rows();
    check_distance_dim(m);
    if (m == 0) return generators.cols() + 1;

    PackedRows rows(generators);
    const int W = rows.words_per_row;
    std::vector<uint64_t> cw(size_t(W), 0);
    int best = generators.cols() + 1;
    const uint64_t total = uint64_t(1) << m;
    for (uint64_t v = 1; v < total; ++v) {
        std::fill(cw.begin(), cw.end(), 0);
        for (int r = 0; r < m; ++r) {
            if ((v >> r) & 1) {
                const uint64_t* row = rows.row(r);
                for (int j = 0; j < W; ++j) cw[size_t(j)] ^= row[j];
            }
        }
        best = std::min(best, weight_of(cw.data(), W));
    }
    return best;
}

int min_distance(const Gf2Matrix& generators) {
    const int m = generators.rows();
    check_distance_dim(m);
    if (m == 0) return generators.cols() + 1;

    PackedRows rows(generators);
    const int W = rows.words_per_row;
    const uint64_t total = uint64_t(1) << m;
    int best = generators.cols() + 1;

    // Each chunk walks the Gray sequence gray(c) = c ^ (c >> 1); consecutive
    // steps flip exactly one generator, so a codeword update is one row XOR.
#pragma omp parallel for reduction(min : best) schedule(static)
    for (int chunk = 0; chunk < 64; ++chunk) {
        const uint64_t lo = total * uint64_t(chunk) / 64;
        const uint64_t hi = total * uint64_t(chunk + 1) / 64;
        if (lo >= hi) continue;

        std::vector<uint64_t> cw(size_t(W), 0);
        uint64_t g = lo ^ (lo >> 1);
        for (int r = 0; r < m; ++r)
            if ((g >> r) & 1) {
                const uint64_t* row = rows.row(r);
                for (int j = 0; j < W; ++j) cw[size_t(j)] ^= row[j];
            }

        int local = generators.cols() + 1;
        for (uint64_t c = lo;;) {
            if (g != 0) local = std::min(local, weight_of(cw.data(), W));
            if (++c >= hi) break;
            const int flip = std::countr_zero(c);
            const uint64_t* row = rows.row(flip);
            for (int j = 0; j < W; ++j) cw[size_t(j)] ^= row[j];
            g ^= uint64_t(1) << flip;
        }
        best = std::min(best, local);
    }
    return best;
}

LinearCode::LinearCode(Gf2Matrix generators) {
    const int m = generators.rows();
    const int n = generators.cols();
    if (m > n) throw std::invalid_argument("LinearCode: dimension exceeds block length");
    if (generators.rank() != m)
        throw std::invalid_argument("LinearCode: generator rows are linearly dependent");
    generators_ = std::move(generators);
    min_distance_ = qkd::min_distance(generators_);
}

LinearCode LinearCode::trivial(int n) {
    LinearCode c;
    c.generators_ = Gf2Matrix(0, n);
    c.min_distance_ = n + 1;
    return c;
}

LinearCode construct_code(const CodeRequirement& req, uint64_t seed, int max_attempts) {
    if (req.m < 1) throw std::invalid_argument("construct_code: dimension must be >= 1");
    if (req.m > req.n) throw std::invalid_argument("construct_code: m > n");
    if (req.distance_floor < 0) throw std::invalid_argument("construct_code: negative floor");
    check_distance_dim(req.m);
    // Singleton bound: d <= n - m + 1, so d > floor is impossible past it
    if (req.distance_floor > req.n - req.m)
        throw CodeConstructionError(
            "construct_code: infeasible, distance floor " + std::to_string(req.distance_floor) +
            " with n=" + std::to_string(req.n) + " m=" + std::to_string(req.m) +
            " violates the Singleton bound d <= n-m+1");

    Rng rng(derive_seed(seed, 0x636f6465));
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<BitString> rows;
        rows.reserve(size_t(req.m));
        for (int r = 0; r < req.m; ++r) rows.push_back(BitString::random(req.n, rng));
        Gf2Matrix g(std::move(rows));
        if (g.rank() != req.m) continue;
        if (min_distance(g) > req.distance_floor) return LinearCode(std::move(g));
    }
    throw CodeConstructionError("construct_code: no code with d > " +
                                std::to_string(req.distance_floor) + " found in " +
                                std::to_string(max_attempts) + " attempts (n=" +
                                std::to_string(req.n) + ", m=" + std::to_string(req.m) + ")");
}

BitString privacy_amplify(const LinearCode& code, const BitString& x) {
    if (x.size() != code.n())
        throw std::invalid_argument("privacy_amplify: input length " + std::to_string(x.size()) +
                                    " != block length " + std::to_string(code.n()));
    BitString y(code.m());
    for (int i = 0; i < code.m(); ++i) y.set(i, dot(x, code.generators().row(i)) != 0);
    return y;
}

std::vector<BitString> dual_coset(const LinearCode& code, const BitString& y) {
    if (code.n() > 20)
        throw std::invalid_argument("dual_coset: n > 20 exceeds the coset enumeration budget");
    if (y.size() != code.m()) throw std::invalid_argument("dual_coset: y length != code dimension");

    auto particular = solve(code.generators(), y);
    if (!particular)
        throw std::invalid_argument("dual_coset: y not in the image of f"); // unreachable at full rank

    std::vector<BitString> basis = kernel_basis(code.generators());
    const int k = int(basis.size());
    std::vector<BitString> coset;
    coset.reserve(size_t(1) << k);

    // Gray walk over the dual code, one basis XOR per step
    BitString x = *particular;
    uint64_t g = 0;
    const uint64_t total = uint64_t(1) << k;
    for (uint64_t c = 0;;) {
        coset.push_back(x);
        if (++c >= total) break;
        const int flip = std::countr_zero(c);
        x.xor_in_place(basis[size_t(flip)]);
        g ^= uint64_t(1) << flip;
    }
    std::sort(coset.begin(), coset.end());
    return coset;
}

int64_t character_sum(const LinearCode& code, const BitString& y, const BitString& s,
                      const BitString& t) {
    if (s.size() != code.n() || t.size() != code.n())
        throw std::invalid_argument("character_sum: s,t must have the code block length");
    if (code.n() > 20)
        throw std::invalid_argument("character_sum: n > 20 exceeds the coset enumeration budget");
    if (y.size() != code.m())
        throw std::invalid_argument("character_sum: y length != code dimension");

    auto particular = solve(code.generators(), y);
    if (!particular) throw std::invalid_argument("character_sum: y not in the image of f");
    const std::vector<BitString> basis = kernel_basis(code.generators());
    const BitString w = s ^ t;

    // walk the dual code in Gray order; each step flips one basis vector,
    // so the sign flips exactly when that vector meets w in odd parity
    int sign = dot(*particular, w) ? -1 : 1;
    std::vector<int> step_flip;
    step_flip.reserve(basis.size());
    for (const auto& v : basis) step_flip.push_back(dot(v, w));

    int64_t sum = 0;
    const uint64_t total = uint64_t(1) << basis.size();
    for (uint64_t c = 0;;) {
        sum += sign;
        if (++c >= total) break;
        if (step_flip[size_t(std::countr_zero(c))]) sign = -sign;
    }
    return sum;
}

namespace {

struct TripleOutcome {
    int64_t triples = 0;
    int64_t violations = 0;
    int n = 0;
};

TripleOutcome character_sum_code_check(int triples_per_code, uint64_t seed) {
    Rng rng(seed);
    // shapes with d >= 3 comfortably below the Gilbert-Varshamov ceiling
    const int n = 6 + int(rng.next_below(11)); // 6..16
    const int m = 1 + int(rng.next_below(uint64_t(std::min(4, n - 5))));
    const int floor = 2 + int(rng.next_below(2));
    LinearCode code = [&] {
        try {
            return construct_code({n, m, floor}, rng.next_u64(), 5000);
        } catch (const CodeConstructionError&) {
            return construct_code({n, m, 2}, rng.next_u64(), 5000);
        }
    }();

    const int limit = (code.min_distance() - 1) / 2; // strictly below d/2
    const int64_t expected_eq = int64_t(1) << (code.n() - code.m());

    TripleOutcome out;
    out.n = code.n();
    for (int trial = 0; trial < triples_per_code; ++trial) {
        BitString y = BitString::random(code.m(), rng);
        auto random_low_weight = [&] {
            BitString v(code.n());
            const int target = int(rng.next_below(uint64_t(limit) + 1));
            while (hamming_weight(v) < target)
                v.set(int(rng.next_below(uint64_t(code.n()))), true);
            return v;
        };
        BitString s = random_low_weight();
        BitString t = (trial % 2 == 0) ? s : random_low_weight();
        const int64_t expected = (s == t) ? expected_eq : 0;
        if (character_sum(code, y, s, t) != expected) ++out.violations;
        ++out.triples;
    }
    return out;
}

CharacterSumSweepReport character_sweep_common(int codes, int triples_per_code, uint64_t seed,
                                               bool parallel) {
    CharacterSumSweepReport rep;
    rep.codes = codes;
    int64_t triples = 0, violations = 0;
    int max_n = 0;
    if (parallel) {
#pragma omp parallel for reduction(+ : triples, violations) reduction(max : max_n)     schedule(dynamic, 2)
        for (int i = 0; i < codes; ++i) {
            TripleOutcome out = character_sum_code_check(triples_per_code,
                                                         derive_seed(seed, uint64_t(i)));
            triples += out.triples;
            violations += out.violations;
            max_n = std::max(max_n, out.n);
        }
    } else {
        for (int i = 0; i < codes; ++i) {
            TripleOutcome out = character_sum_code_check(triples_per_code,
                                                         derive_seed(seed, uint64_t(i)));
            triples += out.triples;
            violations += out.violations;
            max_n = std::max(max_n, out.n);
        }
    }
    rep.triples = triples;
    rep.violations = violations;
    rep.max_n = max_n;
    return rep;
}

} // namespace

CharacterSumSweepReport run_character_sum_sweep(int codes, int triples_per_code, uint64_t seed) {
    return character_sweep_common(codes, triples_per_code, seed, true);
}

CharacterSumSweepReport run_character_sum_sweep_serial(int codes, int triples_per_code,
                                                       uint64_t seed) {
    return character_sweep_common(codes, triples_per_code, seed, false);
}

void save_code(std::ostream& out, const LinearCode& code) {
    out << code.n() << ' ' << code.m() << ' ' << code.min_distance() << '\n';
    for (int r = 0; r < code.m(); ++r) out << code.generators().row(r).to_string() << '\n';
}

LinearCode load_code(std::istream& in) {
    int n = 0, m = 0, d = 0;
    if (!(in >> n >> m >> d)) throw std::invalid_argument("load_code: bad header line");
    if (n < 0 || m < 0 || m > n) throw std::invalid_argument("load_code: bad dimensions");
    std::vector<BitString> rows;
    rows.reserve(size_t(m));
    for (int r = 0; r < m; ++r) {
        std::string line;
        if (!(in >> line)) throw std::invalid_argument("load_code: missing generator row");
        if (int(line.size()) != n)
            throw std::invalid_argument("load_code: generator row length != N");
        rows.push_back(BitString::from_string(line));
    }
    LinearCode code = (m == 0) ? LinearCode::trivial(n) : LinearCode(Gf2Matrix(std::move(rows)));
    if (code.min_distance() != d)
        throw std::invalid_argument("load_code: stored distance " + std::to_string(d) +
                                    " does not match recomputed " +
                                    std::to_string(code.min_distance()));
    return code;
}

void save_code_file(const std::string& path, const LinearCode& code) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_code_file: cannot open " + path);
    save_code(out, code);
}

LinearCode load_code_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_code_file: cannot open " + path);
    return load_code(in);
}

} // namespace qkd
