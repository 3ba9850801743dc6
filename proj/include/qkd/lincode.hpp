// Binary linear codes with exactly verified minimum distance.
//
// A code is spanned by M independent generator rows in {0,1}^N. The minimum
// distance is always established by exhaustive enumeration of all 2^M - 1
// nonzero codewords (dimension capped at kMaxEnumerationBits), never by a
// probabilistic promise. The privacy-amplification map sends x to the vector
// of inner products with the generators.

#ifndef QKD_LINCODE_HPP
#define QKD_LINCODE_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkd/gf2matrix.hpp"

namespace qkd {

class CodeConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CodeRequirement {
    int n = 0;
    int m = 0;
    int distance_floor = 0; // require min distance strictly greater than this
};

class LinearCode {
public:
    // Verifies rank(generators) == rows and computes the exact minimum
    // distance. Throws if the rows are dependent or the dimension exceeds
    // the exhaustive budget.
    explicit LinearCode(Gf2Matrix generators);

    // dimension-zero code {0^n}; no generators, distance sentinel n+1
    static LinearCode trivial(int n);

    int n() const { return generators_.cols(); }
    int m() const { return generators_.rows(); }
    const Gf2Matrix& generators() const { return generators_; }

    // exact minimum nonzero codeword weight; n+1 when m == 0
    int min_distance() const { return min_distance_; }

private:
    LinearCode() = default;
    Gf2Matrix generators_;
    int min_distance_ = 0;
};

// Exhaustive minimum-distance kernels over all 2^m - 1 nonzero codewords.
// The OpenMP version walks per-chunk Gray sequences; the serial version
// expands every coefficient vector directly and is kept as the reference.
int min_distance(const Gf2Matrix& generators);
int min_distance_serial(const Gf2Matrix& generators);

// Rejection sampling: draw m random rows, keep the first draw whose span is
// m-dimensional with min distance > req.distance_floor.
LinearCode construct_code(const CodeRequirement& req, uint64_t seed, int max_attempts = 5000);

// f(x) = (x.v_1, ..., x.v_M)
BitString privacy_amplify(const LinearCode& code, const BitString& x);

// All 2^{n-m} strings x with f(x) = y, sorted; enumerated as a coset of the
// dual code. Requires n <= 20.
std::vector<BitString> dual_coset(const LinearCode& code, const BitString& y);

// Exact signed sum of (-1)^{x.(s xor t)} over the coset {x : f(x) = y},
// enumerated as a particular solution xor the dual code. Equals
// (s == t ? 2^{n-m} : 0) whenever |s|, |t| < d(C)/2; outside that weight
// regime the raw sum is returned with no guarantee.
int64_t character_sum(const LinearCode& code, const BitString& y, const BitString& s,
                      const BitString& t);

struct CharacterSumSweepReport {
    int codes = 0;
    int64_t triples = 0;
    int64_t violations = 0; // exact-integer mismatches
    int max_n = 0;
};

// Random codes with verified d >= 3 (n <= 16) and random (y, s, t) triples
// with |s|, |t| < d/2, checked for exact equality against the Kronecker-delta
// value. OpenMP kernel plus a serial reference with identical counts.
CharacterSumSweepReport run_character_sum_sweep(int codes, int triples_per_code, uint64_t seed);
CharacterSumSweepReport run_character_sum_sweep_serial(int codes, int triples_per_code,
                                                       uint64_t seed);

// Text format: line 1 "N M d", then M generator rows as '0'/'1' strings.
void save_code(std::ostream& out, const LinearCode& code);
LinearCode load_code(std::istream& in);
void save_code_file(const std::string& path, const LinearCode& code);
LinearCode load_code_file(const std::string& path);

} // namespace qkd

#endif
