// Fixed-length bit strings over GF(2), packed LSB-first into 64-bit words.
// The packing order is internal; all file and CLI I/O uses the textual
// '0'/'1' form with index 0 printed first.

#ifndef QKD_BITSTRING_HPP
#define QKD_BITSTRING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qkd/rng.hpp"

namespace qkd {

// Exhaustive enumeration budget: helpers that scan all 2^len strings
// refuse lengths above this.
inline constexpr int kMaxEnumerationBits = 24;

// Returns 2^len, or throws std::invalid_argument if len exceeds the
// enumeration budget.
uint64_t enumeration_size(int len);

class BitString {
public:
    BitString() = default;

    // all-zero string of the given length
    explicit BitString(int len);

    static BitString from_string(const std::string& text);

    // bit j = (value >> j) & 1; used by exhaustive scans
    static BitString from_index(uint64_t value, int len);

    static BitString random(int len, Rng& rng);

    int size() const { return len_; }

    bool get(int i) const;
    void set(int i, bool v);

    std::string to_string() const;

    uint64_t to_index() const; // inverse of from_index, len <= 63

    int weight() const;

    bool operator==(const BitString& other) const;
    bool operator!=(const BitString& other) const { return !(*this == other); }
    bool operator<(const BitString& other) const; // lexicographic by index order

    BitString operator^(const BitString& other) const;
    void xor_in_place(const BitString& other);

    const std::vector<uint64_t>& words() const { return words_; }

private:
    int len_ = 0;
    std::vector<uint64_t> words_;

    void check_index(int i) const;
    void clear_tail();
};

int hamming_weight(const BitString& a);
int hamming_distance(const BitString& a, const BitString& b);

// GF(2) inner product a.b = sum a[i]b[i] mod 2
int dot(const BitString& a, const BitString& b);

BitString concat(const BitString& a, const BitString& b);

// bits of a at the given positions, in the order listed
BitString select(const BitString& a, const std::vector<int>& positions);

} // namespace qkd

#endif
