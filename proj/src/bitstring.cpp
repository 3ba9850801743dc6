#include "qkd/bitstring.hpp"

#include <bit>
#include <stdexcept>

namespace qkd {

uint64_t enumeration_size(int len) {
    if (len < 0) throw std::invalid_argument("enumeration_size: negative length");
    if (len > kMaxEnumerationBits)
        throw std::invalid_argument("enumeration_size: length " + std::to_string(len) +
                                    " exceeds exhaustive budget of 2^" +
                                    std::to_string(kMaxEnumerationBits));
    return uint64_t(1) << len;
}

BitString::BitString(int len) {
    if (len < 0) throw std::invalid_argument("BitString: negative length");
    len_ = len;
    words_.assign((size_t(len) + 63) / 64, 0);
}

BitString BitString::from_string(const std::string& text) {
    BitString b(int(text.size()));
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1')
            b.set(int(i), true);
        else if (text[i] != '0')
            throw std::invalid_argument("BitString::from_string: bad character '" +
                                        std::string(1, text[i]) + "'");
    }
    return b;
}

BitString BitString::from_index(uint64_t value, int len) {
    if (len < 0 || len > 63) throw std::invalid_argument("from_index: length must be in [0,63]");
    if (len < 63 && (value >> len) != 0)
        throw std::invalid_argument("from_index: value does not fit in length");
    BitString b(len);
    if (len > 0) b.words_[0] = value;
    return b;
}

BitString BitString::random(int len, Rng& rng) {
    BitString b(len);
    for (auto& w : b.words_) w = rng.next_u64();
    b.clear_tail();
    return b;
}

void BitString::check_index(int i) const {
    if (i < 0 || i >= len_)
        throw std::out_of_range("BitString: index " + std::to_string(i) +
                                " out of range [0," + std::to_string(len_) + ")");
}

void BitString::clear_tail() {
    int rem = len_ % 64;
    if (rem != 0 && !words_.empty())
        words_.back() &= (uint64_t(1) << rem) - 1;
}

bool BitString::get(int i) const {
    check_index(i);
    return (words_[size_t(i) / 64] >> (i % 64)) & 1;
}

void BitString::set(int i, bool v) {
    check_index(i);
    uint64_t mask = uint64_t(1) << (i % 64);
    if (v)
        words_[size_t(i) / 64] |= mask;
    else
        words_[size_t(i) / 64] &= ~mask;
}

std::string BitString::to_string() const {
    std::string s(size_t(len_), '0');
    for (int i = 0; i < len_; ++i)
        if (get(i)) s[size_t(i)] = '1';
    return s;
}

uint64_t BitString::to_index() const {
    if (len_ > 63) throw std::invalid_argument("to_index: length exceeds 63");
    return words_.empty() ? 0 : words_[0];
}

int BitString::weight() const {
    int w = 0;
    for (uint64_t word : words_) w += std::popcount(word);
    return w;
}

bool BitString::operator==(const BitString& other) const {
    return len_ == other.len_ && words_ == other.words_;
}

bool BitString::operator<(const BitString& other) const {
    if (len_ != other.len_) return len_ < other.len_;
    for (int i = 0; i < len_; ++i) {
        bool a = get(i), b = other.get(i);
        if (a != b) return b;
    }
    return false;
}

BitString BitString::operator^(const BitString& other) const {
    BitString r = *this;
    r.xor_in_place(other);
    return r;
}

void BitString::xor_in_place(const BitString& other) {
    if (len_ != other.len_)
        throw std::invalid_argument("xor: length mismatch (" + std::to_string(len_) + " vs " +
                                    std::to_string(other.len_) + ")");
    for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
}

int hamming_weight(const BitString& a) { return a.weight(); }

int hamming_distance(const BitString& a, const BitString& b) { return (a ^ b).weight(); }

int dot(const BitString& a, const BitString& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    uint64_t acc = 0;
    const auto& wa = a.words();
    const auto& wb = b.words();
    for (size_t i = 0; i < wa.size(); ++i) acc ^= wa[i] & wb[i];
    return std::popcount(acc) & 1;
}

BitString concat(const BitString& a, const BitString& b) {
    BitString r(a.size() + b.size());
    for (int i = 0; i < a.size(); ++i) r.set(i, a.get(i));
    for (int i = 0; i < b.size(); ++i) r.set(a.size() + i, b.get(i));
    return r;
}

BitString select(const BitString& a, const std::vector<int>& positions) {
    BitString r(int(positions.size()));
    for (size_t i = 0; i < positions.size(); ++i) r.set(int(i), a.get(positions[i]));
    return r;
}

} // namespace qkd
