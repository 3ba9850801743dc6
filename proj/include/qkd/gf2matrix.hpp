// Dense GF(2) matrices stored as packed rows, with Gaussian elimination
// for rank, particular solutions, and null-space bases.

#ifndef QKD_GF2MATRIX_HPP
#define QKD_GF2MATRIX_HPP

#include <optional>
#include <vector>

#include "qkd/bitstring.hpp"

namespace qkd {

class Gf2Matrix {
public:
    Gf2Matrix() = default;
    Gf2Matrix(int rows, int cols);
    explicit Gf2Matrix(std::vector<BitString> rows);

    int rows() const { return int(rows_.size()); }
    int cols() const { return cols_; }

    const BitString& row(int i) const { return rows_.at(size_t(i)); }
    void set_row(int i, const BitString& r);

    bool get(int r, int c) const { return rows_.at(size_t(r)).get(c); }

    static Gf2Matrix identity(int n);

    int rank() const;

    bool operator==(const Gf2Matrix& other) const;

private:
    int cols_ = 0;
    std::vector<BitString> rows_;
};

// Solve v_i . x = y_i over GF(2) where v_i are the rows of m.
// Returns one particular solution, or nullopt if the system is inconsistent.
std::optional<BitString> solve(const Gf2Matrix& m, const BitString& y);

// Basis of { x : v_i . x = 0 for every row v_i }; has cols - rank elements.
std::vector<BitString> kernel_basis(const Gf2Matrix& m);

} // namespace qkd

#endif
