#include "qkd/gf2matrix.hpp"

#include <stdexcept>

namespace qkd {

Gf2Matrix::Gf2Matrix(int rows, int cols) : cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Gf2Matrix: negative shape");
    rows_.assign(size_t(rows), BitString(cols));
}

Gf2Matrix::Gf2Matrix(std::vector<BitString> rows) : rows_(std::move(rows)) {
    cols_ = rows_.empty() ? 0 : rows_.front().size();
    for (const auto& r : rows_)
        if (r.size() != cols_) throw std::invalid_argument("Gf2Matrix: ragged rows");
}

void Gf2Matrix::set_row(int i, const BitString& r) {
    if (r.size() != cols_) throw std::invalid_argument("Gf2Matrix::set_row: length mismatch");
    rows_.at(size_t(i)) = r;
}

Gf2Matrix Gf2Matrix::identity(int n) {
    Gf2Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.rows_[size_t(i)].set(i, true);
    return m;
}

bool Gf2Matrix::operator==(const Gf2Matrix& other) const {
    return cols_ == other.cols_ && rows_ == other.rows_;
}

int Gf2Matrix::rank() const {
    std::vector<BitString> work = rows_;
    int rank = 0;
    for (int col = 0; col < cols_ && rank < int(work.size()); ++col) {
        int pivot = -1;
        for (int r = rank; r < int(work.size()); ++r) {
            if (work[size_t(r)].get(col)) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(work[size_t(rank)], work[size_t(pivot)]);
        for (int r = 0; r < int(work.size()); ++r)
            if (r != rank && work[size_t(r)].get(col)) work[size_t(r)].xor_in_place(work[size_t(rank)]);
        ++rank;
    }
    return rank;
}

namespace {

// reduced row echelon form of [m | y]; returns pivot column per reduced row
struct Echelon {
    std::vector<BitString> rows; // coefficient part
    std::vector<bool> rhs;
    std::vector<int> pivot_col; // -1 past the rank
};

Echelon reduce(const Gf2Matrix& m, const std::vector<bool>& y) {
    Echelon e;
    e.rows.reserve(size_t(m.rows()));
    for (int i = 0; i < m.rows(); ++i) e.rows.push_back(m.row(i));
    e.rhs = y;
    e.pivot_col.assign(e.rows.size(), -1);

    int rank = 0;
    for (int col = 0; col < m.cols() && rank < int(e.rows.size()); ++col) {
        int pivot = -1;
        for (int r = rank; r < int(e.rows.size()); ++r)
            if (e.rows[size_t(r)].get(col)) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(e.rows[size_t(rank)], e.rows[size_t(pivot)]);
        std::swap(e.rhs[size_t(rank)], e.rhs[size_t(pivot)]);
        for (int r = 0; r < int(e.rows.size()); ++r) {
            if (r != rank && e.rows[size_t(r)].get(col)) {
                e.rows[size_t(r)].xor_in_place(e.rows[size_t(rank)]);
                e.rhs[size_t(r)] = e.rhs[size_t(r)] ^ e.rhs[size_t(rank)];
            }
        }
        e.pivot_col[size_t(rank)] = col;
        ++rank;
    }
    return e;
}

} // namespace

std::optional<BitString> solve(const Gf2Matrix& m, const BitString& y) {
    if (y.size() != m.rows()) throw std::invalid_argument("solve: rhs length must equal row count");
    std::vector<bool> rhs(size_t(m.rows()));
    for (int i = 0; i < m.rows(); ++i) rhs[size_t(i)] = y.get(i);
    Echelon e = reduce(m, rhs);

    BitString x(m.cols());
    for (size_t r = 0; r < e.rows.size(); ++r) {
        if (e.pivot_col[r] >= 0) {
            if (e.rhs[r]) x.set(e.pivot_col[r], true);
        } else if (e.rhs[r]) {
            return std::nullopt; // 0 = 1 row
        }
    }
    return x;
}

std::vector<BitString> kernel_basis(const Gf2Matrix& m) {
    std::vector<bool> rhs(size_t(m.rows()), false);
    Echelon e = reduce(m, rhs);

    std::vector<bool> is_pivot(size_t(m.cols()), false);
    for (int c : e.pivot_col)
        if (c >= 0) is_pivot[size_t(c)] = true;

    std::vector<BitString> basis;
    for (int free_col = 0; free_col < m.cols(); ++free_col) {
        if (is_pivot[size_t(free_col)]) continue;
        BitString v(m.cols());
        v.set(free_col, true);
        // back-substitute: pivot var = coefficient of the free column
        for (size_t r = 0; r < e.rows.size(); ++r)
            if (e.pivot_col[r] >= 0 && e.rows[r].get(free_col)) v.set(e.pivot_col[r], true);
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace qkd
