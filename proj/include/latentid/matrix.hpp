/*
 * Copyright 2026 The latentid authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cassert>
#include <initializer_list>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "latentid/errors.hpp"
#include "latentid/rational.hpp"

namespace latentid {

/*
 * Dense matrix of exact rationals, row-major.
 *
 * Rank and determinant use fraction-free (Bareiss) elimination: every
 * intermediate division is exact, so an integer matrix stays integral
 * throughout and denominators never build up.  Pivoting picks the first
 * nonzero entry in column order; there is no notion of magnitude-based
 * pivot quality over exact rationals.
 */
class RatMatrix {
public:
    RatMatrix() = default;

    RatMatrix(int rows, int cols) {
        if (rows < 0 || cols < 0) throw index_error("negative matrix dimension");
        rows_ = rows;
        cols_ = cols;
        a_.assign(static_cast<std::size_t>(rows) * cols, Rat(0));
    }

    RatMatrix(std::initializer_list<std::initializer_list<long>> rows) {
        rows_ = static_cast<int>(rows.size());
        cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
        a_.reserve(static_cast<std::size_t>(rows_) * cols_);
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != cols_)
                throw size_error("ragged initializer for matrix");
            for (long v : r) a_.emplace_back(v);
        }
    }

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rat& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }
    const Rat& operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }

    RatMatrix transpose() const {
        RatMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_square() const { return rows_ == cols_; }

    bool is_symmetric() const {
        if (!is_square()) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    void swap_rows(int i, int j) {
        for (int c = 0; c < cols_; ++c)
            std::swap((*this)(i, c), (*this)(j, c));
    }

    friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

    friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw size_error("matrix sum shape mismatch");
        RatMatrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] + b.a_[k];
        return r;
    }

    friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw size_error("matrix difference shape mismatch");
        RatMatrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] - b.a_[k];
        return r;
    }

    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
        if (a.cols_ != b.rows_) throw size_error("matrix product shape mismatch");
        RatMatrix r(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Rat& aik = a(i, k);
                if (aik == 0) continue;
                for (int j = 0; j < b.cols_; ++j) {
                    if (b(k, j) == 0) continue;
                    r(i, j) += aik * b(k, j);
                }
            }
        return r;
    }

    friend RatMatrix operator*(const Rat& s, const RatMatrix& a) {
        RatMatrix r(a.rows_, a.cols_);
        for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = s * a.a_[k];
        return r;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Rat> a_;
};

/// Exact rank over the rationals.  Rank of a 0 x n or n x 0 matrix is 0.
inline int rank(RatMatrix m) {
    const int nr = m.rows(), nc = m.cols();
    int r = 0;
    Rat prev(1);
    for (int col = 0; col < nc && r < nr; ++col) {
        int pivot = -1;
        for (int i = r; i < nr; ++i)
            if (m(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r) m.swap_rows(pivot, r);
        for (int i = r + 1; i < nr; ++i) {
            for (int j = col + 1; j < nc; ++j)
                m(i, j) = (m(r, col) * m(i, j) - m(i, col) * m(r, j)) / prev;
            m(i, col) = 0;
        }
        prev = m(r, col);
        ++r;
    }
    return r;
}

/// Exact determinant (Bareiss).
inline Rat det(RatMatrix m) {
    if (!m.is_square()) throw size_error("determinant of a non-square matrix");
    const int n = m.rows();
    if (n == 0) return Rat(1);
    int sign = 1;
    Rat prev(1);
    for (int k = 0; k < n; ++k) {
        int pivot = -1;
        for (int i = k; i < n; ++i)
            if (m(i, k) != 0) { pivot = i; break; }
        if (pivot < 0) return Rat(0);
        if (pivot != k) {
            m.swap_rows(pivot, k);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j)
                m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
            m(i, k) = 0;
        }
        prev = m(k, k);
    }
    return sign < 0 ? Rat(-prev) : prev;
}

/// Exact inverse via Gauss-Jordan.  Throws singular_error when rank < size.
inline RatMatrix inverse(const RatMatrix& m) {
    if (!m.is_square()) throw size_error("inverse of a non-square matrix");
    const int n = m.rows();
    RatMatrix work = m;
    RatMatrix inv = RatMatrix::identity(n);
    for (int k = 0; k < n; ++k) {
        int pivot = -1;
        for (int i = k; i < n; ++i)
            if (work(i, k) != 0) { pivot = i; break; }
        if (pivot < 0) throw singular_error("matrix is singular");
        if (pivot != k) {
            work.swap_rows(pivot, k);
            inv.swap_rows(pivot, k);
        }
        const Rat p = work(k, k);
        for (int j = 0; j < n; ++j) {
            work(k, j) /= p;
            inv(k, j) /= p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k || work(i, k) == 0) continue;
            const Rat f = work(i, k);
            for (int j = 0; j < n; ++j) {
                work(i, j) -= f * work(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

/*
 * Unique solution of a possibly overdetermined system A x = b.
 * Returns nullopt when the system is inconsistent or has more than one
 * solution (rank(A) < cols).
 */
inline std::optional<std::vector<Rat>> solve_unique(const RatMatrix& a,
                                                    const std::vector<Rat>& b) {
    const int nr = a.rows(), nc = a.cols();
    if (static_cast<int>(b.size()) != nr) throw size_error("rhs length mismatch");
    RatMatrix aug(nr, nc + 1);
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nc; ++j) aug(i, j) = a(i, j);
        aug(i, nc) = b[i];
    }
    std::vector<int> pivot_col;
    int r = 0;
    for (int col = 0; col < nc && r < nr; ++col) {
        int pivot = -1;
        for (int i = r; i < nr; ++i)
            if (aug(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r) aug.swap_rows(pivot, r);
        for (int i = r + 1; i < nr; ++i) {
            if (aug(i, col) == 0) continue;
            const Rat f = aug(i, col) / aug(r, col);
            for (int j = col; j <= nc; ++j) aug(i, j) -= f * aug(r, j);
        }
        pivot_col.push_back(col);
        ++r;
    }
    for (int i = r; i < nr; ++i)
        if (aug(i, nc) != 0) return std::nullopt;  // inconsistent
    if (r < nc) return std::nullopt;               // underdetermined
    std::vector<Rat> x(nc, Rat(0));
    for (int i = r - 1; i >= 0; --i) {
        const int col = pivot_col[i];
        Rat acc = aug(i, nc);
        for (int j = col + 1; j < nc; ++j) acc -= aug(i, j) * x[j];
        x[col] = acc / aug(i, col);
    }
    return x;
}

/// Positive definiteness of a symmetric matrix via leading principal minors.
inline bool is_positive_definite(const RatMatrix& m) {
    if (!m.is_symmetric()) return false;
    for (int k = 1; k <= m.rows(); ++k) {
        RatMatrix lead(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) lead(i, j) = m(i, j);
        if (sign(det(std::move(lead))) <= 0) return false;
    }
    return true;
}

/*
 * Matrix text format: first content line "rows cols", then rows*cols
 * entries in row-major order, whitespace separated, each an integer or
 * "p/q".  Blank lines and lines starting with '#' are ignored.
 */
inline RatMatrix read_matrix(std::istream& in) {
    std::vector<std::pair<std::string, long>> tokens;  // token, line
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string::size_type first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.emplace_back(tok, lineno);
    }
    if (tokens.size() < 2) throw parse_error("expected 'rows cols' header", lineno);
    long rows = 0, cols = 0;
    try {
        rows = std::stol(tokens[0].first);
        cols = std::stol(tokens[1].first);
    } catch (const std::exception&) {
        throw parse_error("bad matrix header '" + tokens[0].first + " " + tokens[1].first + "'",
                          tokens[0].second);
    }
    if (rows < 0 || cols < 0) throw parse_error("negative matrix dimension", tokens[0].second);
    const std::size_t need = static_cast<std::size_t>(rows) * cols;
    if (tokens.size() - 2 != need)
        throw parse_error("expected " + std::to_string(need) + " entries, found " +
                              std::to_string(tokens.size() - 2),
                          lineno);
    RatMatrix m(static_cast<int>(rows), static_cast<int>(cols));
    std::size_t t = 2;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j, ++t) {
            try {
                m(i, j) = parse_rat(tokens[t].first);
            } catch (const parse_error& e) {
                throw parse_error(e.what(), tokens[t].second);
            }
        }
    return m;
}

inline void write_matrix(std::ostream& out, const RatMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << to_string(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace latentid
