// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/quad_map.hpp"

#include <algorithm>
#include <limits>

namespace qbmor {

namespace {

void check_index_space(Index rows, Index left, Index right) {
    if (rows < 0 || left < 0 || right < 0)
        throw std::invalid_argument("QuadMap: negative dimension");
    if (left > 0 && right > std::numeric_limits<Index>::max() / std::max<Index>(left, 1))
        throw std::invalid_argument("QuadMap: flat column index space overflows");
}

}  // namespace

QuadMap QuadMap::from_entries(Index rows, Index left_cols, Index right_cols,
                              std::vector<QuadEntry> entries) {
    check_index_space(rows, left_cols, right_cols);
    for (const QuadEntry& e : entries) {
        if (e.row < 0 || e.row >= rows || e.j < 0 || e.j >= left_cols || e.k < 0 ||
            e.k >= right_cols)
            throw std::invalid_argument("QuadMap: entry index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const QuadEntry& a, const QuadEntry& b) {
        if (a.row != b.row) return a.row < b.row;
        if (a.j != b.j) return a.j < b.j;
        return a.k < b.k;
    });
    // Sum duplicates, drop exact zeros.
    std::vector<QuadEntry> canonical;
    canonical.reserve(entries.size());
    for (const QuadEntry& e : entries) {
        if (!canonical.empty() && canonical.back().row == e.row && canonical.back().j == e.j &&
            canonical.back().k == e.k) {
            canonical.back().value += e.value;
        } else {
            canonical.push_back(e);
        }
    }
    canonical.erase(std::remove_if(canonical.begin(), canonical.end(),
                                   [](const QuadEntry& e) { return e.value == 0.0; }),
                    canonical.end());
    QuadMap g(rows, left_cols, right_cols);
    g.entries_ = std::move(canonical);
    return g;
}

Vector QuadMap::apply(const Vector& u, const Vector& v) const {
    if (u.size() != left_ || v.size() != right_)
        throw std::invalid_argument("QuadMap::apply: dimension mismatch");
    Vector out = Vector::Zero(rows_);
    for (const QuadEntry& e : entries_)
        out[e.row] += e.value * u[e.j] * v[e.k];
    return out;
}

Vector QuadMap::apply(const LowRankFactor& f) const {
    if (f.dim() != left_ || left_ != right_)
        throw std::invalid_argument("QuadMap::apply: factor dimension mismatch");
    Vector out = Vector::Zero(rows_);
    const Matrix& r = f.right_factors();
    for (Index k = 0; k < f.rank(); ++k) {
        const auto l = f.left.col(k);
        const auto rr = r.col(k);
        for (const QuadEntry& e : entries_)
            out[e.row] += f.weights[k] * e.value * l[e.j] * rr[e.k];
    }
    return out;
}

Matrix QuadMap::apply_pairs(const Matrix& U, const Matrix& V) const {
    if (U.rows() != left_ || V.rows() != right_)
        throw std::invalid_argument("QuadMap::apply_pairs: dimension mismatch");
    Matrix out = Matrix::Zero(rows_, U.cols() * V.cols());
    for (const QuadEntry& e : entries_)
        for (Index a = 0; a < U.cols(); ++a) {
            const double s = e.value * U(e.j, a);
            for (Index b = 0; b < V.cols(); ++b)
                out(e.row, a * V.cols() + b) += s * V(e.k, b);
        }
    return out;
}

SparseMatrix QuadMap::jacobian_left(const Vector& v) const {
    if (v.size() != right_)
        throw std::invalid_argument("QuadMap::jacobian_left: dimension mismatch");
    std::vector<Triplet> trips;
    trips.reserve(entries_.size());
    for (const QuadEntry& e : entries_)
        trips.emplace_back(e.row, e.j, e.value * v[e.k]);
    SparseMatrix J(rows_, left_);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

SparseMatrix QuadMap::jacobian_right(const Vector& u) const {
    if (u.size() != left_)
        throw std::invalid_argument("QuadMap::jacobian_right: dimension mismatch");
    std::vector<Triplet> trips;
    trips.reserve(entries_.size());
    for (const QuadEntry& e : entries_)
        trips.emplace_back(e.row, e.k, e.value * u[e.j]);
    SparseMatrix J(rows_, right_);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

QuadMap QuadMap::projected(const Matrix& Vl, const Matrix& Vr1, const Matrix& Vr2) const {
    if (Vl.rows() != rows_ || Vr1.rows() != left_ || Vr2.rows() != right_)
        throw std::invalid_argument("QuadMap::projected: dimension mismatch");
    const Index n1 = Vr1.cols();
    const Index n2 = Vr2.cols();
    // T = G (Vr1 ⊗ Vr2), accumulated entrywise: T(row, a·n2+b) += value · Vr1(j,a) · Vr2(k,b).
    Matrix T = Matrix::Zero(rows_, n1 * n2);
    for (const QuadEntry& e : entries_)
        for (Index a = 0; a < n1; ++a) {
            const double s = e.value * Vr1(e.j, a);
            if (s == 0.0)
                continue;
            for (Index b = 0; b < n2; ++b)
                T(e.row, a * n2 + b) += s * Vr2(e.k, b);
        }
    const Matrix R = Vl.transpose() * T;
    std::vector<QuadEntry> entries;
    entries.reserve(static_cast<size_t>(R.size()));
    for (Index r = 0; r < R.rows(); ++r)
        for (Index a = 0; a < n1; ++a)
            for (Index b = 0; b < n2; ++b) {
                const double v = R(r, a * n2 + b);
                if (v != 0.0)
                    entries.push_back({r, a, b, v});
            }
    return from_entries(Vl.cols(), n1, n2, std::move(entries));
}

SparseMatrix QuadMap::flat() const {
    check_index_space(rows_, left_, right_);
    std::vector<Triplet> trips;
    trips.reserve(entries_.size());
    for (const QuadEntry& e : entries_)
        trips.emplace_back(e.row, e.j * right_ + e.k, e.value);
    SparseMatrix F(rows_, left_ * right_);
    F.setFromTriplets(trips.begin(), trips.end());
    return F;
}

double QuadMap::scale(double factor) {
    for (QuadEntry& e : entries_)
        e.value *= factor;
    return factor;
}

}  // namespace qbmor
