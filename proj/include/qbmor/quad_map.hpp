// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// quad_map.hpp — sparse quadratic coupling maps G: (u, v) ↦ G (u ⊗ v).

#pragma once

#include "qbmor/types.hpp"

namespace qbmor {

// One coefficient of a quadratic form: value * u[j] * v[k] added to row `row`.
struct QuadEntry {
    Index row;
    Index j;
    Index k;
    double value;
};

// Sparse map R^{left} × R^{right} → R^{rows}, (u, v) ↦ G (u ⊗ v), stored as
// coordinates so that projections never materialize Kronecker products.
// Entries are canonicalized on construction: sorted by (row, j, k) with
// duplicates summed and exact zeros dropped.
class QuadMap {
public:
    QuadMap() = default;
    QuadMap(Index rows, Index left_cols, Index right_cols)
        : rows_(rows), left_(left_cols), right_(right_cols) {}

    static QuadMap from_entries(Index rows, Index left_cols, Index right_cols,
                                std::vector<QuadEntry> entries);

    Index rows() const { return rows_; }
    Index left_cols() const { return left_; }
    Index right_cols() const { return right_; }
    const std::vector<QuadEntry>& entries() const { return entries_; }
    Index nonzeros() const { return static_cast<Index>(entries_.size()); }
    bool is_zero() const { return entries_.empty(); }

    // G (u ⊗ v).
    Vector apply(const Vector& u, const Vector& v) const;

    // Σ_k w_k G (l_k ⊗ r_k) — a low-rank argument applied term by term.
    Vector apply(const LowRankFactor& f) const;

    // Columns G (U.col(a) ⊗ V.col(b)) for all pairs, column index a * V.cols() + b.
    Matrix apply_pairs(const Matrix& U, const Matrix& V) const;

    // Jacobian of u ↦ G (u ⊗ v) at fixed v: entries (row, j) = Σ_k value · v[k].
    SparseMatrix jacobian_left(const Vector& v) const;
    // Jacobian of v ↦ G (u ⊗ v) at fixed u.
    SparseMatrix jacobian_right(const Vector& u) const;

    // Vlᵀ G (Vr1 ⊗ Vr2) as a QuadMap of reduced dimensions, computed without
    // forming Vr1 ⊗ Vr2.
    QuadMap projected(const Matrix& Vl, const Matrix& Vr1, const Matrix& Vr2) const;

    // Flat sparse matrix of shape rows × (left · right) with the row-major
    // Kronecker column index j * right + k.
    SparseMatrix flat() const;

    double scale(double factor);  // in-place scaling; returns factor for chaining

private:
    Index rows_ = 0;
    Index left_ = 0;
    Index right_ = 0;
    std::vector<QuadEntry> entries_;
};

}  // namespace qbmor
