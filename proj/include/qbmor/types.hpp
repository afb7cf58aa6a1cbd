// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// types.hpp — shared dense/sparse aliases, low-rank factors, basis utilities.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace qbmor {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Kronecker pairing used everywhere: (u ⊗ v)[j * v.size() + k] = u[j] * v[k].
// Under this convention a vector in R^{M²} corresponds row-major to an M×M
// matrix, and u ⊗ v corresponds to the rank-1 matrix u vᵀ.
inline Vector kron_vec(const Vector& u, const Vector& v) {
    Vector out(u.size() * v.size());
    for (Index j = 0; j < u.size(); ++j)
        out.segment(j * v.size(), v.size()) = u[j] * v;
    return out;
}

// Low-rank representation of a vector in the ⊗²-space: Σ_k w_k l_k ⊗ r_k,
// equivalently the matrix Σ_k w_k l_k r_kᵀ. An empty `right` means r_k = l_k
// (the symmetric case Σ w_k z_k ⊗ z_k).
struct LowRankFactor {
    Matrix left;     // dim × k
    Matrix right;    // dim × k, or empty for the symmetric case
    Vector weights;  // k signed weights

    LowRankFactor() = default;

    bool symmetric() const { return right.size() == 0; }
    Index dim() const { return left.rows(); }
    Index rank() const { return left.cols(); }
    bool empty() const { return left.cols() == 0; }

    const Matrix& right_factors() const { return symmetric() ? left : right; }

    static LowRankFactor from_column(const Vector& z) {
        LowRankFactor f;
        f.left = z;
        f.weights = Vector::Ones(1);
        return f;
    }

    static LowRankFactor zero(Index dim) {
        LowRankFactor f;
        f.left = Matrix::Zero(dim, 0);
        f.weights = Vector::Zero(0);
        return f;
    }

    // Σ w_k l_k r_kᵀ as a dense matrix. Oracle/debug scale only.
    Matrix dense() const {
        Matrix out = Matrix::Zero(dim(), dim());
        const Matrix& r = right_factors();
        for (Index k = 0; k < rank(); ++k)
            out.noalias() += weights[k] * left.col(k) * r.col(k).transpose();
        return out;
    }

    // Row-major vectorization of dense(), i.e. Σ w_k l_k ⊗ r_k in R^{dim²}.
    Vector dense_kron() const {
        const Matrix d = dense();
        Vector out(dim() * dim());
        for (Index i = 0; i < dim(); ++i)
            out.segment(i * dim(), dim()) = d.row(i).transpose();
        return out;
    }
};

// Orthonormalize `W` against the columns already in `basis` and append the
// surviving directions (modified Gram-Schmidt with one re-orthogonalization
// pass). Columns whose remainder drops below drop_tol relative to their
// original norm are deflated. Returns the number of columns appended.
Index orthonormal_extend(Matrix& basis, const Matrix& W, double drop_tol = 1e-10);

inline Matrix orthonormalize(const Matrix& W, double drop_tol = 1e-10) {
    Matrix basis(W.rows(), 0);
    orthonormal_extend(basis, W, drop_tol);
    return basis;
}

// Principal angles between the column spans of A and B (both orthonormalized
// internally), ascending, in radians.
Vector principal_angles(const Matrix& A, const Matrix& B);

// max |QᵀQ - I| — orthonormality defect of a basis.
double orthonormality_defect(const Matrix& Q);

}  // namespace qbmor
