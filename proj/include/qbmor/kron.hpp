// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// kron.hpp — sparse Kronecker products, symmetrized Kronecker sums and the
// block-interleaving permutation.

#pragma once

#include "qbmor/types.hpp"

namespace qbmor {

// Standard Kronecker product of sparse matrices.
SparseMatrix kron(const SparseMatrix& A, const SparseMatrix& B);

// Symmetrized Kronecker sum: order 2 gives Q⊗P + P⊗Q, order 3 places Q once
// in each of the three slots among copies of P. P, Q square of equal size.
SparseMatrix kron_sum(int order, const SparseMatrix& P, const SparseMatrix& Q);

// Block-interleaving permutation M with
//   Mᵀ (P ⊗ [[A,B],[C,D]]) M = [[P⊗A, P⊗B],[P⊗C, P⊗D]]
// for P of size m_dim and D of size k_dim. M is orthogonal.
SparseMatrix perm_block(Index m_dim, Index k_dim);

// Sparse identity.
SparseMatrix speye(Index n);

SparseMatrix to_sparse(const Matrix& A, double prune_tol = 0.0);

}  // namespace qbmor
