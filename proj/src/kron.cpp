// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/kron.hpp"

#include <limits>

namespace qbmor {

SparseMatrix kron(const SparseMatrix& A, const SparseMatrix& B) {
    if (A.rows() > 0 && B.rows() > std::numeric_limits<Index>::max() / A.rows())
        throw std::invalid_argument("kron: result row dimension overflows index space");
    if (A.cols() > 0 && B.cols() > std::numeric_limits<Index>::max() / A.cols())
        throw std::invalid_argument("kron: result column dimension overflows index space");
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(A.nonZeros()) * static_cast<size_t>(B.nonZeros()));
    for (Index ka = 0; ka < A.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ita(A, ka); ita; ++ita)
            for (Index kb = 0; kb < B.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator itb(B, kb); itb; ++itb)
                    trips.emplace_back(ita.row() * B.rows() + itb.row(),
                                       ita.col() * B.cols() + itb.col(),
                                       ita.value() * itb.value());
    SparseMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

SparseMatrix kron_sum(int order, const SparseMatrix& P, const SparseMatrix& Q) {
    if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows())
        throw std::invalid_argument("kron_sum: P, Q must be square of equal size");
    if (order == 2)
        return kron(Q, P) + kron(P, Q);
    if (order == 3) {
        const SparseMatrix PP = kron(P, P);
        return kron(Q, PP) + kron(P, kron(Q, P)) + kron(PP, Q);
    }
    throw std::invalid_argument("kron_sum: order must be 2 or 3");
}

SparseMatrix perm_block(Index m_dim, Index k_dim) {
    if (m_dim < 1 || k_dim < 1)
        throw std::invalid_argument("perm_block: dimensions must be >= 1");
    const Index s = m_dim + k_dim;
    // M = [ I_m ⊗ [I_m; 0] , I_m ⊗ [0; I_k] ]: column block one maps pair (i, j)
    // with j < m_dim to row i·s + j, block two maps (i, j) to row i·s + m_dim + j.
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(m_dim * s));
    for (Index i = 0; i < m_dim; ++i) {
        for (Index j = 0; j < m_dim; ++j)
            trips.emplace_back(i * s + j, i * m_dim + j, 1.0);
        for (Index j = 0; j < k_dim; ++j)
            trips.emplace_back(i * s + m_dim + j, m_dim * m_dim + i * k_dim + j, 1.0);
    }
    SparseMatrix M(m_dim * s, m_dim * s);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

SparseMatrix speye(Index n) {
    SparseMatrix I(n, n);
    I.setIdentity();
    return I;
}

SparseMatrix to_sparse(const Matrix& A, double prune_tol) {
    std::vector<Triplet> trips;
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
            if (std::abs(A(i, j)) > prune_tol)
                trips.emplace_back(i, j, A(i, j));
    SparseMatrix S(A.rows(), A.cols());
    S.setFromTriplets(trips.begin(), trips.end());
    return S;
}

}  // namespace qbmor
