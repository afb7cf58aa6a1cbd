// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// lyapunov.hpp — low-rank solvers for shifted Lyapunov-type equations
//   Ashift X Eᵀ + E X Ashiftᵀ + R W Rᵀ = 0
// (tensor form: (E ⊗ Ashift + Ashift ⊗ E) x + rhs = 0) and the rank-structured
// three-term Kronecker-sum counterpart used by third-order expansions.

#pragma once

#include "qbmor/types.hpp"

#include <Eigen/SparseLU>

#include <memory>

namespace qbmor {

struct LyapOptions {
    double tol = 1e-8;     // relative Frobenius residual target
    Index max_rank = 200;  // subspace cap
    int max_iters = 100;
};

struct LyapProblem {
    SparseMatrix E;       // M×M, nonsingular
    SparseMatrix Ashift;  // M×M
    LowRankFactor rhs;
    LyapOptions opts;
};

struct LyapResult {
    LowRankFactor X;
    double residual = 0.0;  // relative Frobenius residual of the returned X
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  // best residual seen up to each iteration
};

// Extended-Krylov projection solver with Galerkin extraction and explicit
// residual monitoring. Factorizations of E and Ashift are reused across
// solves, which the moment recursions rely on.
class LyapunovSolver {
public:
    LyapunovSolver(SparseMatrix E, SparseMatrix Ashift, LyapOptions opts = {});

    // Solve Ashift X Eᵀ + E X Ashiftᵀ + Σ_k w_k l_k r_kᵀ = 0.
    LyapResult solve(const LowRankFactor& rhs) const;

    const LyapOptions& options() const { return opts_; }

private:
    SparseMatrix E_, A_;
    LyapOptions opts_;
    Eigen::SparseLU<SparseMatrix> elu_, alu_;
};

LyapResult solve(const LyapProblem& p);

// Maps a low-rank factor through E on both sides: represents (E ⊗ E) applied
// to Σ w l ⊗ r. Weights are preserved.
LowRankFactor chain_rhs(const SparseMatrix& E, const LowRankFactor& X);

// Dense kernels (Schur-based; also the small projected solve inside the
// iterative path). Solve F X + X Fᵀ + C = 0 for real F, C.
Matrix lyap_dense(const Matrix& F, const Matrix& C);

// A X Eᵀ + E X Aᵀ + C = 0 with nonsingular E.
Matrix lyap_dense_generalized(const Matrix& E, const Matrix& A, const Matrix& C);

// Rank-structured value (B ⊗ B ⊗ B) c with orthonormal B: the closed form the
// three-term Kronecker-sum solver produces.
struct Tucker3 {
    Matrix basis;  // M×r
    Vector core;   // r³, index (i·r + j)·r + k

    Index dim() const { return basis.rows(); }
    Index rank() const { return basis.cols(); }
    // Dense M³ vector; oracle scale only.
    Vector dense_kron() const;
};

struct Kron3Result {
    Tucker3 X;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Solves (Ashift⊗E⊗E + E⊗Ashift⊗E + E⊗E⊗Ashift) x + (rhs_basis ⊗³) rhs_core = 0
// by Galerkin projection onto an extended Krylov subspace.
Kron3Result solve_kron_sum3(const SparseMatrix& E, const SparseMatrix& Ashift,
                            const Matrix& rhs_basis, const Vector& rhs_core,
                            const LyapOptions& opts = {});

}  // namespace qbmor
