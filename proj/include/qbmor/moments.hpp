// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// moments.hpp — moment recursions of the univariate frequency representations
// of generator-driven systems: linear chains, tensor-structured second- and
// third-order chains, dense unrolled representations (oracle scale), and
// pointwise evaluation.

#pragma once

#include "qbmor/lyapunov.hpp"
#include "qbmor/model.hpp"

#include <Eigen/SparseLU>

#include <iosfwd>

namespace qbmor {

// Factorization of the shifted pencil A_{s0} = -s0 E + A.
class ShiftedOperator {
public:
    ShiftedOperator(const SparseMatrix& E, const SparseMatrix& A, double s0);

    Vector solve(const Vector& rhs) const;
    Matrix solve(const Matrix& rhs) const;
    double shift() const { return s0_; }

private:
    double s0_;
    Eigen::SparseLU<SparseMatrix> lu_;
};

// Moments of one frequency representation at one expansion point: the chain
// m_0..m_{L-1} together with the auxiliary tensor-level factors that produced
// it. Third-order chains additionally carry the top-level Tucker values.
struct MomentSet {
    double s0 = 0.0;
    int order = 2;
    std::vector<Vector> m;
    std::vector<LowRankFactor> mhat;
    std::vector<Tucker3> mhathat;          // order 3 only
    std::vector<double> lyap_residuals;    // per-level residuals of the mhat solves
};

// Moments k_i of s ↦ (sE - A)⁻¹B at s0:  A_{s0} k_0 = -B,  A_{s0} k_i = E k_{i-1}.
std::vector<Matrix> linear_moments(const SparseMatrix& E, const SparseMatrix& A,
                                   const Matrix& B, double s0, int L);

// Second-order chain: kron-sum solves for m̂_i (low-rank), sparse shifted
// solves for m_i with sources E m_{i-1} - G m̂_i (G applied factor-wise).
MomentSet w2_moments(const DrivenSystem& D, double s0, int L, const LyapOptions& opts = {});

// Initial conditions parametrized over the column span of B0: one MomentSet
// per ordered column pair (a, b), index a * B0.cols() + b.
std::vector<MomentSet> w2_moments_b0(const DrivenSystem& D, const Matrix& B0, double s0,
                                     int L, const LyapOptions& opts = {});

// Third-order chain (three-level recursion). Dimension capped at 512.
MomentSet w3_moments(const DrivenSystem& D, double s0, int L, const LyapOptions& opts = {});

// Dense unrolled linear representation C (sE - A)⁻¹ b of one frequency
// representation; oracle scale (capped at 4096 matrix entries).
struct DenseRep {
    Matrix E, A, C;
    Vector b;
};
DenseRep dense_rep_w2(const DrivenSystem& D);
DenseRep dense_rep_w3(const DrivenSystem& D);

// Pointwise value W_order(s) through the cascade of shifted solves.
Vector eval_w(const DrivenSystem& D, int order, double s, const LyapOptions& opts = {});

// Verifies the shift-splitting identity  ⊛ⁱ_E A_{s0/i} = -s0 E⊗ⁱ + ⊛ⁱ_E A
// entrywise to 1e-12 (test utility, dense construction).
bool shifted_tensor_check(const SparseMatrix& E, const SparseMatrix& A, double s0, int order);

// Labeled text dump of a moment set.
void dump_moments(std::ostream& os, const MomentSet& ms);

}  // namespace qbmor
