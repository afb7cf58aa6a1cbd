// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/moments.hpp"

#include "qbmor/kron.hpp"

#include <Eigen/SVD>

#include <ostream>

namespace qbmor {

namespace {

constexpr int kMaxChainOrder = 5;   // tensor chains are run without re-orthogonalization
constexpr Index kDenseRepCap = 4096;
constexpr Index kOrder3DimCap = 512;

SparseMatrix shifted_pencil(const SparseMatrix& E, const SparseMatrix& A, double s0) {
    return SparseMatrix(A - s0 * E);
}

void check_chain_order(int L) {
    if (L < 1 || L > kMaxChainOrder)
        throw std::invalid_argument(
            "moment chain order must be between 1 and 5; match further frequencies instead "
            "of higher-order moments");
}

// (G ⊗ E) applied to a Tucker value (B⊗B⊗B)c, returned as the two-sided
// factor [G(B ⊗ B) · C_(12|3)] · (E B)ᵀ where C_(12|3) is the core unfolding
// that pairs the first two slots against the third.
LowRankFactor quad_kron_contract(const QuadMap& G, const SparseMatrix& E, const Tucker3& t) {
    const Index r = t.rank();
    LowRankFactor out;
    if (r == 0) {
        out.left = Matrix::Zero(G.rows(), 0);
        out.right = Matrix::Zero(E.rows(), 0);
        out.weights = Vector::Zero(0);
        return out;
    }
    const Matrix P = G.apply_pairs(t.basis, t.basis);  // rows × r²
    Matrix core12(r * r, r);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < r; ++j)
            for (Index k = 0; k < r; ++k)
                core12(i * r + j, k) = t.core[(i * r + j) * r + k];
    out.left = P * core12;
    out.right = E * t.basis;
    out.weights = Vector::Ones(r);
    return out;
}

LowRankFactor concat_factors(const LowRankFactor& a, const LowRankFactor& b) {
    LowRankFactor out;
    out.left.resize(a.dim(), a.rank() + b.rank());
    out.left << a.left, b.left;
    out.right.resize(a.dim(), a.rank() + b.rank());
    out.right << a.right_factors(), b.right_factors();
    out.weights.resize(a.rank() + b.rank());
    out.weights << a.weights, b.weights;
    return out;
}

// Dense generalized Lyapunov solve packaged as a two-sided factor via SVD.
LowRankFactor dense_lowrank_solve(const SparseMatrix& E, const SparseMatrix& Ashift,
                                  const LowRankFactor& rhs, double drop_tol,
                                  double* residual) {
    const Index M = E.rows();
    const Matrix C = rhs.dense();
    const Matrix X = lyap_dense_generalized(Matrix(E), Matrix(Ashift), C);
    if (residual) {
        const Matrix R = Matrix(Ashift) * X * Matrix(E).transpose() +
                         Matrix(E) * X * Matrix(Ashift).transpose() + C;
        const double denom = C.norm();
        *residual = denom > 0 ? R.norm() / denom : 0.0;
    }
    Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    Index keep = 0;
    while (keep < sv.size() && sv[keep] > drop_tol * smax)
        ++keep;
    LowRankFactor out;
    out.left = svd.matrixU().leftCols(keep);
    out.right = svd.matrixV().leftCols(keep);
    out.weights = sv.head(keep);
    (void)M;
    return out;
}

}  // namespace

ShiftedOperator::ShiftedOperator(const SparseMatrix& E, const SparseMatrix& A, double s0)
    : s0_(s0) {
    lu_.compute(shifted_pencil(E, A, s0));
    if (lu_.info() != Eigen::Success)
        throw std::runtime_error("ShiftedOperator: A - s0 E is singular at s0 = " +
                                 std::to_string(s0));
}

Vector ShiftedOperator::solve(const Vector& rhs) const { return lu_.solve(rhs); }
Matrix ShiftedOperator::solve(const Matrix& rhs) const { return lu_.solve(rhs); }

std::vector<Matrix> linear_moments(const SparseMatrix& E, const SparseMatrix& A,
                                   const Matrix& B, double s0, int L) {
    if (L < 1)
        throw std::invalid_argument("linear_moments: L must be >= 1");
    ShiftedOperator op(E, A, s0);
    std::vector<Matrix> k;
    k.reserve(L);
    k.push_back(op.solve(Matrix(-B)));
    for (int i = 1; i < L; ++i)
        k.push_back(op.solve(Matrix(E * k.back())));
    return k;
}

MomentSet w2_moments(const DrivenSystem& D, double s0, int L, const LyapOptions& opts) {
    check_chain_order(L);
    MomentSet ms;
    ms.s0 = s0;
    ms.order = 2;
    ShiftedOperator op(D.E, D.A, s0);
    LyapunovSolver lyap(D.E, shifted_pencil(D.E, D.A, s0 / 2), opts);

    LowRankFactor rhs = LowRankFactor::from_column(D.b);
    for (int i = 0; i < L; ++i) {
        LyapResult sol = lyap.solve(rhs);
        if (!sol.converged)
            throw std::runtime_error("w2_moments: Lyapunov solve did not reach tolerance (s0 = " +
                                     std::to_string(s0) + ", level " + std::to_string(i) +
                                     ", residual " + std::to_string(sol.residual) + ")");
        ms.mhat.push_back(sol.X);
        ms.lyap_residuals.push_back(sol.residual);
        if (i == 0)
            ms.m.push_back(op.solve(Vector(-D.G.apply(sol.X))));
        else
            ms.m.push_back(op.solve(Vector(D.E * ms.m.back() - D.G.apply(sol.X))));
        if (i + 1 < L) {
            rhs = chain_rhs(D.E, sol.X);
            rhs.weights = -rhs.weights;
        }
    }
    return ms;
}

std::vector<MomentSet> w2_moments_b0(const DrivenSystem& D, const Matrix& B0, double s0,
                                     int L, const LyapOptions& opts) {
    check_chain_order(L);
    if (B0.rows() != D.dim())
        throw std::invalid_argument("w2_moments_b0: B0 row count mismatch");
    ShiftedOperator op(D.E, D.A, s0);
    LyapunovSolver lyap(D.E, shifted_pencil(D.E, D.A, s0 / 2), opts);

    std::vector<MomentSet> sets;
    for (Index a = 0; a < B0.cols(); ++a)
        for (Index b = 0; b < B0.cols(); ++b) {
            MomentSet ms;
            ms.s0 = s0;
            ms.order = 2;
            LowRankFactor rhs;
            rhs.left = B0.col(a);
            if (a != b)
                rhs.right = B0.col(b);
            rhs.weights = Vector::Ones(1);
            for (int i = 0; i < L; ++i) {
                LyapResult sol = lyap.solve(rhs);
                if (!sol.converged)
                    throw std::runtime_error("w2_moments_b0: Lyapunov solve did not converge");
                ms.mhat.push_back(sol.X);
                ms.lyap_residuals.push_back(sol.residual);
                if (i == 0)
                    ms.m.push_back(op.solve(Vector(-D.G.apply(sol.X))));
                else
                    ms.m.push_back(op.solve(Vector(D.E * ms.m.back() - D.G.apply(sol.X))));
                if (i + 1 < L) {
                    rhs = chain_rhs(D.E, sol.X);
                    rhs.weights = -rhs.weights;
                }
            }
            sets.push_back(std::move(ms));
        }
    return sets;
}

MomentSet w3_moments(const DrivenSystem& D, double s0, int L, const LyapOptions& opts) {
    check_chain_order(L);
    const Index M = D.dim();
    if (M > kOrder3DimCap)
        throw std::invalid_argument("w3_moments: dimension exceeds the order-3 cap of 512");
    MomentSet ms;
    ms.s0 = s0;
    ms.order = 3;
    ShiftedOperator op(D.E, D.A, s0);
    const SparseMatrix Ah2 = shifted_pencil(D.E, D.A, s0 / 2);
    const SparseMatrix Ah3 = shifted_pencil(D.E, D.A, s0 / 3);

    Matrix top_basis = D.b;
    Vector top_core = Vector::Ones(1);
    for (int i = 0; i < L; ++i) {
        Kron3Result top = solve_kron_sum3(D.E, Ah3, top_basis, top_core, opts);
        if (!top.converged)
            throw std::runtime_error("w3_moments: Kronecker-sum solve did not reach tolerance");
        ms.mhathat.push_back(top.X);

        // mid level: Ah2-pencil Lyapunov with source -(G ⊗ E) m̂̂_i (- E⊗² m̂_{i-1}).
        LowRankFactor rhs = quad_kron_contract(D.G, D.E, top.X);
        if (i > 0) {
            LowRankFactor carry = chain_rhs(D.E, ms.mhat.back());
            carry.weights = -carry.weights;
            if (carry.symmetric())
                carry.right = carry.left;
            rhs = concat_factors(rhs, carry);
        }
        double mid_res = 0.0;
        LowRankFactor mid = dense_lowrank_solve(D.E, Ah2, rhs, 1e-14, &mid_res);
        ms.mhat.push_back(mid);
        ms.lyap_residuals.push_back(mid_res);

        if (i == 0)
            ms.m.push_back(op.solve(Vector(-2.0 * D.G.apply(mid))));
        else
            ms.m.push_back(op.solve(Vector(D.E * ms.m.back() - 2.0 * D.G.apply(mid))));

        if (i + 1 < L) {
            top_basis = D.E * top.X.basis;
            top_core = -top.X.core;
        }
    }
    return ms;
}

DenseRep dense_rep_w2(const DrivenSystem& D) {
    const Index M = D.dim();
    if (M * M > kDenseRepCap)
        throw std::invalid_argument("dense_rep_w2: dimension exceeds the oracle cap");
    const SparseMatrix EE = kron(D.E, D.E);
    const SparseMatrix KS = kron_sum(2, D.E, D.A);
    DenseRep rep;
    rep.E = Matrix::Zero(M + M * M, M + M * M);
    rep.E.topLeftCorner(M, M) = Matrix(D.E);
    rep.E.bottomRightCorner(M * M, M * M) = Matrix(EE);
    rep.A = Matrix::Zero(M + M * M, M + M * M);
    rep.A.topLeftCorner(M, M) = Matrix(D.A);
    rep.A.block(0, M, M, M * M) = Matrix(D.G.flat());
    rep.A.bottomRightCorner(M * M, M * M) = Matrix(KS);
    rep.b = Vector::Zero(M + M * M);
    rep.b.tail(M * M) = kron_vec(D.b, D.b);
    rep.C = Matrix::Zero(M, M + M * M);
    rep.C.leftCols(M).setIdentity();
    return rep;
}

DenseRep dense_rep_w3(const DrivenSystem& D) {
    const Index M = D.dim();
    const Index M2 = M * M, M3 = M * M * M;
    if (M3 > kDenseRepCap)
        throw std::invalid_argument("dense_rep_w3: dimension exceeds the oracle cap");
    DenseRep rep;
    const Index dim = M + M2 + M3;
    rep.E = Matrix::Zero(dim, dim);
    rep.E.topLeftCorner(M, M) = Matrix(D.E);
    rep.E.block(M, M, M2, M2) = Matrix(kron(D.E, D.E));
    rep.E.block(M + M2, M + M2, M3, M3) = Matrix(kron(D.E, kron(D.E, D.E)));
    rep.A = Matrix::Zero(dim, dim);
    rep.A.topLeftCorner(M, M) = Matrix(D.A);
    rep.A.block(0, M, M, M2) = 2.0 * Matrix(D.G.flat());
    rep.A.block(M, M, M2, M2) = Matrix(kron_sum(2, D.E, D.A));
    rep.A.block(M, M + M2, M2, M3) = Matrix(kron(D.G.flat(), D.E));
    rep.A.block(M + M2, M + M2, M3, M3) = Matrix(kron_sum(3, D.E, D.A));
    rep.b = Vector::Zero(dim);
    rep.b.tail(M3) = kron_vec(D.b, kron_vec(D.b, D.b));
    rep.C = Matrix::Zero(M, dim);
    rep.C.leftCols(M).setIdentity();
    return rep;
}

Vector eval_w(const DrivenSystem& D, int order, double s, const LyapOptions& opts) {
    if (order == 1) {
        ShiftedOperator op(D.E, D.A, s);
        return op.solve(Vector(-D.b));
    }
    LyapOptions tight = opts;
    tight.tol = std::min(opts.tol, 1e-12);
    if (order == 2)
        return w2_moments(D, s, 1, tight).m[0];
    if (order == 3)
        return w3_moments(D, s, 1, tight).m[0];
    throw std::invalid_argument("eval_w: order must be 1, 2 or 3");
}

bool shifted_tensor_check(const SparseMatrix& E, const SparseMatrix& A, double s0, int order) {
    if (order != 2 && order != 3)
        throw std::invalid_argument("shifted_tensor_check: order must be 2 or 3");
    const SparseMatrix Ah = shifted_pencil(E, A, s0 / order);
    const Matrix lhs = Matrix(kron_sum(order, E, Ah));
    SparseMatrix Epow = (order == 2) ? kron(E, E) : kron(E, kron(E, E));
    const Matrix rhs = Matrix(SparseMatrix(-s0 * Epow)) + Matrix(kron_sum(order, E, A));
    return (lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12;
}

void dump_moments(std::ostream& os, const MomentSet& ms) {
    os << "# moments order " << ms.order << " at s0 = " << ms.s0 << "\n";
    for (size_t i = 0; i < ms.m.size(); ++i) {
        os << "m[" << i << "] =";
        for (Index j = 0; j < ms.m[i].size(); ++j)
            os << " " << ms.m[i][j];
        os << "\n";
        if (i < ms.mhat.size())
            os << "mhat[" << i << "] rank " << ms.mhat[i].rank();
        if (i < ms.lyap_residuals.size())
            os << " residual " << ms.lyap_residuals[i];
        os << "\n";
    }
}

}  // namespace qbmor
