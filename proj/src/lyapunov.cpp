// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <complex>

namespace qbmor {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Thin orthonormal basis of the column span (rank-revealing enough for
// residual embeddings; exact spans are guaranteed by construction).
Matrix thin_orth(const Matrix& W) {
    if (W.cols() == 0)
        return Matrix(W.rows(), 0);
    Eigen::HouseholderQR<Matrix> qr(W);
    const Index r = std::min(W.rows(), W.cols());
    return qr.householderQ() * Matrix::Identity(W.rows(), r);
}

// ‖L W Rᵀ‖_F via small Gram matrices.
double factor_frobenius(const Matrix& L, const Vector& w, const Matrix& R) {
    if (L.cols() == 0)
        return 0.0;
    const Matrix GL = L.transpose() * L;
    const Matrix GR = R.transpose() * R;
    const Matrix WGW = w.asDiagonal() * GL * w.asDiagonal();
    const double sq = (WGW.array() * GR.array()).sum();
    return std::sqrt(std::max(0.0, sq));
}

}  // namespace

Matrix lyap_dense(const Matrix& F, const Matrix& C) {
    if (F.rows() != F.cols() || C.rows() != F.rows() || C.cols() != F.rows())
        throw std::invalid_argument("lyap_dense: dimension mismatch");
    const Index n = F.rows();
    if (n == 0)
        return Matrix(0, 0);
    Eigen::ComplexSchur<Matrix> schur(F);
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("lyap_dense: Schur decomposition failed");
    const ComplexMatrix U = schur.matrixU();
    const ComplexMatrix T = schur.matrixT();
    // F X + X Fᵀ + C = 0 with X = U Z Uᵀ turns into T Z + Z Tᵀ = -Uᴴ C conj(U);
    // back-substitute columns from the last one.
    ComplexMatrix W = -U.adjoint() * C * U.conjugate();
    ComplexMatrix Z(n, n);
    const double scale = T.cwiseAbs().maxCoeff() + 1e-300;
    for (Index j = n - 1; j >= 0; --j) {
        ComplexVector rhs = W.col(j);
        for (Index k = j + 1; k < n; ++k)
            rhs -= T(j, k) * Z.col(k);
        ComplexMatrix Tj = T;
        Tj.diagonal().array() += T(j, j);
        for (Index i = 0; i < n; ++i)
            if (std::abs(Tj(i, i)) < 1e-14 * scale)
                throw std::runtime_error(
                    "lyap_dense: singular projected problem (eigenvalue pair sums to zero)");
        Z.col(j) = Tj.triangularView<Eigen::Upper>().solve(rhs);
    }
    return (U * Z * U.transpose()).real();
}

Matrix lyap_dense_generalized(const Matrix& E, const Matrix& A, const Matrix& C) {
    Eigen::PartialPivLU<Matrix> elu(E);
    const Matrix F = elu.solve(A);
    const Matrix tmp = elu.solve(C);
    const Matrix Ct = elu.solve(tmp.transpose()).transpose();
    return lyap_dense(F, Ct);
}

LowRankFactor chain_rhs(const SparseMatrix& E, const LowRankFactor& X) {
    if (X.dim() != E.cols())
        throw std::invalid_argument("chain_rhs: dimension mismatch");
    LowRankFactor out;
    out.left = E * X.left;
    if (!X.symmetric())
        out.right = E * X.right;
    out.weights = X.weights;
    return out;
}

LyapunovSolver::LyapunovSolver(SparseMatrix E, SparseMatrix Ashift, LyapOptions opts)
    : E_(std::move(E)), A_(std::move(Ashift)), opts_(opts) {
    if (E_.rows() != E_.cols() || A_.rows() != A_.cols() || E_.rows() != A_.rows())
        throw std::invalid_argument("LyapunovSolver: E, Ashift must be square of equal size");
    elu_.compute(E_);
    if (elu_.info() != Eigen::Success)
        throw std::runtime_error("LyapunovSolver: E is singular");
    alu_.compute(A_);
    if (alu_.info() != Eigen::Success)
        throw std::runtime_error("LyapunovSolver: shifted operator is singular");
}

LyapResult LyapunovSolver::solve(const LowRankFactor& rhs) const {
    const Index M = E_.rows();
    if (rhs.dim() != M)
        throw std::invalid_argument("LyapunovSolver::solve: rhs dimension mismatch");

    LyapResult result;
    const bool sym = rhs.symmetric();
    if (rhs.rank() == 0 || rhs.weights.cwiseAbs().maxCoeff() == 0.0) {
        result.X = LowRankFactor::zero(M);
        if (!sym)
            result.X.right = Matrix::Zero(M, 0);
        result.converged = true;
        return result;
    }

    // Transform to F X + X Fᵀ + CL W CRᵀ = 0 with F = E⁻¹ Ashift.
    const Matrix CL = elu_.solve(Matrix(rhs.left));
    const Matrix CR = sym ? CL : elu_.solve(Matrix(rhs.right));
    const Vector& w = rhs.weights;
    const double rhs_norm = factor_frobenius(CL, w, CR);
    if (rhs_norm == 0.0) {
        result.X = LowRankFactor::zero(M);
        result.converged = true;
        return result;
    }

    Matrix V(M, 0);
    orthonormal_extend(V, CL);
    if (!sym)
        orthonormal_extend(V, CR);
    Matrix FV(M, 0);
    auto extend_fv = [&](Index from) {
        const Index add = V.cols() - from;
        if (add <= 0)
            return;
        FV.conservativeResize(M, V.cols());
        FV.rightCols(add) = elu_.solve(Matrix(A_ * V.rightCols(add)));
    };
    extend_fv(0);

    Matrix blockF = V;  // direction seeds for the two Krylov chains
    Matrix blockB = V;

    Matrix Y_best;
    Index cols_best = 0;
    double res_best = std::numeric_limits<double>::infinity();
    // Residual of X = V(:,1:k) Y V(:,1:k)ᵀ, evaluated exactly in the span of
    // [V, FV, CL, CR].
    auto residual_of = [&](const Matrix& Y, Index k) {
        Matrix embed(M, V.cols() + FV.cols() + CL.cols() + CR.cols());
        embed << V, FV, CL, (sym ? CL : CR);
        const Matrix U = thin_orth(embed);
        const Matrix P0 = U.transpose() * V.leftCols(k);
        const Matrix P1 = U.transpose() * FV.leftCols(k);
        const Matrix PcL = U.transpose() * CL;
        const Matrix PcR = sym ? PcL : Matrix(U.transpose() * CR);
        const Matrix R = P1 * Y * P0.transpose() + P0 * Y * P1.transpose() +
                         PcL * w.asDiagonal() * PcR.transpose();
        return R.norm() / rhs_norm;
    };

    int it = 0;
    for (it = 1; it <= opts_.max_iters; ++it) {
        const Index k = V.cols();
        const Matrix Fm = V.transpose() * FV;
        const Matrix Cs = (V.transpose() * CL) * w.asDiagonal() *
                          (sym ? (V.transpose() * CL) : Matrix(V.transpose() * CR)).transpose();
        const Matrix Y = lyap_dense(Fm, Cs);
        const double res = residual_of(Y, k);
        if (res < res_best) {
            res_best = res;
            Y_best = Y;
            cols_best = k;
        }
        result.residual_history.push_back(res_best);
        if (res_best <= opts_.tol)
            break;
        if (V.cols() >= opts_.max_rank)
            break;

        const Index before = V.cols();
        const Matrix candF = elu_.solve(Matrix(A_ * blockF));
        const Index addedF_from = V.cols();
        orthonormal_extend(V, candF);
        const Index addedF = V.cols() - addedF_from;
        const Matrix candB = alu_.solve(Matrix(E_ * blockB));
        const Index addedB_from = V.cols();
        orthonormal_extend(V, candB);
        const Index addedB = V.cols() - addedB_from;
        if (V.cols() == before)
            break;  // invariant subspace reached
        extend_fv(before);
        if (addedF > 0)
            blockF = V.middleCols(addedF_from, addedF);
        if (addedB > 0)
            blockB = V.middleCols(addedB_from, addedB);
    }
    result.iterations = it;

    // Extract factors from the best iterate; truncate small weights but never
    // past the residual target.
    const Matrix Vb = V.leftCols(cols_best);
    Matrix left, right;
    Vector weights;
    Matrix Q_l, Q_r;  // small factors of Y_best for residual re-checks
    Vector vals;
    if (sym) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (Y_best + Y_best.transpose()));
        Q_l = eig.eigenvectors();
        vals = eig.eigenvalues();
    } else {
        Eigen::JacobiSVD<Matrix> svd(Y_best, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Q_l = svd.matrixU();
        Q_r = svd.matrixV();
        vals = svd.singularValues();
    }
    const double wmax = vals.size() ? vals.cwiseAbs().maxCoeff() : 0.0;
    auto assemble = [&](double drop) {
        std::vector<Index> keep;
        for (Index i = 0; i < vals.size(); ++i)
            if (std::abs(vals[i]) > drop * wmax)
                keep.push_back(i);
        Matrix Yk = Matrix::Zero(cols_best, cols_best);
        for (Index i : keep)
            Yk.noalias() += vals[i] * Q_l.col(i) *
                            (sym ? Q_l.col(i) : Q_r.col(i)).transpose();
        return std::make_pair(keep, Yk);
    };
    auto [keep, Yk] = assemble(opts_.tol);
    double res_trunc = residual_of(Yk, cols_best);
    if (res_trunc > std::max(opts_.tol, 1.05 * res_best)) {
        std::tie(keep, Yk) = assemble(1e-15);
        res_trunc = residual_of(Yk, cols_best);
    }
    left.resize(M, static_cast<Index>(keep.size()));
    if (!sym)
        right.resize(M, static_cast<Index>(keep.size()));
    weights.resize(static_cast<Index>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) {
        left.col(static_cast<Index>(i)) = Vb * Q_l.col(keep[i]);
        if (!sym)
            right.col(static_cast<Index>(i)) = Vb * Q_r.col(keep[i]);
        weights[static_cast<Index>(i)] = vals[keep[i]];
    }
    result.X.left = std::move(left);
    if (!sym)
        result.X.right = std::move(right);
    result.X.weights = std::move(weights);
    result.residual = res_trunc;
    result.converged = result.residual <= opts_.tol;
    return result;
}

LyapResult solve(const LyapProblem& p) {
    LyapunovSolver solver(p.E, p.Ashift, p.opts);
    return solver.solve(p.rhs);
}

// ------------------------- three-term Kronecker sum -------------------------

namespace {

// (A1 ⊗ A2 ⊗ A3) t for a flat tensor t with index (i·r2 + j)·r3 + k.
template <typename Mat, typename Vec>
Vec mode_product3(const Mat& A1, const Mat& A2, const Mat& A3, const Vec& t) {
    const Index r1 = A1.cols(), r2 = A2.cols(), r3 = A3.cols();
    const Index m1 = A1.rows(), m2 = A2.rows(), m3 = A3.rows();
    if (t.size() != r1 * r2 * r3)
        throw std::invalid_argument("mode_product3: core size mismatch");
    // mode 3
    Vec s1(r1 * r2 * m3);
    for (Index ij = 0; ij < r1 * r2; ++ij)
        s1.segment(ij * m3, m3) = A3 * t.segment(ij * r3, r3);
    // mode 2
    Vec s2(r1 * m2 * m3);
    for (Index i = 0; i < r1; ++i)
        for (Index c = 0; c < m3; ++c) {
            Vec col(r2);
            for (Index j = 0; j < r2; ++j)
                col[j] = s1[(i * r2 + j) * m3 + c];
            const Vec out = A2 * col;
            for (Index b = 0; b < m2; ++b)
                s2[(i * m2 + b) * m3 + c] = out[b];
        }
    // mode 1
    Vec s3 = Vec::Zero(m1 * m2 * m3);
    for (Index a = 0; a < m1; ++a)
        for (Index i = 0; i < r1; ++i) {
            const auto coeff = A1(a, i);
            if (coeff == typename Mat::Scalar(0))
                continue;
            s3.segment(a * m2 * m3, m2 * m3) += coeff * s2.segment(i * m2 * m3, m2 * m3);
        }
    return s3;
}

}  // namespace

Vector Tucker3::dense_kron() const {
    return mode_product3<Matrix, Vector>(basis, basis, basis, core);
}

Kron3Result solve_kron_sum3(const SparseMatrix& E, const SparseMatrix& Ashift,
                            const Matrix& rhs_basis, const Vector& rhs_core,
                            const LyapOptions& opts) {
    const Index M = E.rows();
    if (rhs_basis.rows() != M)
        throw std::invalid_argument("solve_kron_sum3: rhs basis dimension mismatch");
    Eigen::SparseLU<SparseMatrix> elu(E);
    if (elu.info() != Eigen::Success)
        throw std::runtime_error("solve_kron_sum3: E is singular");
    Eigen::SparseLU<SparseMatrix> alu(Ashift);
    if (alu.info() != Eigen::Success)
        throw std::runtime_error("solve_kron_sum3: shifted operator is singular");

    Kron3Result result;
    const Index rb = rhs_basis.cols();
    if (rb == 0 || rhs_core.size() == 0 || rhs_core.cwiseAbs().maxCoeff() == 0.0) {
        result.X.basis = Matrix::Zero(M, 0);
        result.X.core = Vector::Zero(0);
        result.converged = true;
        return result;
    }

    const Matrix CB = elu.solve(rhs_basis);
    // ‖(CB ⊗³) core‖ through a QR of CB.
    double rhs_norm;
    {
        Eigen::HouseholderQR<Matrix> qr(CB);
        const Matrix R = qr.matrixQR().topRows(std::min(M, rb)).triangularView<Eigen::Upper>();
        rhs_norm = mode_product3<Matrix, Vector>(R, R, R, rhs_core).norm();
    }
    if (rhs_norm == 0.0) {
        result.X.basis = Matrix::Zero(M, 0);
        result.X.core = Vector::Zero(0);
        result.converged = true;
        return result;
    }

    Matrix V(M, 0);
    orthonormal_extend(V, CB);
    Matrix FV(M, 0);
    auto extend_fv = [&](Index from) {
        const Index add = V.cols() - from;
        if (add <= 0)
            return;
        FV.conservativeResize(M, V.cols());
        FV.rightCols(add) = elu.solve(Matrix(Ashift * V.rightCols(add)));
    };
    extend_fv(0);
    Matrix blockF = V, blockB = V;

    Vector y_best;
    Index cols_best = 0;
    double res_best = std::numeric_limits<double>::infinity();

    int it = 0;
    for (it = 1; it <= opts.max_iters; ++it) {
        const Index k = V.cols();
        const Matrix Fm = V.transpose() * FV;
        const Matrix P = V.transpose() * CB;  // CB ⊂ span(V) by construction
        const Vector core_proj = mode_product3<Matrix, Vector>(P, P, P, rhs_core);

        // (Fm ⊕ Fm ⊕ Fm) y = -core_proj through diagonalization.
        Eigen::ComplexEigenSolver<Matrix> eig(Fm);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("solve_kron_sum3: projected eigenproblem failed");
        const ComplexMatrix S = eig.eigenvectors();
        const ComplexVector lam = eig.eigenvalues();
        Eigen::PartialPivLU<ComplexMatrix> slu(S);
        const ComplexMatrix Sinv = slu.inverse();
        ComplexVector d = mode_product3<ComplexMatrix, ComplexVector>(
            Sinv, Sinv, Sinv, core_proj.cast<std::complex<double>>());
        const double lam_scale = lam.cwiseAbs().maxCoeff() + 1e-300;
        for (Index i = 0; i < k; ++i)
            for (Index j = 0; j < k; ++j)
                for (Index l = 0; l < k; ++l) {
                    const std::complex<double> den = lam[i] + lam[j] + lam[l];
                    if (std::abs(den) < 1e-14 * lam_scale)
                        throw std::runtime_error(
                            "solve_kron_sum3: singular projected problem (eigenvalue triple "
                            "sums to zero)");
                    d[(i * k + j) * k + l] /= -den;
                }
        const Vector y =
            mode_product3<ComplexMatrix, ComplexVector>(S, S, S, d).real();

        // Exact residual in the span of [V, FV] (CB included in V).
        Matrix embed(M, V.cols() + FV.cols());
        embed << V, FV;
        const Matrix U = thin_orth(embed);
        const Matrix P0 = U.transpose() * V;
        const Matrix P1 = U.transpose() * FV;
        const Matrix Pc = U.transpose() * CB;
        Vector res_core = mode_product3<Matrix, Vector>(P1, P0, P0, y);
        res_core += mode_product3<Matrix, Vector>(P0, P1, P0, y);
        res_core += mode_product3<Matrix, Vector>(P0, P0, P1, y);
        res_core += mode_product3<Matrix, Vector>(Pc, Pc, Pc, rhs_core);
        const double res = res_core.norm() / rhs_norm;
        if (res < res_best) {
            res_best = res;
            y_best = y;
            cols_best = k;
        }
        if (res_best <= opts.tol)
            break;
        if (V.cols() >= opts.max_rank)
            break;

        const Index before = V.cols();
        const Matrix candF = elu.solve(Matrix(Ashift * blockF));
        const Index fF = V.cols();
        orthonormal_extend(V, candF);
        const Index addedF = V.cols() - fF;
        const Matrix candB = alu.solve(Matrix(E * blockB));
        const Index fB = V.cols();
        orthonormal_extend(V, candB);
        const Index addedB = V.cols() - fB;
        if (V.cols() == before)
            break;
        extend_fv(before);
        if (addedF > 0)
            blockF = V.middleCols(fF, addedF);
        if (addedB > 0)
            blockB = V.middleCols(fB, addedB);
    }
    result.iterations = it;
    result.X.basis = V.leftCols(cols_best);
    result.X.core = y_best;
    result.residual = res_best;
    result.converged = res_best <= opts.tol;
    return result;
}

}  // namespace qbmor
