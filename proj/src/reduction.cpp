// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/reduction.hpp"

#include "qbmor/moments.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>

namespace qbmor {

namespace {

std::string tag(const char* fmt, double s, int i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, s, i);
    return buf;
}

// Append columns one by one so that surviving columns keep their provenance.
void extend_tagged(Matrix& basis, std::vector<std::string>& prov, const Matrix& cols,
                   const std::vector<std::string>& tags) {
    for (Index c = 0; c < cols.cols(); ++c)
        if (orthonormal_extend(basis, Matrix(cols.col(c))) > 0)
            prov.push_back(tags[static_cast<size_t>(c)]);
}

}  // namespace

int AssmConfig::order_w2(size_t j) const {
    if (orders_w2.empty())
        throw std::invalid_argument("AssmConfig: no orders for the second-order chain");
    return orders_w2.size() == 1 ? orders_w2[0] : orders_w2.at(j);
}

int AssmConfig::order_w1(size_t j) const {
    if (orders_w1.empty())
        throw std::invalid_argument("AssmConfig: no orders for the linear chain");
    return orders_w1.size() == 1 ? orders_w1[0] : orders_w1.at(j);
}

void AssmConfig::validate() const {
    for (size_t j = 0; j < freqs_w2.size(); ++j)
        if (order_w2(j) < 1)
            throw std::invalid_argument("AssmConfig: orders must be >= 1");
    for (size_t j = 0; j < freqs_w1.size(); ++j)
        if (order_w1(j) < 1)
            throw std::invalid_argument("AssmConfig: orders must be >= 1");
    for (size_t a = 0; a < freqs_w2.size(); ++a)
        for (size_t b = a + 1; b < freqs_w2.size(); ++b)
            if (freqs_w2[a] == freqs_w2[b])
                throw std::invalid_argument("AssmConfig: duplicate second-order frequency");
}

ReductionBasis krylov_basis(const QBSystem& S, const std::vector<double>& freqs,
                            const std::vector<int>& orders) {
    S.validate();
    if (freqs.size() != orders.size() && orders.size() != 1)
        throw std::invalid_argument("krylov_basis: orders must match freqs (or broadcast)");
    ReductionBasis basis;
    basis.V.resize(S.state_dim(), 0);
    const Matrix B = Matrix(S.B);
    for (size_t j = 0; j < freqs.size(); ++j) {
        const int L = orders.size() == 1 ? orders[0] : orders[j];
        if (L < 1)
            throw std::invalid_argument("krylov_basis: orders must be >= 1");
        ShiftedOperator op(S.E, S.A, freqs[j]);
        Matrix W = op.solve(B);
        for (int i = 0; i < L; ++i) {
            std::vector<std::string> tags(static_cast<size_t>(W.cols()),
                                          tag("w1-moment(s=%g,i=%d)", freqs[j], i));
            extend_tagged(basis.V, basis.provenance, W, tags);
            if (i + 1 < L)
                W = op.solve(Matrix(S.E * W));
        }
    }
    return basis;
}

X2Bases assm_x2_bases(const DrivenSystem& D, const AssmConfig& cfg, const Matrix& V_perp) {
    cfg.validate();
    X2Bases out;
    const Index N = D.state_dim;
    out.Va.resize(N, 0);
    out.Vb.resize(N, 0);
    // A linear driven system has an identically vanishing second-order
    // representation; there is nothing to match.
    if (D.G.is_zero() || cfg.freqs_w2.empty())
        return out;

    Matrix Z(N, 0);
    std::vector<std::string> z_tags;
    Matrix Mcols(N, 0);
    std::vector<std::string> m_tags;

    for (size_t j = 0; j < cfg.freqs_w2.size(); ++j) {
        const double s0 = cfg.freqs_w2[j];
        const int L = cfg.order_w2(j);
        ShiftedOperator op(D.E, D.A, s0);
        LyapunovSolver lyap(D.E, SparseMatrix(D.A - (s0 / 2) * D.E), cfg.lyap_options());

        LowRankFactor rhs = LowRankFactor::from_column(D.b);
        Vector m_prev;
        for (int i = 0; i < L; ++i) {
            LyapResult sol = lyap.solve(rhs);
            if (!sol.converged)
                throw std::runtime_error(
                    "assm_x2_bases: low-rank solve did not reach tolerance at s0 = " +
                    std::to_string(s0) + ", level " + std::to_string(i));
            out.lyap_residuals.push_back(sol.residual);

            // Pool the state-block factor directions, scaled by |weight|^1/2 so
            // column magnitudes reflect their contribution to the represented value.
            Matrix zc(N, sol.X.rank());
            for (Index k = 0; k < sol.X.rank(); ++k)
                zc.col(k) = std::sqrt(std::abs(sol.X.weights[k])) * sol.X.left.col(k).head(N);
            Z.conservativeResize(Eigen::NoChange, Z.cols() + zc.cols());
            Z.rightCols(zc.cols()) = zc;
            for (Index k = 0; k < zc.cols(); ++k)
                z_tags.push_back(tag("w2-lowrank(s=%g,i=%d)", s0, i));

            Vector m_i;
            if (i == 0)
                m_i = op.solve(Vector(-D.G.apply(sol.X)));
            else
                m_i = op.solve(Vector(D.E * m_prev - D.G.apply(sol.X)));
            Mcols.conservativeResize(Eigen::NoChange, Mcols.cols() + 1);
            Mcols.rightCols(1) = m_i.head(N);
            m_tags.push_back(tag("w2-moment(s=%g,i=%d)", s0, i));
            m_prev = m_i;

            if (i + 1 < L) {
                rhs = chain_rhs(D.E, sol.X);
                rhs.weights = -rhs.weights;
            }
        }
    }

    extend_tagged(out.Va, out.prov_a, Mcols, m_tags);

    // Project the pool off span[Va, V_perp] and keep singular directions above
    // the absolute cutoff.
    Matrix Q = out.Va;
    orthonormal_extend(Q, V_perp);
    Matrix Zp = Z;
    if (Q.cols() > 0)
        Zp -= Q * (Q.transpose() * Z);
    if (Zp.cols() > 0) {
        Eigen::BDCSVD<Matrix> svd(Zp, Eigen::ComputeThinU);
        out.pool_singular_values = svd.singularValues();
        Index keep = 0;
        while (keep < out.pool_singular_values.size() &&
               out.pool_singular_values[keep] > cfg.lowrank_tol)
            ++keep;
        out.Vb = svd.matrixU().leftCols(keep);
        for (Index k = 0; k < keep; ++k) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "w2-svd(sigma=%g,k=%d)",
                          out.pool_singular_values[k], int(k));
            out.prov_b.push_back(buf);
        }
    }
    return out;
}

AssmResult assm_reduce(const QBSystem& S, const SignalGenerator& T, const AssmConfig& cfg) {
    cfg.validate();
    ReductionBasis v1 = krylov_basis(S, cfg.freqs_w1, cfg.orders_w1);
    const DrivenSystem D = S.has_extended_input() ? assemble_driven_extended(S, T)
                                                  : assemble_driven(S, T);
    X2Bases x2 = assm_x2_bases(D, cfg, v1.V);

    AssmResult result;
    result.basis.V.resize(S.state_dim(), 0);
    extend_tagged(result.basis.V, result.basis.provenance, x2.Va, x2.prov_a);
    extend_tagged(result.basis.V, result.basis.provenance, x2.Vb, x2.prov_b);
    extend_tagged(result.basis.V, result.basis.provenance, v1.V, v1.provenance);
    if (result.basis.V.cols() == 0)
        throw std::runtime_error("assm_reduce: empty reduction basis");
    result.reduced = galerkin_project(S, result.basis.V);
    return result;
}

ReductionBasis multm_reduce(const QBSystem& S, const std::vector<double>& freqs, int q1,
                            int q2) {
    return multm_reduce(S, freqs, std::vector<int>(freqs.size(), q1),
                        std::vector<int>(freqs.size(), q2));
}

ReductionBasis multm_reduce(const QBSystem& S, const std::vector<double>& freqs,
                            const std::vector<int>& q1s, const std::vector<int>& q2s) {
    S.validate();
    if (q1s.size() != freqs.size() || q2s.size() != freqs.size())
        throw std::invalid_argument("multm_reduce: per-frequency orders mismatch");
    for (size_t j = 0; j < freqs.size(); ++j)
        if (q1s[j] < q2s[j])
            throw std::invalid_argument("multm_reduce: q1 >= q2 required");

    ReductionBasis basis;
    basis.V.resize(S.state_dim(), 0);
    const Index p = S.input_dim();
    std::vector<std::vector<Matrix>> first_level(freqs.size());

    for (size_t j = 0; j < freqs.size(); ++j) {
        first_level[j] = linear_moments(S.E, S.A, Matrix(S.B), freqs[j], q1s[j]);
        for (int i = 0; i < q1s[j]; ++i) {
            std::vector<std::string> tags(static_cast<size_t>(p),
                                          tag("multm-v(s=%g,i=%d)", freqs[j], i));
            extend_tagged(basis.V, basis.provenance, first_level[j][i], tags);
        }
    }

    for (size_t j = 0; j < freqs.size(); ++j) {
        const int q2 = q2s[j];
        if (q2 < 1 || (S.G.is_zero() && S.D.is_zero()))
            continue;
        ShiftedOperator op2(S.E, S.A, 2.0 * freqs[j]);
        Matrix W(S.state_dim(), 0);
        std::vector<std::string> tags;
        for (int a = 0; a <= q2 - 1; ++a)
            for (int b = 0; a + b <= q2 - 1; ++b) {
                if (S.G.is_zero())
                    continue;
                const Matrix block =
                    op2.solve(S.G.apply_pairs(first_level[j][a], first_level[j][b]));
                W.conservativeResize(Eigen::NoChange, W.cols() + block.cols());
                W.rightCols(block.cols()) = block;
                for (Index c = 0; c < block.cols(); ++c)
                    tags.push_back(tag("multm-g(s=%g,ab=%d)", freqs[j], a * 10 + b));
            }
        if (!S.D.is_zero())
            for (int a = 0; a <= q2 - 1; ++a)
                for (Index c = 0; c < p; ++c) {
                    const Matrix block =
                        op2.solve(Matrix(S.D.jacobian_right(first_level[j][a].col(c))));
                    W.conservativeResize(Eigen::NoChange, W.cols() + block.cols());
                    W.rightCols(block.cols()) = block;
                    for (Index cc = 0; cc < block.cols(); ++cc)
                        tags.push_back(tag("multm-d(s=%g,a=%d)", freqs[j], a));
                }
        for (int i = 0; i < q2; ++i) {
            extend_tagged(basis.V, basis.provenance, W, tags);
            if (i + 1 < q2) {
                W = op2.solve(Matrix(S.E * W));
                for (auto& t : tags)
                    t += "'";
            }
        }
    }
    return basis;
}

ReductionBasis multm_iw_reduce(const QBSystem& S, const SignalGenerator& F,
                               const std::vector<double>& freqs, int q1, int q2) {
    const InputWeightedSystem W = assemble_input_weighted(S, F);
    const ReductionBasis extended = multm_reduce(to_qb_system(W), freqs, q1, q2);
    ReductionBasis basis;
    basis.V = orthonormalize(extended.V.topRows(S.state_dim()));
    for (Index c = 0; c < basis.V.cols(); ++c)
        basis.provenance.push_back("multm-iw(" + std::to_string(c) + ")");
    return basis;
}

ReductionBasis pod_reduce(const Matrix& snapshots, Index n) {
    if (snapshots.cols() < n)
        throw std::invalid_argument("pod_reduce: fewer snapshots than requested dimension");
    Eigen::BDCSVD<Matrix> svd(snapshots, Eigen::ComputeThinU);
    const Vector sv = svd.singularValues();
    Index rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-12 * sv[0])
        ++rank;
    if (rank < n)
        std::cerr << "pod_reduce: snapshot matrix has numerical rank " << rank
                  << " < requested " << n << "; basis deflated\n";
    const Index keep = std::min(n, rank);
    ReductionBasis basis;
    basis.V = svd.matrixU().leftCols(keep);
    for (Index k = 0; k < keep; ++k)
        basis.provenance.push_back(tag("pod(sigma=%g,k=%d)", sv[k], int(k)));
    return basis;
}

ReductionBasis pod_reduce_blockwise(const Matrix& snapshots,
                                    const std::vector<Index>& block_rows,
                                    const std::vector<Index>& block_dims) {
    if (block_rows.size() != block_dims.size())
        throw std::invalid_argument("pod_reduce_blockwise: partition mismatch");
    Index total_rows = 0, total_dim = 0;
    for (size_t b = 0; b < block_rows.size(); ++b) {
        total_rows += block_rows[b];
        total_dim += block_dims[b];
    }
    if (total_rows != snapshots.rows())
        throw std::invalid_argument("pod_reduce_blockwise: partition does not cover the state");
    ReductionBasis basis;
    basis.V = Matrix::Zero(total_rows, total_dim);
    Index row0 = 0, col0 = 0;
    for (size_t b = 0; b < block_rows.size(); ++b) {
        ReductionBasis blk =
            pod_reduce(snapshots.middleRows(row0, block_rows[b]), block_dims[b]);
        basis.V.block(row0, col0, block_rows[b], blk.V.cols()) = blk.V;
        for (const std::string& t : blk.provenance)
            basis.provenance.push_back("block" + std::to_string(b) + ":" + t);
        row0 += block_rows[b];
        col0 += blk.V.cols();
    }
    basis.V.conservativeResize(Eigen::NoChange, col0);
    return basis;
}

std::vector<double> irka_frequencies(const QBSystem& S, int count) {
    S.validate();
    if (count < 1)
        throw std::invalid_argument("irka_frequencies: count must be >= 1");
    const Index N = S.state_dim();
    const Vector b = Matrix(S.B).rowwise().sum();
    const Vector c = Matrix(S.C).colwise().sum().transpose();
    using Complex = std::complex<double>;
    using ComplexVectorC = Eigen::VectorXcd;

    std::vector<Complex> shifts(count);
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.5 : double(i) / double(count - 1);
        shifts[i] = std::pow(10.0, -1.0 + 4.0 * t);
    }

    Eigen::SparseMatrix<Complex> Ec = S.E.cast<Complex>();
    Eigen::SparseMatrix<Complex> Ac = S.A.cast<Complex>();
    Eigen::SparseMatrix<Complex> AcT = Eigen::SparseMatrix<Complex>(Ac.transpose());
    Eigen::SparseMatrix<Complex> EcT = Eigen::SparseMatrix<Complex>(Ec.transpose());

    auto sorted_abs = [](std::vector<Complex> v) {
        std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
            if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
            return a.imag() < b.imag();
        });
        return v;
    };

    for (int iter = 0; iter < 50; ++iter) {
        Matrix V(N, 0), W(N, 0);
        for (int i = 0; i < count; ++i) {
            const Complex s = shifts[i];
            if (i > 0 && shifts[i] == std::conj(shifts[i - 1]) && shifts[i].imag() != 0.0)
                continue;  // conjugate handled with its partner
            Eigen::SparseMatrix<Complex> P = Eigen::SparseMatrix<Complex>(s * Ec - Ac);
            Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(P);
            if (lu.info() != Eigen::Success)
                throw std::runtime_error("irka_frequencies: singular shifted pencil");
            const ComplexVectorC vb = lu.solve(b.cast<Complex>());
            Eigen::SparseMatrix<Complex> PT = Eigen::SparseMatrix<Complex>(s * EcT - AcT);
            Eigen::SparseLU<Eigen::SparseMatrix<Complex>> luT(PT);
            const ComplexVectorC wc = luT.solve(c.cast<Complex>());
            if (s.imag() == 0.0) {
                orthonormal_extend(V, vb.real());
                orthonormal_extend(W, wc.real());
            } else {
                Matrix pairV(N, 2), pairW(N, 2);
                pairV << vb.real(), vb.imag();
                pairW << wc.real(), wc.imag();
                orthonormal_extend(V, pairV);
                orthonormal_extend(W, pairW);
            }
        }
        const Matrix Er = W.transpose() * S.E * V;
        const Matrix Ar = W.transpose() * S.A * V;
        Eigen::GeneralizedEigenSolver<Matrix> eig(Ar, Er);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("irka_frequencies: Ritz computation failed");
        std::vector<Complex> lam;
        for (Index i = 0; i < eig.alphas().size(); ++i) {
            const Complex a = eig.alphas()[i];
            const Complex bb = eig.betas()[i];
            if (std::abs(bb) > 1e-300)
                lam.push_back(a / bb);
        }
        std::vector<Complex> next;
        for (Complex l : lam) {
            Complex s = -l;
            if (s.real() < 0)
                s = Complex(-s.real(), s.imag());  // reflect into the right half plane
            next.push_back(s);
        }
        next = sorted_abs(next);
        if (static_cast<int>(next.size()) > count)
            next.resize(count);
        const std::vector<Complex> prev = sorted_abs(shifts);
        double change = 0.0;
        for (size_t i = 0; i < std::min(next.size(), prev.size()); ++i)
            change = std::max(change,
                              std::abs(next[i] - prev[i]) / std::max(1e-12, std::abs(prev[i])));
        shifts.assign(next.begin(), next.end());
        if (change < 1e-4)
            break;
    }

    std::vector<double> real_shifts;
    for (const Complex s : shifts)
        if (std::abs(s.imag()) <= 1e-8 * std::max(1.0, std::abs(s.real())))
            real_shifts.push_back(s.real());
    std::sort(real_shifts.begin(), real_shifts.end());
    if (static_cast<int>(real_shifts.size()) < count)
        std::cerr << "irka_frequencies: only " << real_shifts.size() << " of " << count
                  << " converged shifts are real\n";
    if (static_cast<int>(real_shifts.size()) > count)
        real_shifts.resize(count);
    return real_shifts;
}

}  // namespace qbmor
