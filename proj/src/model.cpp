// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/model.hpp"

#include "qbmor/kron.hpp"

#include <Eigen/SparseLU>

namespace qbmor {

namespace {

void require(bool cond, const char* msg) {
    if (!cond)
        throw std::invalid_argument(msg);
}

Matrix sparse_dense(const SparseMatrix& S) { return Matrix(S); }

// Shared block assembly. `extended` enables the Gu / Bp pathways.
DrivenSystem assemble_impl(const QBSystem& S, const SignalGenerator& T, bool extended) {
    S.validate();
    T.validate();
    const Index N = S.state_dim();
    const Index q = T.dim();
    const Index p = S.input_dim();
    require(T.output_dim() == p, "assemble_driven: generator output dim != system input dim");

    DrivenSystem drv;
    drv.state_dim = N;
    drv.gen_dim = q;

    // E = diag(E, I_q)
    {
        std::vector<Triplet> trips;
        trips.reserve(S.E.nonZeros() + q);
        for (Index k = 0; k < S.E.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(S.E, k); it; ++it)
                trips.emplace_back(it.row(), it.col(), it.value());
        for (Index i = 0; i < q; ++i)
            trips.emplace_back(N + i, N + i, 1.0);
        drv.E.resize(N + q, N + q);
        drv.E.setFromTriplets(trips.begin(), trips.end());
    }

    // A = [[A, B Cz (+ Bp Cz Az)], [0, Az]]
    {
        SparseMatrix coupling = S.B * T.Cz;
        if (extended && S.Bp.nonZeros() > 0)
            coupling = coupling + SparseMatrix(S.Bp * (T.Cz * T.Az));
        std::vector<Triplet> trips;
        trips.reserve(S.A.nonZeros() + coupling.nonZeros() + T.Az.nonZeros());
        for (Index k = 0; k < S.A.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(S.A, k); it; ++it)
                trips.emplace_back(it.row(), it.col(), it.value());
        for (Index k = 0; k < coupling.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(coupling, k); it; ++it)
                trips.emplace_back(it.row(), N + it.col(), it.value());
        for (Index k = 0; k < T.Az.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(T.Az, k); it; ++it)
                trips.emplace_back(N + it.row(), N + it.col(), it.value());
        drv.A.resize(N + q, N + q);
        drv.A.setFromTriplets(trips.begin(), trips.end());
    }

    // Quadratic rows: G on (x,x) slots, D(I⊗Cz) on (x,z) slots, Gz on (z,z)
    // slots, and for extended maps Gu(Cz⊗Cz) + Bp Cz Gz on the system's (z,z)
    // slots. The x⊗z coupling lives only in the (x,z) slots.
    {
        std::vector<QuadEntry> entries;
        const Matrix Cz = sparse_dense(T.Cz);
        for (const QuadEntry& e : S.G.entries())
            entries.push_back({e.row, e.j, e.k, e.value});
        for (const QuadEntry& e : S.D.entries())
            for (Index k = 0; k < q; ++k) {
                const double v = e.value * Cz(e.k, k);
                if (v != 0.0)
                    entries.push_back({e.row, e.j, N + k, v});
            }
        for (const QuadEntry& e : T.Gz.entries())
            entries.push_back({N + e.row, N + e.j, N + e.k, e.value});
        if (extended) {
            for (const QuadEntry& e : S.Gu.entries())
                for (Index j = 0; j < q; ++j) {
                    const double s = e.value * Cz(e.j, j);
                    if (s == 0.0)
                        continue;
                    for (Index k = 0; k < q; ++k) {
                        const double v = s * Cz(e.k, k);
                        if (v != 0.0)
                            entries.push_back({e.row, N + j, N + k, v});
                    }
                }
            if (S.Bp.nonZeros() > 0 && !T.Gz.is_zero()) {
                const Matrix BpCz = sparse_dense(S.Bp) * Cz;
                for (const QuadEntry& e : T.Gz.entries())
                    for (Index r = 0; r < N; ++r) {
                        const double v = BpCz(r, e.row) * e.value;
                        if (v != 0.0)
                            entries.push_back({r, N + e.j, N + e.k, v});
                    }
            }
        }
        drv.G = QuadMap::from_entries(N + q, N + q, N + q, std::move(entries));
    }

    drv.b.resize(N + q);
    drv.b << S.x0, T.z0;
    return drv;
}

}  // namespace

void QBSystem::validate() const {
    const Index N = E.rows();
    require(E.cols() == N && A.rows() == N && A.cols() == N, "QBSystem: E/A must be square N×N");
    require(B.rows() == N, "QBSystem: B row count");
    require(C.cols() == N, "QBSystem: C column count");
    require(x0.size() == N, "QBSystem: x0 size");
    const Index p = B.cols();
    if (!G.is_zero())
        require(G.rows() == N && G.left_cols() == N && G.right_cols() == N, "QBSystem: G dims");
    if (!D.is_zero())
        require(D.rows() == N && D.left_cols() == N && D.right_cols() == p, "QBSystem: D dims");
    if (!Gu.is_zero())
        require(Gu.rows() == N && Gu.left_cols() == p && Gu.right_cols() == p, "QBSystem: Gu dims");
    if (Bp.nonZeros() > 0)
        require(Bp.rows() == N && Bp.cols() == p, "QBSystem: Bp dims");
    Eigen::SparseLU<SparseMatrix> lu(E);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("QBSystem: E is singular (LU factorization failed)");
}

void SignalGenerator::validate() const {
    const Index q = Az.rows();
    require(Az.cols() == q, "SignalGenerator: Az must be square");
    require(Cz.cols() == q, "SignalGenerator: Cz column count");
    require(z0.size() == q, "SignalGenerator: z0 size");
    if (!Gz.is_zero())
        require(Gz.rows() == q && Gz.left_cols() == q && Gz.right_cols() == q,
                "SignalGenerator: Gz dims");
    if (Bz.nonZeros() > 0)
        require(Bz.rows() == q, "SignalGenerator: Bz row count");
}

DrivenSystem assemble_driven(const QBSystem& S, const SignalGenerator& T) {
    if (S.has_extended_input())
        throw std::invalid_argument(
            "assemble_driven: system has quadratic-input/derivative terms; use "
            "assemble_driven_extended");
    return assemble_impl(S, T, false);
}

DrivenSystem assemble_driven_extended(const QBSystem& S, const SignalGenerator& T) {
    return assemble_impl(S, T, true);
}

SignalGenerator extend_generator_derivative(const SignalGenerator& T, int max_derivative) {
    T.validate();
    if (max_derivative < 1)
        throw std::invalid_argument("extend_generator_derivative: max_derivative must be >= 1");
    const Index q = T.dim();
    const Index p = T.output_dim();

    if (T.linear()) {
        // Output rows Cz, Cz Az, ..., Cz Az^d on the unchanged state.
        SignalGenerator out = T;
        Matrix Czd = sparse_dense(T.Cz);
        Matrix stacked((max_derivative + 1) * p, q);
        stacked.topRows(p) = Czd;
        const Matrix Az = sparse_dense(T.Az);
        for (int i = 1; i <= max_derivative; ++i) {
            Czd = Czd * Az;
            stacked.middleRows(i * p, p) = Czd;
        }
        out.Cz = to_sparse(stacked);
        return out;
    }

    if (max_derivative > 2)
        throw std::invalid_argument(
            "extend_generator_derivative: quadratic generators support derivatives up to "
            "order 2 only");

    // Derivative states z_k = d^k z / dt^k obey, by the product rule,
    //   ż_k = Az z_k + Gz Σ_{a=0..k} C(k,a) z_a ⊗ z_{k-a},
    // which stays quadratic in the stacked state [z; z1; ...]. Initial values
    // follow by evaluating each right-hand side at t = 0.
    const int d = max_derivative;
    const Index Q = (d + 1) * q;
    std::vector<Triplet> az_trips;
    std::vector<QuadEntry> gz_entries;
    for (int k = 0; k <= d; ++k) {
        for (Index kk = 0; kk < T.Az.outerSize(); ++kk)
            for (SparseMatrix::InnerIterator it(T.Az, kk); it; ++it)
                az_trips.emplace_back(k * q + it.row(), k * q + it.col(), it.value());
        double binom = 1.0;
        for (int a = 0; a <= k; ++a) {
            for (const QuadEntry& e : T.Gz.entries())
                gz_entries.push_back({k * q + e.row, a * q + e.j, (k - a) * q + e.k,
                                      binom * e.value});
            binom = binom * double(k - a) / double(a + 1);
        }
    }
    SignalGenerator out;
    out.Az.resize(Q, Q);
    out.Az.setFromTriplets(az_trips.begin(), az_trips.end());
    out.Gz = QuadMap::from_entries(Q, Q, Q, std::move(gz_entries));

    // Consistent initial derivatives.
    Matrix z(q, d + 1);
    z.col(0) = T.z0;
    const Matrix Az = sparse_dense(T.Az);
    for (int k = 1; k <= d; ++k) {
        Vector rhs = Az * z.col(k - 1);
        double binom = 1.0;
        for (int a = 0; a <= k - 1; ++a) {
            rhs += binom * T.Gz.apply(z.col(a), z.col(k - 1 - a));
            binom = binom * double(k - 1 - a) / double(a + 1);
        }
        z.col(k) = rhs;
    }
    out.z0.resize(Q);
    for (int k = 0; k <= d; ++k)
        out.z0.segment(k * q, q) = z.col(k);

    // Output stacks u and its derivatives: block diag of Cz.
    std::vector<Triplet> cz_trips;
    for (int k = 0; k <= d; ++k)
        for (Index kk = 0; kk < T.Cz.outerSize(); ++kk)
            for (SparseMatrix::InnerIterator it(T.Cz, kk); it; ++it)
                cz_trips.emplace_back(k * p + it.row(), k * q + it.col(), it.value());
    out.Cz.resize((d + 1) * p, Q);
    out.Cz.setFromTriplets(cz_trips.begin(), cz_trips.end());
    return out;
}

InputWeightedSystem assemble_input_weighted(const QBSystem& S, const SignalGenerator& F) {
    if (F.Bz.nonZeros() == 0 && F.Bz.cols() == 0)
        throw std::invalid_argument("assemble_input_weighted: weight carries no input matrix Bz");
    QBSystem S0 = S;
    S0.x0.setZero();
    SignalGenerator F0 = F;
    F0.z0 = Vector::Zero(F.dim());
    DrivenSystem core = assemble_impl(S0, F0, true);

    InputWeightedSystem W;
    const Index N = S.state_dim();
    SparseMatrix upper(N, F.Bz.cols());
    if (S.Bp.nonZeros() > 0)
        upper = SparseMatrix(S.Bp * (F.Cz * F.Bz));
    std::vector<Triplet> trips;
    for (Index k = 0; k < upper.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(upper, k); it; ++it)
            trips.emplace_back(it.row(), it.col(), it.value());
    for (Index k = 0; k < F.Bz.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(F.Bz, k); it; ++it)
            trips.emplace_back(N + it.row(), it.col(), it.value());
    W.B.resize(core.dim(), F.Bz.cols());
    W.B.setFromTriplets(trips.begin(), trips.end());
    W.core = std::move(core);
    return W;
}

QBSystem galerkin_project(const QBSystem& S, const Matrix& V) {
    S.validate();
    if (V.rows() != S.state_dim())
        throw std::invalid_argument("galerkin_project: V row count != state dimension");
    if (orthonormality_defect(V) > 1e-10)
        throw std::invalid_argument("galerkin_project: V is not column-orthonormal");
    const Index p = S.input_dim();
    QBSystem R;
    R.E = to_sparse(V.transpose() * S.E * V);
    R.A = to_sparse(V.transpose() * S.A * V);
    R.B = to_sparse(V.transpose() * S.B);
    R.C = to_sparse(Matrix(S.C) * V);
    R.x0 = V.transpose() * S.x0;
    const Matrix Ip = Matrix::Identity(p, p);
    R.G = S.G.projected(V, V, V);
    if (!S.D.is_zero())
        R.D = S.D.projected(V, V, Ip);
    else
        R.D = QuadMap(V.cols(), V.cols(), p);
    if (!S.Gu.is_zero())
        R.Gu = S.Gu.projected(V, Ip, Ip);
    else
        R.Gu = QuadMap(V.cols(), p, p);
    if (S.Bp.nonZeros() > 0)
        R.Bp = to_sparse(V.transpose() * S.Bp);
    else
        R.Bp.resize(V.cols(), p);
    return R;
}

SignalGenerator superpose_generators(const std::vector<SignalGenerator>& gens) {
    if (gens.empty())
        throw std::invalid_argument("superpose_generators: empty list");
    const Index p = gens.front().output_dim();
    Index q = 0;
    for (const SignalGenerator& g : gens) {
        g.validate();
        if (g.output_dim() != p)
            throw std::invalid_argument("superpose_generators: output dimension mismatch");
        q += g.dim();
    }
    SignalGenerator out;
    std::vector<Triplet> az, cz;
    std::vector<QuadEntry> gz;
    out.z0.resize(q);
    Index off = 0;
    for (const SignalGenerator& g : gens) {
        for (Index k = 0; k < g.Az.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(g.Az, k); it; ++it)
                az.emplace_back(off + it.row(), off + it.col(), it.value());
        for (Index k = 0; k < g.Cz.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(g.Cz, k); it; ++it)
                cz.emplace_back(it.row(), off + it.col(), it.value());
        for (const QuadEntry& e : g.Gz.entries())
            gz.push_back({off + e.row, off + e.j, off + e.k, e.value});
        out.z0.segment(off, g.dim()) = g.z0;
        off += g.dim();
    }
    out.Az.resize(q, q);
    out.Az.setFromTriplets(az.begin(), az.end());
    out.Cz.resize(p, q);
    out.Cz.setFromTriplets(cz.begin(), cz.end());
    out.Gz = QuadMap::from_entries(q, q, q, std::move(gz));
    return out;
}

QBSystem to_qb_system(const InputWeightedSystem& W) {
    QBSystem S;
    const Index M = W.core.dim();
    S.E = W.core.E;
    S.A = W.core.A;
    S.G = W.core.G;
    S.B = W.B;
    S.D = QuadMap(M, M, W.B.cols());
    S.Gu = QuadMap(M, W.B.cols(), W.B.cols());
    S.Bp.resize(M, W.B.cols());
    S.x0 = Vector::Zero(M);
    // Output taps the system-state block; callers override as needed.
    std::vector<Triplet> trips;
    for (Index i = 0; i < W.core.state_dim; ++i)
        trips.emplace_back(i, i, 1.0);
    S.C.resize(W.core.state_dim, M);
    S.C.setFromTriplets(trips.begin(), trips.end());
    return S;
}

QBSystem to_qb_system(const DrivenSystem& D, const SparseMatrix& output_map) {
    QBSystem S;
    const Index M = D.dim();
    S.E = D.E;
    S.A = D.A;
    S.G = D.G;
    S.B.resize(M, 0);
    S.D = QuadMap(M, M, 0);
    S.Gu = QuadMap(M, 0, 0);
    S.Bp.resize(M, 0);
    S.x0 = D.b;
    S.C = output_map;
    return S;
}

}  // namespace qbmor
