// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// oracles.hpp — test-only reference implementations kept independent of the
// library code paths they check: textbook dense Kronecker algebra, a fixed-step
// RK4 integrator driven by the defining equations, dense Kronecker-LU solves
// for Lyapunov-type equations, and deterministic random instances.

#pragma once

#include "qbmor/model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>

namespace oracle {

using qbmor::Index;
using qbmor::Matrix;
using qbmor::Vector;

// Textbook Kronecker product, double loop.
inline Matrix dense_kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

inline Vector dense_kron_vec(const Vector& u, const Vector& v) {
    Vector out(u.size() * v.size());
    for (Index i = 0; i < u.size(); ++i)
        for (Index j = 0; j < v.size(); ++j)
            out[i * v.size() + j] = u[i] * v[j];
    return out;
}

// Row-major vectorization matching the library's Kronecker pairing.
inline Vector vec_rm(const Matrix& A) {
    Vector out(A.rows() * A.cols());
    for (Index i = 0; i < A.rows(); ++i)
        out.segment(i * A.cols(), A.cols()) = A.row(i).transpose();
    return out;
}

inline Matrix unvec_rm(const Vector& v, Index rows, Index cols) {
    Matrix A(rows, cols);
    for (Index i = 0; i < rows; ++i)
        A.row(i) = v.segment(i * cols, cols).transpose();
    return A;
}

// Solve A X Eᵀ + E X Aᵀ + C = 0 through the dense Kronecker-LU system
// (E ⊗ A + A ⊗ E) x = -vec(C); independent of the library's Schur kernel.
inline Matrix lyap_kron_lu(const Matrix& E, const Matrix& A, const Matrix& C) {
    const Matrix op = dense_kron(E, A) + dense_kron(A, E);
    const Vector x = op.partialPivLu().solve(Vector(-vec_rm(C)));
    return unvec_rm(x, E.rows(), E.rows());
}

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(gen);
    }
    Matrix randn(Index r, Index c) {
        Matrix m(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i)
                m(i, j) = normal();
        return m;
    }
    Vector randn_vec(Index n) { return randn(n, 1); }
};

inline Matrix random_orthonormal(Rng& rng, Index n, Index k) {
    const Matrix W = rng.randn(n, k);
    Eigen::HouseholderQR<Matrix> qr(W);
    return qr.householderQ() * Matrix::Identity(n, k);
}

// Stable pencil: E diagonally dominant SPD-ish, A with spectrum in the left
// half plane.
inline void random_stable_pencil(Rng& rng, Index M, qbmor::SparseMatrix& E,
                                 qbmor::SparseMatrix& A, double density = 1.0) {
    Matrix Ed = Matrix::Identity(M, M) + 0.2 * rng.randn(M, M) / std::sqrt(double(M));
    Matrix Ad = -Matrix::Identity(M, M) * (1.0 + rng.uniform(0.0, 1.0)) +
                0.4 * rng.randn(M, M) / std::sqrt(double(M));
    if (density < 1.0)
        for (Index j = 0; j < M; ++j)
            for (Index i = 0; i < M; ++i)
                if (i != j && rng.uniform(0.0, 1.0) > density) {
                    Ed(i, j) = 0.0;
                    Ad(i, j) = 0.0;
                }
    E = qbmor::to_sparse(Ed);
    A = qbmor::to_sparse(Ad);
}

inline qbmor::QuadMap random_quad_map(Rng& rng, Index rows, Index left, Index right,
                                      double scale, double density = 0.4) {
    std::vector<qbmor::QuadEntry> entries;
    for (Index r = 0; r < rows; ++r)
        for (Index j = 0; j < left; ++j)
            for (Index k = 0; k < right; ++k)
                if (rng.uniform(0.0, 1.0) < density)
                    entries.push_back({r, j, k, scale * rng.normal()});
    return qbmor::QuadMap::from_entries(rows, left, right, std::move(entries));
}

inline qbmor::QBSystem random_system(Rng& rng, Index N, Index p, Index m,
                                     bool extended = false, double quad_scale = 0.3) {
    qbmor::QBSystem S;
    random_stable_pencil(rng, N, S.E, S.A);
    S.G = random_quad_map(rng, N, N, N, quad_scale);
    S.D = random_quad_map(rng, N, N, p, quad_scale);
    S.B = qbmor::to_sparse(rng.randn(N, p));
    S.C = qbmor::to_sparse(rng.randn(m, N));
    S.x0 = 0.3 * rng.randn_vec(N);
    if (extended) {
        S.Gu = random_quad_map(rng, N, p, p, quad_scale);
        S.Bp = qbmor::to_sparse(0.3 * rng.randn(N, p));
    } else {
        S.Gu = qbmor::QuadMap(N, p, p);
        S.Bp.resize(N, p);
    }
    return S;
}

inline qbmor::SignalGenerator random_generator(Rng& rng, Index q, Index p, bool quadratic) {
    qbmor::SignalGenerator T;
    Matrix Az = -Matrix::Identity(q, q) * (0.5 + rng.uniform(0.0, 1.0)) +
                0.3 * rng.randn(q, q) / std::sqrt(double(q));
    T.Az = qbmor::to_sparse(Az);
    T.Gz = quadratic ? random_quad_map(rng, q, q, q, 0.1) : qbmor::QuadMap(q, q, q);
    T.Cz = qbmor::to_sparse(rng.randn(p, q));
    T.z0 = 0.4 * rng.randn_vec(q);
    T.Bz.resize(q, 0);
    return T;
}

// Random driven system built directly (not through assembly): any stable
// quadratic autonomous system exercises the moment machinery.
inline qbmor::DrivenSystem random_driven(Rng& rng, Index M, double quad_scale = 0.4,
                                         Index state_dim = -1) {
    qbmor::DrivenSystem D;
    random_stable_pencil(rng, M, D.E, D.A);
    D.G = random_quad_map(rng, M, M, M, quad_scale);
    D.b = rng.randn_vec(M);
    D.state_dim = state_dim < 0 ? M : state_dim;
    D.gen_dim = M - D.state_dim;
    return D;
}

// Fixed-step RK4 on ẏ = f(t, y).
inline Vector rk4(const std::function<Vector(double, const Vector&)>& f, Vector y,
                  double t0, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    double t = t0;
    for (int s = 0; s < steps; ++s) {
        const Vector k1 = f(t, y);
        const Vector k2 = f(t + h / 2, y + (h / 2) * k1);
        const Vector k3 = f(t + h / 2, y + (h / 2) * k2);
        const Vector k4 = f(t + h, y + h * k3);
        y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
    }
    return y;
}

// Co-simulation of plant and generator from the defining equations: the state
// derivative is evaluated directly from the matrices, with no assembled system
// involved. Returns [x; z] at t1.
inline Vector cosimulate(const qbmor::QBSystem& S, const qbmor::SignalGenerator& T,
                         double t1, int steps) {
    const Index N = S.state_dim();
    const Index q = T.dim();
    const Matrix E = Matrix(S.E);
    Eigen::PartialPivLU<Matrix> elu(E);
    const Matrix Cz = Matrix(T.Cz);
    auto f = [&](double, const Vector& y) -> Vector {
        const Vector x = y.head(N);
        const Vector z = y.tail(q);
        const Vector u = Cz * z;
        const Vector zdot = Matrix(T.Az) * z + T.Gz.apply(z, z);
        Vector fx = Matrix(S.A) * x + S.G.apply(x, x) + Matrix(S.B) * u;
        if (!S.D.is_zero())
            fx += S.D.apply(x, u);
        if (!S.Gu.is_zero())
            fx += S.Gu.apply(u, u);
        if (S.Bp.nonZeros() > 0)
            fx += Matrix(S.Bp) * (Cz * zdot);
        Vector out(N + q);
        out << elu.solve(fx), zdot;
        return out;
    };
    Vector y0(N + q);
    y0 << S.x0, T.z0;
    return rk4(f, y0, 0.0, t1, steps);
}

}  // namespace oracle
