// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/kron.hpp"
#include "qbmor/quad_map.hpp"

#include "doctest.h"
#include "oracles.hpp"

using namespace qbmor;

namespace {
double max_abs_diff(const Matrix& A, const Matrix& B) {
    return (A - B).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("kron of identities is the identity") {
    const SparseMatrix K = kron(speye(2), speye(3));
    CHECK(max_abs_diff(Matrix(K), Matrix::Identity(6, 6)) == 0.0);
}

TEST_CASE("kron with a scalar factor") {
    Matrix A(2, 2);
    A << 0, 1, 0, 0;
    Matrix B(1, 1);
    B << 2;
    Matrix expect(2, 2);
    expect << 0, 2, 0, 0;
    CHECK(max_abs_diff(Matrix(kron(to_sparse(A), to_sparse(B))), expect) == 0.0);
}

TEST_CASE("kron matches the dense textbook formula") {
    oracle::Rng rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix P = rng.randn(3, 3);
        const Matrix Q = rng.randn(3, 3);
        CHECK(max_abs_diff(Matrix(kron(to_sparse(P), to_sparse(Q))),
                           oracle::dense_kron(P, Q)) <= 1e-14);
    }
}

TEST_CASE("mixed product identity (A kron C)(B kron D) = AB kron CD") {
    oracle::Rng rng(12);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix A = rng.randn(2, 3), B = rng.randn(3, 2);
        const Matrix C = rng.randn(3, 2), D = rng.randn(2, 3);
        const Matrix lhs = Matrix(kron(to_sparse(A), to_sparse(C))) *
                           Matrix(kron(to_sparse(B), to_sparse(D)));
        const Matrix rhs = oracle::dense_kron(A * B, C * D);
        CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("kron_sum on scalars") {
    SparseMatrix one = speye(1);
    Matrix a(1, 1);
    a << 1.7;
    CHECK(Matrix(kron_sum(2, one, to_sparse(a)))(0, 0) == doctest::Approx(2 * 1.7));
    CHECK(Matrix(kron_sum(3, one, to_sparse(a)))(0, 0) == doctest::Approx(3 * 1.7));
}

TEST_CASE("kron_sum order 2 from the definition") {
    Matrix A(2, 2);
    A << 0, 1, 0, 0;
    const SparseMatrix As = to_sparse(A);
    const SparseMatrix E = speye(2);
    const Matrix expect = oracle::dense_kron(A, Matrix::Identity(2, 2)) +
                          oracle::dense_kron(Matrix::Identity(2, 2), A);
    CHECK(max_abs_diff(Matrix(kron_sum(2, E, As)), expect) == 0.0);
}

TEST_CASE("kron_sum equals the written sum of slot placements") {
    oracle::Rng rng(13);
    const Matrix P = rng.randn(3, 3), Q = rng.randn(3, 3);
    const SparseMatrix Ps = to_sparse(P), Qs = to_sparse(Q);
    const Matrix s2 = oracle::dense_kron(Q, P) + oracle::dense_kron(P, Q);
    CHECK(max_abs_diff(Matrix(kron_sum(2, Ps, Qs)), s2) <= 1e-13);
    const Matrix PP = oracle::dense_kron(P, P);
    const Matrix s3 = oracle::dense_kron(Q, PP) +
                      oracle::dense_kron(P, oracle::dense_kron(Q, P)) +
                      oracle::dense_kron(PP, Q);
    CHECK(max_abs_diff(Matrix(kron_sum(3, Ps, Qs)), s3) <= 1e-13);
}

TEST_CASE("perm_block trivial case and orthogonality") {
    CHECK(max_abs_diff(Matrix(perm_block(1, 1)), Matrix::Identity(2, 2)) == 0.0);
    const Matrix M = Matrix(perm_block(3, 2));
    CHECK(max_abs_diff(M.transpose() * M, Matrix::Identity(15, 15)) == 0.0);
    // exactly one 1 per row and column
    for (Index i = 0; i < M.rows(); ++i) {
        CHECK(M.row(i).sum() == doctest::Approx(1.0));
        CHECK(M.col(i).sum() == doctest::Approx(1.0));
        CHECK(M.row(i).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    }
}

TEST_CASE("perm_block conjugation splits the block structure") {
    oracle::Rng rng(14);
    const Index m = 2, k = 2;
    const Matrix P = rng.randn(m, m);
    const Matrix A = rng.randn(m, m), B = rng.randn(m, k);
    const Matrix C = rng.randn(k, m), D = rng.randn(k, k);
    Matrix block(m + k, m + k);
    block << A, B, C, D;
    const Matrix M = Matrix(perm_block(m, k));
    const Matrix lhs = M.transpose() * oracle::dense_kron(P, block) * M;
    Matrix rhs(m * (m + k), m * (m + k));
    rhs << oracle::dense_kron(P, A), oracle::dense_kron(P, B),
        oracle::dense_kron(P, C), oracle::dense_kron(P, D);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
}

TEST_CASE("quad map scalar and zero cases") {
    const QuadMap G1 = QuadMap::from_entries(1, 1, 1, {{0, 0, 0, 1.0}});
    Vector u(1), v(1);
    u << 2;
    v << 3;
    CHECK(G1.apply(u, v)[0] == doctest::Approx(6.0));
    const QuadMap G0(3, 3, 3);
    CHECK(G0.apply(Vector::Ones(3), Vector::Ones(3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quad map application equals the flat dense product") {
    oracle::Rng rng(15);
    const Index N = 4;
    const QuadMap G = oracle::random_quad_map(rng, N, N, N, 1.0);
    const Vector u = rng.randn_vec(N), v = rng.randn_vec(N);
    const Vector direct = G.apply(u, v);
    const Vector flat = Matrix(G.flat()) * oracle::dense_kron_vec(u, v);
    CHECK((direct - flat).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("quad map canonicalization sums duplicates") {
    const QuadMap G = QuadMap::from_entries(2, 2, 2, {{0, 1, 1, 2.0}, {0, 1, 1, 3.0}});
    CHECK(G.nonzeros() == 1);
    CHECK(G.entries()[0].value == doctest::Approx(5.0));
}

TEST_CASE("projection through identity and coordinate selection") {
    oracle::Rng rng(16);
    const Index N = 3;
    const QuadMap G = oracle::random_quad_map(rng, N, N, N, 1.0);
    const Matrix I = Matrix::Identity(N, N);
    const QuadMap GI = G.projected(I, I, I);
    CHECK(max_abs_diff(Matrix(GI.flat()), Matrix(G.flat())) == 0.0);
    const Matrix e1 = Matrix::Identity(N, 1);
    const QuadMap Ge = G.projected(e1, e1, e1);
    Vector one = Vector::Ones(1);
    const double g111 = Ge.apply(one, one)[0];
    Vector u = Vector::Zero(N);
    u[0] = 1;
    CHECK(g111 == doctest::Approx(G.apply(u, u)[0]));
}

TEST_CASE("projection equals the dense Kronecker construction") {
    oracle::Rng rng(17);
    for (Index N = 3; N <= 6; ++N)
        for (Index n = 1; n <= 3; ++n) {
            const QuadMap G = oracle::random_quad_map(rng, N, N, N, 1.0);
            const Matrix V = oracle::random_orthonormal(rng, N, n);
            const QuadMap Gr = G.projected(V, V, V);
            const Matrix dense =
                V.transpose() * Matrix(G.flat()) * oracle::dense_kron(V, V);
            CHECK(max_abs_diff(Matrix(Gr.flat()), dense) <= 1e-12);
        }
}

TEST_CASE("kron rejects index overflow") {
    SparseMatrix big(1, Index(3) << 31);
    CHECK_THROWS(kron(big, big));
}
