// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/model.hpp"

#include "qbmor/kron.hpp"
#include "qbmor/simulate.hpp"

#include "doctest.h"
#include "oracles.hpp"

using namespace qbmor;

namespace {

double max_abs_diff(const Matrix& A, const Matrix& B) {
    return (A - B).cwiseAbs().maxCoeff();
}

QBSystem scalar_system(double E, double A, double G, double D, double B) {
    QBSystem S;
    Matrix m(1, 1);
    m << E;
    S.E = to_sparse(m);
    m << A;
    S.A = to_sparse(m);
    S.G = G != 0 ? QuadMap::from_entries(1, 1, 1, {{0, 0, 0, G}}) : QuadMap(1, 1, 1);
    S.D = D != 0 ? QuadMap::from_entries(1, 1, 1, {{0, 0, 0, D}}) : QuadMap(1, 1, 1);
    m << B;
    S.B = to_sparse(m);
    m << 1;
    S.C = to_sparse(m);
    S.x0 = Vector::Zero(1);
    S.Gu = QuadMap(1, 1, 1);
    S.Bp.resize(1, 1);
    return S;
}

SignalGenerator scalar_generator(double Az, double Cz, double z0) {
    SignalGenerator T;
    Matrix m(1, 1);
    m << Az;
    T.Az = to_sparse(m);
    T.Gz = QuadMap(1, 1, 1);
    m << Cz;
    T.Cz = to_sparse(m);
    T.z0 = Vector::Constant(1, z0);
    T.Bz.resize(1, 0);
    return T;
}

}  // namespace

TEST_CASE("driven assembly of the scalar fixture") {
    // E=1, A=-1, G=1, D=5, B=2 driven by u = z, ż = -3z:
    // ẋ = -x + x² + 5xz + 2z, ż = -3z.
    const QBSystem S = scalar_system(1, -1, 1, 5, 2);
    const SignalGenerator T = scalar_generator(-3, 1, 0.7);
    const DrivenSystem D = assemble_driven(S, T);
    Matrix Aexp(2, 2);
    Aexp << -1, 2, 0, -3;
    CHECK(max_abs_diff(Matrix(D.A), Aexp) == 0.0);
    CHECK(max_abs_diff(Matrix(D.E), Matrix::Identity(2, 2)) == 0.0);
    // quadratic rows: x² coefficient 1 in slot (0,0), xz coefficient 5 in slot (0,1)
    Matrix Gflat = Matrix(D.G.flat());
    Matrix Gexp = Matrix::Zero(2, 4);
    Gexp(0, 0) = 1.0;
    Gexp(0, 1) = 5.0;
    CHECK(max_abs_diff(Gflat, Gexp) == 0.0);
    CHECK(D.b[0] == 0.0);
    CHECK(D.b[1] == doctest::Approx(0.7));
}

TEST_CASE("linear parts only yield a linear driven system") {
    const QBSystem S = scalar_system(1, -2, 0, 0, 3);
    const SignalGenerator T = scalar_generator(-1, 2, 1);
    const DrivenSystem D = assemble_driven(S, T);
    CHECK(D.G.is_zero());
    Matrix Aexp(2, 2);
    Aexp << -2, 6, 0, -1;
    CHECK(max_abs_diff(Matrix(D.A), Aexp) == 0.0);
}

TEST_CASE("driven system reproduces the co-simulated plant state") {
    oracle::Rng rng(21);
    const QBSystem S = oracle::random_system(rng, 3, 2, 1);
    const SignalGenerator T = oracle::random_generator(rng, 2, 2, true);
    const DrivenSystem D = assemble_driven(S, T);

    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.abs_tol = 1e-11;
    cfg.rel_tol = 1e-10;
    const Trajectory traj = integrate(D, speye(D.dim()), cfg);
    const Vector w_ref = oracle::cosimulate(S, T, 1.0, 20000);
    CHECK((traj.states.col(cfg.output_grid - 1) - w_ref).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("extended assembly reduces to the plain one") {
    oracle::Rng rng(22);
    const QBSystem S = oracle::random_system(rng, 3, 2, 1, false);
    const SignalGenerator T = oracle::random_generator(rng, 2, 2, true);
    const DrivenSystem D1 = assemble_driven(S, T);
    const DrivenSystem D2 = assemble_driven_extended(S, T);
    CHECK(max_abs_diff(Matrix(D1.A), Matrix(D2.A)) == 0.0);
    CHECK(max_abs_diff(Matrix(D1.G.flat()), Matrix(D2.G.flat())) == 0.0);
}

TEST_CASE("input-derivative coupling lands in the linear block") {
    // scalar: Bp=1, Cz=1, Az=-3, B=0 puts Bp Cz Az = -3 in the upper right.
    QBSystem S = scalar_system(1, -1, 0, 0, 0);
    Matrix m(1, 1);
    m << 1.0;
    S.Bp = to_sparse(m);
    const SignalGenerator T = scalar_generator(-3, 1, 1);
    const DrivenSystem D = assemble_driven_extended(S, T);
    CHECK(Matrix(D.A)(0, 1) == doctest::Approx(-3.0));
    CHECK_THROWS(assemble_driven(S, T));
}

TEST_CASE("extended driven system reproduces the co-simulated plant state") {
    oracle::Rng rng(23);
    const QBSystem S = oracle::random_system(rng, 3, 2, 1, true);
    const SignalGenerator T = oracle::random_generator(rng, 2, 2, true);
    const DrivenSystem D = assemble_driven_extended(S, T);
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.abs_tol = 1e-11;
    cfg.rel_tol = 1e-10;
    const Trajectory traj = integrate(D, speye(D.dim()), cfg);
    const Vector w_ref = oracle::cosimulate(S, T, 1.0, 20000);
    CHECK((traj.states.col(cfg.output_grid - 1) - w_ref).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("derivative rows of a linear generator are powers of Az") {
    SignalGenerator T = scalar_generator(-1, 1, 1);
    const SignalGenerator T1 = extend_generator_derivative(T, 1);
    CHECK(Matrix(T1.Cz)(1, 0) == doctest::Approx(-1.0));
    const SignalGenerator T2 = extend_generator_derivative(T, 2);
    CHECK(Matrix(T2.Cz)(1, 0) == doctest::Approx(-1.0));
    CHECK(Matrix(T2.Cz)(2, 0) == doctest::Approx(1.0));

    oracle::Rng rng(24);
    const SignalGenerator L = oracle::random_generator(rng, 3, 2, false);
    const SignalGenerator L2 = extend_generator_derivative(L, 2);
    const Matrix Az = Matrix(L.Az), Cz = Matrix(L.Cz);
    CHECK(max_abs_diff(Matrix(L2.Cz).middleRows(2, 2), Cz * Az) <= 1e-14);
    CHECK(max_abs_diff(Matrix(L2.Cz).middleRows(4, 2), Cz * Az * Az) <= 1e-14);
}

TEST_CASE("derivative state of a quadratic generator tracks the true derivative") {
    // the quadratic two-state generator with u = [-0.5 2] z used by the
    // Burgers input case 2
    SignalGenerator T;
    Matrix az(2, 2);
    az << -2, 0, 0, -1;
    T.Az = to_sparse(az);
    T.Gz = QuadMap::from_entries(2, 2, 2, {{0, 0, 0, -0.5}});
    Matrix cz(1, 2);
    cz << -0.5, 2;
    T.Cz = to_sparse(cz);
    T.z0.resize(2);
    T.z0 << 4, 1;
    const SignalGenerator X = extend_generator_derivative(T, 1);
    CHECK(X.dim() == 4);
    // z1(0) = Az z0 + Gz z0⊗z0
    Vector z1_expect = az * T.z0 + T.Gz.apply(T.z0, T.z0);
    CHECK((X.z0.tail(2) - z1_expect).cwiseAbs().maxCoeff() <= 1e-14);

    // simulate the augmented generator; z1 must equal the finite-difference
    // derivative of z
    QBSystem gen_sys;
    gen_sys.E = speye(4);
    gen_sys.A = X.Az;
    gen_sys.G = X.Gz;
    gen_sys.B.resize(4, 0);
    gen_sys.D = QuadMap(4, 4, 0);
    gen_sys.Gu = QuadMap(4, 0, 0);
    gen_sys.Bp.resize(4, 0);
    gen_sys.C = speye(4);
    gen_sys.x0 = X.z0;
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.abs_tol = 1e-11;
    cfg.rel_tol = 1e-10;
    cfg.output_grid = 501;
    const Trajectory traj = integrate(gen_sys, InputFunction{}, cfg);
    const double dt = traj.times[1] - traj.times[0];
    double worst = 0.0;
    for (Index j = 1; j + 1 < traj.times.size(); ++j) {
        const Vector fd = (traj.states.col(j + 1).head(2) - traj.states.col(j - 1).head(2)) /
                          (2 * dt);
        worst = std::max(worst, (traj.states.col(j).tail(2) - fd).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("quadratic generators reject high derivative orders") {
    oracle::Rng rng(25);
    const SignalGenerator T = oracle::random_generator(rng, 2, 1, true);
    CHECK_THROWS(extend_generator_derivative(T, 3));
}

TEST_CASE("input weight with Bp = 0 stacks the filter input only") {
    oracle::Rng rng(26);
    QBSystem S = oracle::random_system(rng, 3, 1, 1, false);
    SignalGenerator F = oracle::random_generator(rng, 2, 1, false);
    F.Bz = to_sparse(rng.randn(2, 1));
    const InputWeightedSystem W = assemble_input_weighted(S, F);
    const Matrix B = Matrix(W.B);
    CHECK(B.topRows(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_abs_diff(B.bottomRows(2), Matrix(F.Bz)) == 0.0);
    CHECK(W.core.b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the unit first-order weight produces a linear-input system") {
    oracle::Rng rng(27);
    const QBSystem S = oracle::random_system(rng, 4, 1, 1, false);
    SignalGenerator F = scalar_generator(-1, 1, 0);
    Matrix one(1, 1);
    one << 1;
    F.Bz = to_sparse(one);
    const InputWeightedSystem W = assemble_input_weighted(S, F);
    CHECK(W.core.dim() == 5);
    const QBSystem Q = to_qb_system(W);
    CHECK(Q.D.is_zero());
    CHECK(Q.Gu.is_zero());
    CHECK(Q.B.nonZeros() == 1);
}

TEST_CASE("weighted response equals the filtered response") {
    oracle::Rng rng(28);
    QBSystem S = oracle::random_system(rng, 3, 1, 1, true);
    S.x0.setZero();
    SignalGenerator F = oracle::random_generator(rng, 2, 1, true);
    F.z0.setZero();
    F.Bz = to_sparse(rng.randn(2, 1));
    const InputWeightedSystem W = assemble_input_weighted(S, F);

    // u_F(t) = sin(2t) fed to the weighted system
    auto uF = [](double t) { return Vector::Constant(1, std::sin(2 * t)); };
    QBSystem WQ = to_qb_system(W);
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.abs_tol = 1e-11;
    cfg.rel_tol = 1e-10;
    InputFunction fin;
    fin.value = uF;
    const Trajectory tw = integrate(WQ, fin, cfg);

    // reference: filter F driven by u_F, then S driven by the filter output,
    // co-simulated from the defining equations
    const Index N = S.state_dim();
    const Index q = F.dim();
    Eigen::PartialPivLU<Matrix> elu((Matrix(S.E)));
    const Matrix Cz = Matrix(F.Cz);
    auto f = [&](double t, const Vector& y) -> Vector {
        const Vector x = y.head(N);
        const Vector z = y.tail(q);
        const Vector u = Cz * z;
        const Vector zdot = Matrix(F.Az) * z + F.Gz.apply(z, z) + Matrix(F.Bz) * uF(t);
        Vector fx = Matrix(S.A) * x + S.G.apply(x, x) + Matrix(S.B) * u + S.D.apply(x, u) +
                    S.Gu.apply(u, u) + Matrix(S.Bp) * (Cz * zdot);
        Vector out(N + q);
        out << elu.solve(fx), zdot;
        return out;
    };
    const Vector ref = oracle::rk4(f, Vector::Zero(N + q), 0.0, 1.0, 20000);
    CHECK((tw.states.col(cfg.output_grid - 1).head(N) - ref.head(N)).cwiseAbs().maxCoeff() <=
          1e-8);
}

TEST_CASE("galerkin projection identities") {
    oracle::Rng rng(29);
    const QBSystem S = oracle::random_system(rng, 5, 2, 2, true);
    const QBSystem SI = galerkin_project(S, Matrix::Identity(5, 5));
    CHECK(max_abs_diff(Matrix(SI.A), Matrix(S.A)) <= 1e-14);
    CHECK(max_abs_diff(Matrix(SI.G.flat()), Matrix(S.G.flat())) <= 1e-14);

    const Matrix e1 = Matrix::Identity(5, 1);
    const QBSystem S1 = galerkin_project(S, e1);
    CHECK(S1.state_dim() == 1);
    CHECK(Matrix(S1.A)(0, 0) == doctest::Approx(Matrix(S.A)(0, 0)));
}

TEST_CASE("galerkin projection equals explicit Kronecker congruence") {
    oracle::Rng rng(30);
    const QBSystem S = oracle::random_system(rng, 5, 2, 2, true);
    const Matrix V = oracle::random_orthonormal(rng, 5, 2);
    const QBSystem R = galerkin_project(S, V);
    CHECK(max_abs_diff(Matrix(R.E), V.transpose() * Matrix(S.E) * V) <= 1e-13);
    CHECK(max_abs_diff(Matrix(R.A), V.transpose() * Matrix(S.A) * V) <= 1e-13);
    CHECK(max_abs_diff(Matrix(R.B), V.transpose() * Matrix(S.B)) <= 1e-13);
    CHECK(max_abs_diff(Matrix(R.C), Matrix(S.C) * V) <= 1e-13);
    CHECK(max_abs_diff(Matrix(R.G.flat()),
                       V.transpose() * Matrix(S.G.flat()) * oracle::dense_kron(V, V)) <= 1e-12);
    CHECK(max_abs_diff(Matrix(R.D.flat()),
                       V.transpose() * Matrix(S.D.flat()) *
                           oracle::dense_kron(V, Matrix::Identity(2, 2))) <= 1e-12);
    CHECK(max_abs_diff(Matrix(R.Gu.flat()), V.transpose() * Matrix(S.Gu.flat())) <= 1e-12);
    CHECK(max_abs_diff(Matrix(R.Bp), V.transpose() * Matrix(S.Bp)) <= 1e-13);
    CHECK((R.x0 - V.transpose() * S.x0).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("galerkin projection rejects skew bases") {
    oracle::Rng rng(31);
    const QBSystem S = oracle::random_system(rng, 4, 1, 1);
    CHECK_THROWS(galerkin_project(S, rng.randn(4, 2)));
}

TEST_CASE("projection and driving commute") {
    oracle::Rng rng(32);
    for (int rep = 0; rep < 10; ++rep) {
        const Index N = 4 + rep % 5, q = 2 + rep % 2, n = 2 + rep % 3;
        const QBSystem S = oracle::random_system(rng, N, 2, 1);
        const SignalGenerator T = oracle::random_generator(rng, q, 2, rep % 2 == 0);
        const Matrix V = oracle::random_orthonormal(rng, N, n);

        const DrivenSystem path1 = assemble_driven(galerkin_project(S, V), T);
        const DrivenSystem full = assemble_driven(S, T);
        Matrix Vc = Matrix::Zero(N + q, n + q);
        Vc.topLeftCorner(N, n) = V;
        Vc.bottomRightCorner(q, q).setIdentity();

        CHECK(max_abs_diff(Matrix(path1.E), Vc.transpose() * Matrix(full.E) * Vc) <= 1e-12);
        CHECK(max_abs_diff(Matrix(path1.A), Vc.transpose() * Matrix(full.A) * Vc) <= 1e-12);
        CHECK(max_abs_diff(Matrix(path1.G.flat()),
                           Vc.transpose() * Matrix(full.G.flat()) *
                               oracle::dense_kron(Vc, Vc)) <= 1e-12);
        CHECK((path1.b - Vc.transpose() * full.b).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("superposition of generators") {
    const SignalGenerator single = scalar_generator(-2, 1.5, 0.5);
    const SignalGenerator same = superpose_generators({single});
    CHECK(max_abs_diff(Matrix(same.Az), Matrix(single.Az)) == 0.0);

    // a1 e^{λ1 t} + a2 cos(λ2 t): 3 states, output [1 | 0 | 1]
    const double a1 = 0.8, l1 = -0.6, a2 = 1.1, l2 = 2.0;
    SignalGenerator expgen = scalar_generator(l1, 1, a1);
    SignalGenerator cosgen;
    Matrix az(2, 2);
    az << 0, l2, -l2, 0;
    cosgen.Az = to_sparse(az);
    cosgen.Gz = QuadMap(2, 2, 2);
    Matrix cz(1, 2);
    cz << 1, 0;
    cosgen.Cz = to_sparse(cz);
    cosgen.z0.resize(2);
    cosgen.z0 << a2, 0;
    const SignalGenerator sup = superpose_generators({expgen, cosgen});
    CHECK(sup.dim() == 3);
    Matrix czs = Matrix(sup.Cz);
    CHECK(czs(0, 0) == 1.0);
    CHECK(czs(0, 1) == 1.0);
    CHECK(czs(0, 2) == 0.0);
    // closed form at a few times through the exact propagator
    const InputFunction f = generator_input(sup);
    for (double t : {0.0, 0.3, 1.2}) {
        const double expect = a1 * std::exp(l1 * t) + a2 * std::cos(l2 * t);
        CHECK(f.value(t)[0] == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("superposition rejects mismatched output sizes") {
    oracle::Rng rng(33);
    const SignalGenerator a = oracle::random_generator(rng, 2, 1, false);
    const SignalGenerator b = oracle::random_generator(rng, 2, 2, false);
    CHECK_THROWS(superpose_generators({a, b}));
}
