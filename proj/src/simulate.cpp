// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/simulate.hpp"

#include "qbmor/kron.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace qbmor {

namespace {

struct Rhs {
    const QBSystem* S;
    const InputFunction* u;
    bool has_input;

    Vector eval(double t, const Vector& x) const {
        Vector f = S->A * x + S->G.apply(x, x);
        if (has_input) {
            const Vector uv = u->value(t);
            if (!S->D.is_zero())
                f += S->D.apply(x, uv);
            f += S->B * uv;
            if (!S->Gu.is_zero())
                f += S->Gu.apply(uv, uv);
            if (S->Bp.nonZeros() > 0) {
                if (!u->derivative)
                    throw std::invalid_argument(
                        "integrate: system carries an input-derivative term but the input "
                        "provides no derivative");
                f += S->Bp * u->derivative(t);
            }
        }
        return f;
    }

    // A + G(I⊗x + x⊗I) + D(I⊗u)
    SparseMatrix jacobian(double t, const Vector& x) const {
        SparseMatrix J = S->A;
        if (!S->G.is_zero())
            J = J + S->G.jacobian_left(x) + S->G.jacobian_right(x);
        if (has_input && !S->D.is_zero())
            J = J + S->D.jacobian_left(u->value(t));
        return J;
    }
};

bool finite(const Vector& v) { return v.allFinite(); }

}  // namespace

InputFunction generator_input(const SignalGenerator& T) {
    if (!T.linear())
        throw std::invalid_argument("generator_input: closed form requires a linear generator");
    const Matrix Az = Matrix(T.Az);
    const Matrix Cz = Matrix(T.Cz);
    const Vector z0 = T.z0;
    InputFunction f;
    f.value = [Az, Cz, z0](double t) -> Vector { return Cz * (Matrix(Az * t).exp() * z0); };
    f.derivative = [Az, Cz, z0](double t) -> Vector {
        return Cz * (Az * (Matrix(Az * t).exp() * z0));
    };
    return f;
}

Trajectory integrate(const QBSystem& S, const InputFunction& u, const IntegratorConfig& cfg) {
    S.validate();
    if (cfg.t_end <= 0.0 || cfg.output_grid < 2)
        throw std::invalid_argument("integrate: t_end must be positive, output_grid >= 2");
    const Index N = S.state_dim();
    const bool has_input = S.input_dim() > 0;
    if (has_input && !u.value)
        throw std::invalid_argument("integrate: system has inputs but no input function given");
    Rhs rhs{&S, &u, has_input};

    const int K = cfg.output_grid;
    Trajectory traj;
    traj.times.resize(K);
    for (int j = 0; j < K; ++j)
        traj.times[j] = cfg.t_end * double(j) / double(K - 1);
    traj.states.resize(N, K);
    traj.outputs.resize(S.output_dim(), K);

    Vector x = S.x0;
    double t = 0.0;
    traj.states.col(0) = x;
    traj.outputs.col(0) = S.C * x;
    int next_grid = 1;

    Eigen::SparseLU<SparseMatrix> elu(S.E);  // validated nonsingular
    Vector f_prev = rhs.eval(0.0, x);

    // Initial step from the local derivative scale.
    double scale0 = elu.solve(f_prev).norm() / (x.norm() + 1.0);
    double h = std::min({cfg.t_end / (K - 1), cfg.max_step,
                         (scale0 > 0 ? 1e-2 / scale0 : cfg.t_end / (K - 1))});
    h = std::max(h, 1e-10 * cfg.t_end);

    Vector x_prev = x;       // state one accepted step back
    double h_prev = 0.0;
    bool have_two = false;

    const double floor_h = 1e-14 * cfg.t_end;
    Eigen::SparseLU<SparseMatrix> newton_lu;

    while (t < cfg.t_end - 1e-14 * cfg.t_end) {
        const double t_grid = traj.times[std::min(next_grid, K - 1)];
        double h_try = std::min({h, cfg.max_step, t_grid - t});
        if (h_try <= 0)
            h_try = t_grid - t;

        bool accepted = false;
        while (!accepted) {
            if (h_try < floor_h)
                throw std::runtime_error("integrate: step size underflow at t = " +
                                         std::to_string(t));
            const double tn1 = t + h_try;
            // Predictor: linear extrapolation once history exists.
            Vector x_pred = x;
            if (have_two && h_prev > 0)
                x_pred = x + (h_try / h_prev) * (x - x_prev);

            // BDF coefficients: order 1 on startup, variable-step order 2 after.
            double a_new, a_cur, a_old;
            if (have_two) {
                const double hn = h_try, hp = h_prev;
                a_new = (2.0 * hn + hp) / (hn * (hn + hp));
                a_cur = -(hn + hp) / (hn * hp);
                a_old = hn / (hp * (hn + hp));
            } else {
                a_new = 1.0 / h_try;
                a_cur = -1.0 / h_try;
                a_old = 0.0;
            }

            // Newton on E(a_new·x + a_cur·x_n + a_old·x_{n-1}) - f(x, t) = 0.
            Vector xk = x_pred;
            const SparseMatrix J = rhs.jacobian(tn1, xk);
            SparseMatrix iter_matrix = a_new * S.E - J;
            newton_lu.compute(iter_matrix);
            bool newton_ok = newton_lu.info() == Eigen::Success;
            if (newton_ok) {
                bool converged = false;
                for (int itn = 0; itn < 8; ++itn) {
                    Vector res = S.E * (a_new * xk + a_cur * x + a_old * x_prev) -
                                 rhs.eval(tn1, xk);
                    if (!finite(res)) {
                        newton_ok = false;
                        break;
                    }
                    const Vector dx = newton_lu.solve(res);
                    xk -= dx;
                    double wrms = 0.0;
                    for (Index i = 0; i < N; ++i) {
                        const double wi = dx[i] / (cfg.abs_tol + cfg.rel_tol * std::abs(xk[i]));
                        wrms += wi * wi;
                    }
                    wrms = std::sqrt(wrms / std::max<Index>(N, 1));
                    if (wrms < 0.05) {
                        converged = true;
                        break;
                    }
                }
                newton_ok = newton_ok && converged && finite(xk);
            }
            if (!newton_ok) {
                h_try *= 0.25;
                continue;
            }

            // Local error from the predictor gap (same order as the BDF LTE).
            double err = 0.0;
            for (Index i = 0; i < N; ++i) {
                const double wi =
                    0.5 * (xk[i] - x_pred[i]) / (cfg.abs_tol + cfg.rel_tol * std::abs(xk[i]));
                err += wi * wi;
            }
            err = std::sqrt(err / std::max<Index>(N, 1));
            const int order = have_two ? 2 : 1;
            if (err <= 1.0 || h_try <= 2 * floor_h) {
                x_prev = x;
                h_prev = h_try;
                x = xk;
                t = tn1;
                have_two = true;
                accepted = true;
                const double grow =
                    std::clamp(0.9 * std::pow(std::max(err, 1e-10), -1.0 / (order + 1)), 0.2, 5.0);
                h = h_try * grow;
            } else {
                h_try *= std::clamp(0.9 * std::pow(err, -1.0 / (order + 1)), 0.1, 0.9);
            }
        }

        if (!finite(x))
            throw std::runtime_error("integrate: non-finite state at t = " + std::to_string(t));
        if (std::abs(t - traj.times[std::min(next_grid, K - 1)]) < 1e-12 * cfg.t_end) {
            traj.states.col(next_grid) = x;
            traj.outputs.col(next_grid) = S.C * x;
            ++next_grid;
            if (next_grid >= K)
                break;
        }
    }
    if (next_grid < K)
        throw std::runtime_error("integrate: did not reach t_end");
    return traj;
}

Trajectory integrate(const DrivenSystem& D, const SparseMatrix& output_map,
                     const IntegratorConfig& cfg) {
    return integrate(to_qb_system(D, output_map), InputFunction{}, cfg);
}

Trajectory integrate_driven_output(const DrivenSystem& D, const SparseMatrix& C,
                                   const IntegratorConfig& cfg) {
    // y = C P_x w: pad C with zero columns over the generator block.
    std::vector<Triplet> trips;
    for (Index k = 0; k < C.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(C, k); it; ++it)
            trips.emplace_back(it.row(), it.col(), it.value());
    SparseMatrix padded(C.rows(), D.dim());
    padded.setFromTriplets(trips.begin(), trips.end());
    return integrate(D, padded, cfg);
}

ErrorSummary output_error(const Trajectory& full, const Trajectory& reduced) {
    if (full.times.size() != reduced.times.size() ||
        (full.times - reduced.times).cwiseAbs().maxCoeff() > 1e-12 * full.times.maxCoeff())
        throw std::invalid_argument("output_error: output grids differ");
    if (full.outputs.rows() != reduced.outputs.rows())
        throw std::invalid_argument("output_error: output dimensions differ");
    ErrorSummary es;
    const Index K = full.times.size();
    es.abs_error.resize(K);
    for (Index j = 0; j < K; ++j)
        es.abs_error[j] = (full.outputs.col(j) - reduced.outputs.col(j)).cwiseAbs().maxCoeff();
    es.max_abs_error = es.abs_error.maxCoeff();
    const double scale = full.outputs.cwiseAbs().maxCoeff();
    es.rel_linf = scale > 0 ? es.max_abs_error / scale : es.max_abs_error;
    return es;
}

}  // namespace qbmor
