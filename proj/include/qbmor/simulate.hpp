// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// simulate.hpp — stiff implicit time integration (variable-step BDF with
// analytic Jacobians and Newton inner iterations) plus error metrics.

#pragma once

#include "qbmor/model.hpp"

#include <functional>

namespace qbmor {

struct Trajectory {
    Vector times;    // K, strictly increasing
    Matrix states;   // dim × K
    Matrix outputs;  // m × K
};

struct IntegratorConfig {
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    double t_end = 1.0;
    double max_step = std::numeric_limits<double>::infinity();
    int output_grid = 300;  // uniform sample count including both endpoints
};

// Input signal u(t); `derivative` is required only for systems with a Bp u̇ term.
struct InputFunction {
    std::function<Vector(double)> value;
    std::function<Vector(double)> derivative;
};

// Input emitted by a linear signal generator, with exact derivative; the
// closed form u(t) = Cz exp(Az t) z0 is evaluated through dense scaling and
// squaring. Quadratic generators are simulated, not wrapped.
InputFunction generator_input(const SignalGenerator& T);

Trajectory integrate(const QBSystem& S, const InputFunction& u, const IntegratorConfig& cfg);

// Autonomous driven system; outputs are output_map * w.
Trajectory integrate(const DrivenSystem& D, const SparseMatrix& output_map,
                     const IntegratorConfig& cfg);

// Driven system with the plant's output matrix applied to the state block.
Trajectory integrate_driven_output(const DrivenSystem& D, const SparseMatrix& C,
                                   const IntegratorConfig& cfg);

struct ErrorSummary {
    Vector abs_error;      // per grid point, max over output components
    double max_abs_error = 0.0;
    double rel_linf = 0.0; // max_abs_error / max |full output|
};

ErrorSummary output_error(const Trajectory& full, const Trajectory& reduced);

}  // namespace qbmor
