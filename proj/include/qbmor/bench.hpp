// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// bench.hpp — the benchmark systems and their input-case signal generators.

#pragma once

#include "qbmor/model.hpp"

#include <string>

namespace qbmor {

enum class BurgersForm { advective, conservative };
enum class DiodeLaw {
    shifted,  // g(v) = exp(40 v) - 1: g(0) = 0, rest state is an equilibrium
    printed   // g(v) = exp(40 v - 1) as printed in the benchmark description
};

// Viscous Burgers on (0,1), Dirichlet inflow v(0)=u, Neumann outflow, central
// differences on N inner nodes with h = 1/(N+2), output y = v_N. The
// conservative form carries the quadratic input term u² from the node-1 stencil.
QBSystem burgers(Index N, double nu, BurgersForm form);
SignalGenerator burgers_case_generator(int input_case);

// Chafee-Infante in the quadratic augmented variables [v; w], w = v², central
// differences on Ntilde inner nodes per field; state dimension 2·Ntilde.
QBSystem chafee(Index Ntilde);
SignalGenerator chafee_case_generator(int input_case);

// Nonlinear RC ladder with diode characteristics, recast to quadratic-bilinear
// form in voltage differences and auxiliary exponential states; dimension
// 2·Ntilde, output y = x_1.
QBSystem rc_ladder(Index Ntilde, DiodeLaw law = DiodeLaw::shifted);
SignalGenerator rc_case_generator(int input_case);

struct BenchmarkSpec {
    std::string name;           // burgers_adv | burgers_cons | chafee | rc_ladder
    Index size = 0;             // N for Burgers, Ntilde otherwise
    double nu = 0.01;
    int input_case = 1;
    DiodeLaw diode_law = DiodeLaw::shifted;
};

QBSystem build_benchmark(const BenchmarkSpec& spec);
SignalGenerator benchmark_generator(const BenchmarkSpec& spec);

}  // namespace qbmor
