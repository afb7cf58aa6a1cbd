// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// reduction.hpp — reduction-basis construction: input-tailored approximate
// moment matching, one-sided multi-moment matching, input-weighted variant,
// snapshot POD, and the IRKA frequency heuristic.

#pragma once

#include "qbmor/lyapunov.hpp"
#include "qbmor/model.hpp"

#include <string>

namespace qbmor {

struct AssmConfig {
    std::vector<double> freqs_w2;  // expansion frequencies for the second-order chain
    std::vector<int> orders_w2;    // moments per frequency (single value broadcasts)
    std::vector<double> freqs_w1;  // expansion frequencies for the linear chain
    std::vector<int> orders_w1;
    double lowrank_tol = 1e-3;     // absolute singular-value cutoff for the collected factors
    double lyap_tol = 1e-8;        // residual target of the inner low-rank solves
    Index max_rank = 200;
    int max_iters = 100;

    LyapOptions lyap_options() const { return {lyap_tol, max_rank, max_iters}; }
    int order_w2(size_t j) const;
    int order_w1(size_t j) const;
    void validate() const;
};

struct ReductionBasis {
    Matrix V;  // N × n column-orthonormal
    std::vector<std::string> provenance;  // one tag per column

    Index dim() const { return V.cols(); }
};

// Union of the shifted Krylov spaces K_L(A_s⁻¹E, A_s⁻¹B) over the given
// frequencies, orthonormalized with deflation.
ReductionBasis krylov_basis(const QBSystem& S, const std::vector<double>& freqs,
                            const std::vector<int>& orders);

struct X2Bases {
    Matrix Va;  // orthonormal span of the collected state-block moments
    Matrix Vb;  // dominant left singular directions of the deflated factor pool
    std::vector<std::string> prov_a, prov_b;
    std::vector<double> lyap_residuals;
    Vector pool_singular_values;  // spectrum the Vb cutoff acted on
};

// Second-order bases: low-rank factor chains per frequency, moment chains
// through them, Va from the moments, Vb from the singular directions of the
// factor pool projected off span[Va, V_perp] with absolute cutoff lowrank_tol.
X2Bases assm_x2_bases(const DrivenSystem& D, const AssmConfig& cfg, const Matrix& V_perp);

struct AssmResult {
    ReductionBasis basis;
    QBSystem reduced;
};

// Full input-tailored reduction: V = orth[Va | Vb | V1], reduced realization
// by Galerkin projection. Systems with quadratic-input/derivative terms are
// assembled through the extended driven form automatically.
AssmResult assm_reduce(const QBSystem& S, const SignalGenerator& T, const AssmConfig& cfg);

// One-sided multi-moment matching: linear chains of order q1 at each σ, second
// level at 2σ seeded by G(v_a ⊗ v_b), a+b ≤ q2-1, and D(v_a ⊗ I_p), continued
// by W_i = A_{2σ}⁻¹ E W_{i-1} for i < q2.
ReductionBasis multm_reduce(const QBSystem& S, const std::vector<double>& freqs, int q1,
                            int q2);
// Per-frequency orders.
ReductionBasis multm_reduce(const QBSystem& S, const std::vector<double>& freqs,
                            const std::vector<int>& q1s, const std::vector<int>& q2s);

// Multi-moment matching on the input-weighted composition; the state-block
// rows of the extended basis are extracted and re-orthonormalized.
ReductionBasis multm_iw_reduce(const QBSystem& S, const SignalGenerator& F,
                               const std::vector<double>& freqs, int q1, int q2);

// Leading left singular directions of the snapshot matrix.
ReductionBasis pod_reduce(const Matrix& snapshots, Index n);

// Per-block POD embedded block-diagonally; block_rows partitions the state
// rows, block_dims the per-block basis sizes.
ReductionBasis pod_reduce_blockwise(const Matrix& snapshots,
                                    const std::vector<Index>& block_rows,
                                    const std::vector<Index>& block_dims);

// Real converged IRKA shifts for the linear part (E, A, B, C), ascending.
// Returns fewer than `count` values (with a note on stderr) when the converged
// shift set contains fewer real points.
std::vector<double> irka_frequencies(const QBSystem& S, int count);

}  // namespace qbmor
