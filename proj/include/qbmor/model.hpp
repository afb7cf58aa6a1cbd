// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// model.hpp — quadratic-bilinear systems, signal generators, and assembly of
// the autonomous generator-driven systems they produce.

#pragma once

#include "qbmor/quad_map.hpp"
#include "qbmor/types.hpp"

namespace qbmor {

// E ẋ = A x + G x⊗x + D x⊗u + B u + Gu u⊗u + Bp u̇,  y = C x,  x(0) = x0.
// E must be nonsingular (checked by sparse LU at validation). Gu/Bp default to
// zero maps.
struct QBSystem {
    SparseMatrix E;  // N×N
    SparseMatrix A;  // N×N
    QuadMap G;       // (N; N, N)
    QuadMap D;       // (N; N, p)
    SparseMatrix B;  // N×p
    SparseMatrix C;  // m×N
    Vector x0;       // N
    QuadMap Gu;      // (N; p, p), zero if absent
    SparseMatrix Bp; // N×p, zero if absent

    Index state_dim() const { return E.rows(); }
    Index input_dim() const { return B.cols(); }
    Index output_dim() const { return C.rows(); }
    bool has_extended_input() const { return !Gu.is_zero() || Bp.nonZeros() > 0; }

    // Dimension consistency + nonsingularity of E (attempts a sparse LU).
    void validate() const;
};

// Autonomous quadratic generator: u = Cz z, ż = Az z + Gz z⊗z, z(0) = z0.
// Bz is the input matrix of an input-weight filter (ż += Bz u_F); empty for
// plain generators.
struct SignalGenerator {
    SparseMatrix Az;  // q×q
    QuadMap Gz;       // (q; q, q)
    SparseMatrix Cz;  // p×q
    Vector z0;        // q
    SparseMatrix Bz;  // q×p_F, empty unless used as an input weight

    Index dim() const { return Az.rows(); }
    Index output_dim() const { return Cz.rows(); }
    bool linear() const { return Gz.is_zero(); }

    void validate() const;
};

// Assembled autonomous system 𝔈 ẇ = 𝔄 w + 𝔊 w⊗w, w(0) = b, with w = [x; z]
// and x recovered by the selector of the first `state_dim` coordinates.
struct DrivenSystem {
    SparseMatrix E;  // (N+q)×(N+q), block diag(E, I_q)
    SparseMatrix A;  // (N+q)×(N+q), block upper triangular
    QuadMap G;       // (N+q; N+q, N+q)
    Vector b;        // [x0; z0]
    Index state_dim = 0;  // N
    Index gen_dim = 0;    // q

    Index dim() const { return state_dim + gen_dim; }
    // P_x w — the leading system-state block.
    Vector select_state(const Vector& w) const { return w.head(state_dim); }
    Matrix select_state(const Matrix& W) const { return W.topRows(state_dim); }
};

// Composition of a plant with an input-shaping filter; linear input map
// B, zero initial state. 𝔈 ẇ = 𝔄 w + 𝔊 w⊗w + 𝔅 u_F, x = P_x w.
struct InputWeightedSystem {
    DrivenSystem core;   // E, A, G with b = 0
    SparseMatrix B;      // (N+q)×p_F
};

// Stacked-system blocks exactly as the driven-system definition prescribes:
// A upper-right = B Cz, quadratic rows carry G on (x,x) slots, D(I⊗Cz) on the
// (x,z) slots and Gz on (z,z) slots. Rejects systems with extended input maps.
DrivenSystem assemble_driven(const QBSystem& S, const SignalGenerator& T);

// Generalized assembly admitting quadratic input terms and first input
// derivatives: A upper-right = B Cz + Bp Cz Az, (z,z) slots additionally carry
// Gu (Cz ⊗ Cz) + Bp Cz Gz. Reduces to assemble_driven when Gu, Bp vanish.
DrivenSystem assemble_driven_extended(const QBSystem& S, const SignalGenerator& T);

// Generator whose output stacks u and its time derivatives up to
// max_derivative. Linear generators keep their state and gain output rows
// Cz Az^i; quadratic generators are augmented with derivative states (z1 = ż,
// consistently initialized), supported up to max_derivative = 2.
SignalGenerator extend_generator_derivative(const SignalGenerator& T, int max_derivative);

// Input-weighted composition S_F: u_F ↦ x with input map [Bp Cz Bz; Bz] and
// zero initial state. F must carry an input matrix Bz.
InputWeightedSystem assemble_input_weighted(const QBSystem& S, const SignalGenerator& F);

// Galerkin projection by a column-orthonormal V: congruence on E, A, restriction
// of B, C, x0, quadratic maps projected without forming V ⊗ V.
QBSystem galerkin_project(const QBSystem& S, const Matrix& V);

// Block-diagonal union of generators emitting the summed output
// u = [Cz1 | Cz2 | ...] [z1; z2; ...]. All outputs must share dimension p.
SignalGenerator superpose_generators(const std::vector<SignalGenerator>& gens);

// The weighted system as a plain QB system (linear input map, no bilinear or
// extended terms); convenient for reducers and simulation.
QBSystem to_qb_system(const InputWeightedSystem& W);

// The driven system as an input-free QB system (B, D empty) for simulation.
QBSystem to_qb_system(const DrivenSystem& D, const SparseMatrix& output_map);

}  // namespace qbmor
