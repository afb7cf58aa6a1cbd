// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0
//
// io.hpp — file formats: Matrix-Market coordinate/array, the 4-column
// coordinate text format for quadratic maps, plain vectors, trajectory CSV,
// and the on-disk system/generator bundles.

#pragma once

#include "qbmor/model.hpp"
#include "qbmor/simulate.hpp"

#include <string>

namespace qbmor {

void write_matrix_market(const std::string& path, const SparseMatrix& A);
SparseMatrix read_matrix_market(const std::string& path);

void write_matrix_market_dense(const std::string& path, const Matrix& A);
Matrix read_matrix_market_dense(const std::string& path);

// Plain text, one value per line.
void write_vector(const std::string& path, const Vector& v);
Vector read_vector(const std::string& path);

// Header `%%QuadMap rows left right nnz`, then 1-based `row j k value` lines.
void write_quad_map(const std::string& path, const QuadMap& G);
QuadMap read_quad_map(const std::string& path);

// Directory with E.mtx, A.mtx, B.mtx, C.mtx, x0.vec, G.qmap, D.qmap and the
// optional Gu.qmap / Bp.mtx.
void write_system_bundle(const std::string& dir, const QBSystem& S);
QBSystem read_system_bundle(const std::string& dir);

// Directory with Az.mtx, Cz.mtx, z0.vec, Gz.qmap and the optional Bz.mtx.
void write_generator_bundle(const std::string& dir, const SignalGenerator& T);
SignalGenerator read_generator_bundle(const std::string& dir);

// Header `t,y1..ym[,x1..xn]`, one row per grid point, full precision.
void write_trajectory_csv(const std::string& path, const Trajectory& traj, bool with_states);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace qbmor
