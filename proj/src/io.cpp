// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qbmor {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void parse_error(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open: " + path);
    return is;
}

// Next non-comment line; returns false at EOF.
bool next_line(std::istream& is, std::string& line, int& lineno) {
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%')
            return true;
    }
    return false;
}

}  // namespace

void write_matrix_market(const std::string& path, const SparseMatrix& A) {
    std::ofstream os = open_out(path);
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
    for (Index k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it)
            os << (it.row() + 1) << " " << (it.col() + 1) << " " << fmt(it.value()) << "\n";
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line))
        parse_error(path, 1, "empty file");
    ++lineno;
    if (line.rfind("%%MatrixMarket", 0) != 0)
        parse_error(path, lineno, "missing MatrixMarket header");
    const bool symmetric = line.find("symmetric") != std::string::npos;
    if (!next_line(is, line, lineno))
        parse_error(path, lineno, "missing size line");
    Index rows, cols, nnz;
    {
        std::istringstream ss(line);
        if (!(ss >> rows >> cols >> nnz))
            parse_error(path, lineno, "bad size line");
    }
    std::vector<Triplet> trips;
    trips.reserve(nnz);
    for (Index e = 0; e < nnz; ++e) {
        if (!next_line(is, line, lineno))
            parse_error(path, lineno, "unexpected end of file");
        std::istringstream ss(line);
        Index i, j;
        double v;
        if (!(ss >> i >> j >> v))
            parse_error(path, lineno, "bad entry line");
        if (i < 1 || i > rows || j < 1 || j > cols)
            parse_error(path, lineno, "index out of range");
        trips.emplace_back(i - 1, j - 1, v);
        if (symmetric && i != j)
            trips.emplace_back(j - 1, i - 1, v);
    }
    SparseMatrix A(rows, cols);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

void write_matrix_market_dense(const std::string& path, const Matrix& A) {
    std::ofstream os = open_out(path);
    os << "%%MatrixMarket matrix array real general\n";
    os << A.rows() << " " << A.cols() << "\n";
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i)
            os << fmt(A(i, j)) << "\n";
}

Matrix read_matrix_market_dense(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line))
        parse_error(path, 1, "empty file");
    ++lineno;
    if (line.rfind("%%MatrixMarket", 0) != 0 || line.find("array") == std::string::npos)
        parse_error(path, lineno, "expected a MatrixMarket array header");
    if (!next_line(is, line, lineno))
        parse_error(path, lineno, "missing size line");
    Index rows, cols;
    {
        std::istringstream ss(line);
        if (!(ss >> rows >> cols))
            parse_error(path, lineno, "bad size line");
    }
    Matrix A(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            if (!next_line(is, line, lineno))
                parse_error(path, lineno, "unexpected end of file");
            std::istringstream ss(line);
            if (!(ss >> A(i, j)))
                parse_error(path, lineno, "bad value");
        }
    return A;
}

void write_vector(const std::string& path, const Vector& v) {
    std::ofstream os = open_out(path);
    for (Index i = 0; i < v.size(); ++i)
        os << fmt(v[i]) << "\n";
}

Vector read_vector(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<double> vals;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%')
            continue;
        std::istringstream ss(line);
        double v;
        if (!(ss >> v))
            parse_error(path, lineno, "bad value");
        vals.push_back(v);
    }
    Vector out(static_cast<Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i)
        out[static_cast<Index>(i)] = vals[i];
    return out;
}

void write_quad_map(const std::string& path, const QuadMap& G) {
    std::ofstream os = open_out(path);
    os << "%%QuadMap " << G.rows() << " " << G.left_cols() << " " << G.right_cols() << " "
       << G.nonzeros() << "\n";
    for (const QuadEntry& e : G.entries())
        os << (e.row + 1) << " " << (e.j + 1) << " " << (e.k + 1) << " " << fmt(e.value)
           << "\n";
}

QuadMap read_quad_map(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line))
        parse_error(path, 1, "empty file");
    ++lineno;
    std::istringstream header(line);
    std::string magic;
    Index rows, left, right, nnz;
    if (!(header >> magic >> rows >> left >> right >> nnz) || magic != "%%QuadMap")
        parse_error(path, lineno, "expected '%%QuadMap rows left right nnz' header");
    std::vector<QuadEntry> entries;
    entries.reserve(nnz);
    for (Index e = 0; e < nnz; ++e) {
        if (!next_line(is, line, lineno))
            parse_error(path, lineno, "unexpected end of file");
        std::istringstream ss(line);
        Index r, j, k;
        double v;
        if (!(ss >> r >> j >> k >> v))
            parse_error(path, lineno, "bad entry line");
        if (r < 1 || r > rows || j < 1 || j > left || k < 1 || k > right)
            parse_error(path, lineno, "index out of range");
        entries.push_back({r - 1, j - 1, k - 1, v});
    }
    return QuadMap::from_entries(rows, left, right, std::move(entries));
}

void write_system_bundle(const std::string& dir, const QBSystem& S) {
    fs::create_directories(dir);
    write_matrix_market(dir + "/E.mtx", S.E);
    write_matrix_market(dir + "/A.mtx", S.A);
    write_matrix_market(dir + "/B.mtx", S.B);
    write_matrix_market(dir + "/C.mtx", S.C);
    write_vector(dir + "/x0.vec", S.x0);
    write_quad_map(dir + "/G.qmap", S.G);
    write_quad_map(dir + "/D.qmap", S.D);
    if (!S.Gu.is_zero())
        write_quad_map(dir + "/Gu.qmap", S.Gu);
    if (S.Bp.nonZeros() > 0)
        write_matrix_market(dir + "/Bp.mtx", S.Bp);
}

QBSystem read_system_bundle(const std::string& dir) {
    QBSystem S;
    S.E = read_matrix_market(dir + "/E.mtx");
    S.A = read_matrix_market(dir + "/A.mtx");
    S.B = read_matrix_market(dir + "/B.mtx");
    S.C = read_matrix_market(dir + "/C.mtx");
    S.x0 = read_vector(dir + "/x0.vec");
    S.G = read_quad_map(dir + "/G.qmap");
    S.D = read_quad_map(dir + "/D.qmap");
    const Index N = S.E.rows();
    const Index p = S.B.cols();
    if (fs::exists(dir + "/Gu.qmap"))
        S.Gu = read_quad_map(dir + "/Gu.qmap");
    else
        S.Gu = QuadMap(N, p, p);
    if (fs::exists(dir + "/Bp.mtx"))
        S.Bp = read_matrix_market(dir + "/Bp.mtx");
    else
        S.Bp.resize(N, p);
    S.validate();
    return S;
}

void write_generator_bundle(const std::string& dir, const SignalGenerator& T) {
    fs::create_directories(dir);
    write_matrix_market(dir + "/Az.mtx", T.Az);
    write_matrix_market(dir + "/Cz.mtx", T.Cz);
    write_vector(dir + "/z0.vec", T.z0);
    write_quad_map(dir + "/Gz.qmap", T.Gz);
    if (T.Bz.nonZeros() > 0)
        write_matrix_market(dir + "/Bz.mtx", T.Bz);
}

SignalGenerator read_generator_bundle(const std::string& dir) {
    SignalGenerator T;
    T.Az = read_matrix_market(dir + "/Az.mtx");
    T.Cz = read_matrix_market(dir + "/Cz.mtx");
    T.z0 = read_vector(dir + "/z0.vec");
    T.Gz = read_quad_map(dir + "/Gz.qmap");
    if (fs::exists(dir + "/Bz.mtx"))
        T.Bz = read_matrix_market(dir + "/Bz.mtx");
    else
        T.Bz.resize(T.Az.rows(), 0);
    T.validate();
    return T;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, bool with_states) {
    std::ofstream os = open_out(path);
    os << "t";
    for (Index i = 0; i < traj.outputs.rows(); ++i)
        os << ",y" << (i + 1);
    if (with_states)
        for (Index i = 0; i < traj.states.rows(); ++i)
            os << ",x" << (i + 1);
    os << "\n";
    for (Index j = 0; j < traj.times.size(); ++j) {
        os << fmt(traj.times[j]);
        for (Index i = 0; i < traj.outputs.rows(); ++i)
            os << "," << fmt(traj.outputs(i, j));
        if (with_states)
            for (Index i = 0; i < traj.states.rows(); ++i)
                os << "," << fmt(traj.states(i, j));
        os << "\n";
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line))
        parse_error(path, 1, "empty file");
    ++lineno;
    Index n_outputs = 0, n_states = 0;
    {
        std::istringstream ss(line);
        std::string col;
        if (!std::getline(ss, col, ',') || col != "t")
            parse_error(path, lineno, "expected header starting with 't'");
        while (std::getline(ss, col, ',')) {
            if (col.rfind("y", 0) == 0)
                ++n_outputs;
            else if (col.rfind("x", 0) == 0)
                ++n_states;
            else
                parse_error(path, lineno, "unexpected column '" + col + "'");
        }
    }
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        if (static_cast<Index>(row.size()) != 1 + n_outputs + n_states)
            parse_error(path, lineno, "wrong column count");
        times.push_back(row[0]);
        rows.push_back(std::move(row));
    }
    Trajectory traj;
    const Index K = static_cast<Index>(times.size());
    traj.times.resize(K);
    traj.outputs.resize(n_outputs, K);
    traj.states.resize(n_states, K);
    for (Index j = 0; j < K; ++j) {
        traj.times[j] = times[static_cast<size_t>(j)];
        for (Index i = 0; i < n_outputs; ++i)
            traj.outputs(i, j) = rows[static_cast<size_t>(j)][static_cast<size_t>(1 + i)];
        for (Index i = 0; i < n_states; ++i)
            traj.states(i, j) =
                rows[static_cast<size_t>(j)][static_cast<size_t>(1 + n_outputs + i)];
    }
    return traj;
}

}  // namespace qbmor
