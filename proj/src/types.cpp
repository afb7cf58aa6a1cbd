// Copyright (c) 2026 qbmor contributors
// SPDX-License-Identifier: Apache-2.0

#include "qbmor/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace qbmor {

Index orthonormal_extend(Matrix& basis, const Matrix& W, double drop_tol) {
    if (basis.rows() == 0 && W.rows() > 0)
        basis.resize(W.rows(), 0);
    if (W.rows() != basis.rows())
        throw std::invalid_argument("orthonormal_extend: row count mismatch");

    Index added = 0;
    for (Index c = 0; c < W.cols(); ++c) {
        Vector v = W.col(c);
        const double norm0 = v.norm();
        if (norm0 == 0.0)
            continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (Index k = 0; k < basis.cols(); ++k)
                v -= (basis.col(k).dot(v)) * basis.col(k);
        }
        const double norm1 = v.norm();
        if (norm1 <= drop_tol * norm0)
            continue;  // deflated: direction already represented
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = v / norm1;
        ++added;
    }
    return added;
}

Vector principal_angles(const Matrix& A, const Matrix& B) {
    const Matrix Qa = orthonormalize(A);
    const Matrix Qb = orthonormalize(B);
    if (Qa.cols() == 0 || Qb.cols() == 0)
        return Vector(0);
    Eigen::JacobiSVD<Matrix> svd(Qa.transpose() * Qb);
    Vector sigma = svd.singularValues();
    Vector angles(sigma.size());
    for (Index i = 0; i < sigma.size(); ++i)
        angles[i] = std::acos(std::min(1.0, std::max(-1.0, sigma[i])));
    std::sort(angles.data(), angles.data() + angles.size());
    return angles;
}

double orthonormality_defect(const Matrix& Q) {
    if (Q.cols() == 0)
        return 0.0;
    const Matrix G = Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols());
    return G.cwiseAbs().maxCoeff();
}

}  // namespace qbmor
