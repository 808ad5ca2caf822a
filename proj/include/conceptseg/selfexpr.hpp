#pragma once

#include <cmath>
#include <stdexcept>

#include "conceptseg/common.hpp"

namespace conceptseg {

/// Self-representation coefficients: column j says how window j is rebuilt
/// from the other windows' latent codes. With zero_diagonal the trivial
/// identity solution is projected out after every update.
struct SelfExprMatrix {
    Matrix theta;  // n x n
    bool zero_diagonal = true;

    Index order() const { return theta.rows(); }
};

inline void project_zero_diagonal(SelfExprMatrix& theta) {
    if (theta.zero_diagonal) theta.theta.diagonal().setZero();
}

/// Bidiagonal difference operator, n x (n-1): -1 on the diagonal, +1 below.
/// For any square T of order n, (T * R) column j equals T.col(j+1) - T.col(j).
inline Matrix difference_matrix(Index n) {
    if (n < 2) throw std::invalid_argument("difference_matrix: need n >= 2");
    Matrix r = Matrix::Zero(n, n - 1);
    for (Index j = 0; j + 1 < n; ++j) {
        r(j, j) = -1.0;
        r(j + 1, j) = 1.0;
    }
    return r;
}

/// Z * Theta_s: each latent column re-expressed through the coefficients.
inline Matrix self_expression(const Matrix& z, const SelfExprMatrix& theta) {
    if (z.cols() != theta.order())
        throw std::invalid_argument("self_expression: column count must equal theta order");
    return z * theta.theta;
}

struct ValueGrad {
    double value = 0.0;
    Matrix grad;
};

/// Entrywise l1 norm with its subgradient (sign, 0 at 0). Constrained
/// diagonal entries carry no gradient.
inline ValueGrad l1_value_and_subgrad(const SelfExprMatrix& theta) {
    ValueGrad out;
    out.value = theta.theta.array().abs().sum();
    out.grad = theta.theta.array().sign().matrix();
    if (theta.zero_diagonal) out.grad.diagonal().setZero();
    return out;
}

/// Column-wise l1,2 norm: sum over columns of the column Euclidean norms.
/// The subgradient of column j is m_j / max(||m_j||, epsilon); epsilon guards
/// the nondifferentiable all-zero column.
inline ValueGrad l12_value_and_subgrad(const Matrix& m, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("l12: epsilon must be >= 0");
    ValueGrad out;
    out.grad.resize(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j) {
        const double norm = m.col(j).norm();
        out.value += norm;
        out.grad.col(j) = m.col(j) / std::max(norm, epsilon);
    }
    return out;
}

/// Temporal smoothness: l1,2 of the consecutive-column differences Theta * R.
/// Gradient w.r.t. Theta is G * R^T with G the l1,2 subgradient at Theta * R.
inline ValueGrad smoothness_term(const SelfExprMatrix& theta, const Matrix& r, double epsilon) {
    if (theta.theta.cols() != r.rows())
        throw std::invalid_argument("smoothness_term: shape mismatch");
    const Matrix diffs = theta.theta * r;
    ValueGrad l12 = l12_value_and_subgrad(diffs, epsilon);
    ValueGrad out;
    out.value = l12.value;
    out.grad = l12.grad * r.transpose();
    if (theta.zero_diagonal) out.grad.diagonal().setZero();
    return out;
}

}  // namespace conceptseg
