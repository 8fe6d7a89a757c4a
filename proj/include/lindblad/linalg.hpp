// linalg.hpp — LAPACK-backed dense factorizations used for rank decisions

#pragma once

#include <Eigen/Dense>

#include "lindblad/operator_core.hpp"

namespace lindblad::detail {

// A = u · diag(sigma) · v†, sigma descending. Full U and V.
struct SvdResult {
    Eigen::VectorXd sigma;
    Matrix u;
    Matrix v;
};

SvdResult svd(const Matrix& a);

struct RealSvdResult {
    Eigen::VectorXd sigma;
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
};

RealSvdResult svd_real(const Eigen::MatrixXd& a);

// Singular values only.
Eigen::VectorXd singular_values(const Matrix& a);

// Number of singular values above rtol·sigma_max.
int svd_rank(const Eigen::VectorXd& sigma, double rtol);

// Orthonormal columns spanning {x : Ax ≈ 0}, threshold sigma < rtol·sigma_max.
Matrix right_nullspace(const Matrix& a, double rtol);

// sin of the largest principal angle between the column spans of a and b
// (columns need not be orthonormal; spans must have equal dimension).
double subspace_angle_sin(const Matrix& a, const Matrix& b);

// Orthonormal basis of the column span of a (rank-revealing, threshold rtol).
Matrix orthonormal_columns(const Matrix& a, double rtol);

// hs-orthonormal basis of Hermitian matrices spanning the same subspace as
// `raw`. Throws numerical_error (message prefixed by `what`) when the span is
// not dagger-closed within tolerance.
std::vector<Matrix> hermitian_matrix_basis(const std::vector<Matrix>& raw, const char* what);

// Deterministic ordering and ±1 sign convention for a Hermitian basis:
// diagonal weight descending, ties by the position of the peak entry.
void sort_and_sign_fix(std::vector<Matrix>& basis);

// Grow an orthonormal column span by one vector; returns false when the
// vector already lies in the span within tol.
bool grow_span(Matrix& span, Vector v, double tol);

}  // namespace lindblad::detail
