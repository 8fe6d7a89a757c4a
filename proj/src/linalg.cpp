// linalg.cpp — zgesdd-backed SVD helpers

#include "lindblad/linalg.hpp"

#include <algorithm>
#include <string>

#include <lapacke.h>

namespace lindblad::detail {

namespace {

// The system BLAS assembles garbled singular vectors from ?gesdd on some
// very tall shapes. Factorizations therefore only ever hand gesdd a square
// matrix: tall inputs are QR-reduced first and wide inputs zero-padded.

SvdResult svd_square(const Matrix& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Matrix work = a;  // zgesdd destroys its input
    SvdResult r;
    r.sigma.resize(n);
    r.u.resize(n, n);
    Matrix vt(n, n);
    const lapack_int info = LAPACKE_zgesdd(
        LAPACK_COL_MAJOR, 'A', n, n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
        r.sigma.data(), reinterpret_cast<lapack_complex_double*>(r.u.data()), n,
        reinterpret_cast<lapack_complex_double*>(vt.data()), n);
    if (info != 0) {
        throw numerical_error("svd: zgesdd failed with info " + std::to_string(info));
    }
    r.v = vt.adjoint();
    return r;
}

RealSvdResult svd_real_square(const Eigen::MatrixXd& a) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd work = a;
    RealSvdResult r;
    r.sigma.resize(n);
    r.u.resize(n, n);
    Eigen::MatrixXd vt(n, n);
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n,
                                           r.sigma.data(), r.u.data(), n, vt.data(), n);
    if (info != 0) {
        throw numerical_error("svd_real: dgesdd failed with info " + std::to_string(info));
    }
    r.v = vt.transpose();
    return r;
}

// Thin orthonormal factor Q (m×n) and square R (n×n) of a tall matrix.
void qr_reduce(Matrix a, Matrix& q, Matrix& r) {
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    Vector tau(std::min(m, n));
    lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, m, n,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), m,
                                     reinterpret_cast<lapack_complex_double*>(tau.data()));
    if (info != 0) throw numerical_error("svd: zgeqrf failed with info " + std::to_string(info));
    r = a.topRows(n).triangularView<Eigen::Upper>();
    info = LAPACKE_zungqr(LAPACK_COL_MAJOR, m, n, n,
                          reinterpret_cast<lapack_complex_double*>(a.data()), m,
                          reinterpret_cast<lapack_complex_double*>(tau.data()));
    if (info != 0) throw numerical_error("svd: zungqr failed with info " + std::to_string(info));
    q = a.leftCols(n);
}

void qr_reduce_real(Eigen::MatrixXd a, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    Eigen::VectorXd tau(std::min(m, n));
    lapack_int info = LAPACKE_dgeqrf(LAPACK_COL_MAJOR, m, n, a.data(), m, tau.data());
    if (info != 0) throw numerical_error("svd_real: dgeqrf failed with info " + std::to_string(info));
    r = a.topRows(n).triangularView<Eigen::Upper>();
    info = LAPACKE_dorgqr(LAPACK_COL_MAJOR, m, n, n, a.data(), m, tau.data());
    if (info != 0) throw numerical_error("svd_real: dorgqr failed with info " + std::to_string(info));
    q = a.leftCols(n);
}

}  // namespace

SvdResult svd(const Matrix& a) {
    const auto m = a.rows();
    const auto n = a.cols();
    if (m == n) return svd_square(a);
    if (m < n) {
        Matrix padded = Matrix::Zero(n, n);
        padded.topRows(m) = a;
        SvdResult r = svd_square(padded);
        r.u = r.u.topRows(m).eval();  // keep only the physical rows
        return r;
    }
    Matrix q, rr;
    qr_reduce(a, q, rr);
    SvdResult r = svd_square(rr);
    r.u = q * r.u;
    return r;
}

RealSvdResult svd_real(const Eigen::MatrixXd& a) {
    const auto m = a.rows();
    const auto n = a.cols();
    if (m == n) return svd_real_square(a);
    if (m < n) {
        Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, n);
        padded.topRows(m) = a;
        RealSvdResult r = svd_real_square(padded);
        r.u = r.u.topRows(m).eval();
        return r;
    }
    Eigen::MatrixXd q, rr;
    qr_reduce_real(a, q, rr);
    RealSvdResult r = svd_real_square(rr);
    r.u = q * r.u;
    return r;
}

Eigen::VectorXd singular_values(const Matrix& a) {
    Matrix reduced;
    if (a.rows() > a.cols()) {
        Matrix q;
        qr_reduce(a, q, reduced);
    } else if (a.rows() < a.cols()) {
        Matrix q;
        qr_reduce(a.adjoint(), q, reduced);
    } else {
        reduced = a;
    }
    const auto n = static_cast<lapack_int>(reduced.rows());
    Eigen::VectorXd sigma(n);
    const lapack_int info = LAPACKE_zgesdd(
        LAPACK_COL_MAJOR, 'N', n, n, reinterpret_cast<lapack_complex_double*>(reduced.data()), n,
        sigma.data(), nullptr, 1, nullptr, 1);
    if (info != 0) {
        throw numerical_error("singular_values: zgesdd failed with info " + std::to_string(info));
    }
    return sigma;
}

int svd_rank(const Eigen::VectorXd& sigma, double rtol) {
    if (sigma.size() == 0) return 0;
    const double cut = rtol * sigma(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cut) ++rank;
    }
    return rank;
}

Matrix right_nullspace(const Matrix& a, double rtol) {
    SvdResult r = svd(a);
    const int rank = svd_rank(r.sigma, rtol);
    const auto n = a.cols();
    return r.v.rightCols(n - rank);
}

Matrix orthonormal_columns(const Matrix& a, double rtol) {
    SvdResult r = svd(a);
    return r.u.leftCols(svd_rank(r.sigma, rtol));
}

double subspace_angle_sin(const Matrix& a, const Matrix& b) {
    Matrix qa = orthonormal_columns(a, 1e-12);
    Matrix qb = orthonormal_columns(b, 1e-12);
    if (qa.cols() != qb.cols()) return 1.0;
    if (qa.cols() == 0) return 0.0;
    // Residual of b's basis after projecting onto span(a); its largest
    // singular value is sin(theta_max).
    Matrix resid = qb - qa * (qa.adjoint() * qb);
    return singular_values(resid)(0);
}

std::vector<Matrix> hermitian_matrix_basis(const std::vector<Matrix>& raw, const char* what) {
    const int d = static_cast<int>(raw.size());
    if (d == 0) return {};
    const int n = static_cast<int>(raw[0].rows());
    const int n2 = n * n;

    // Hermitian matrices form a real vector space; represent the candidates
    // (B+B†)/2 and (B−B†)/2i by the re/im parts of their vectorizations.
    Eigen::MatrixXd cand(2 * n2, 2 * d);
    for (int k = 0; k < d; ++k) {
        const Matrix h = 0.5 * (raw[k] + raw[k].adjoint());
        const Matrix a = Complex(0.0, -0.5) * (raw[k] - raw[k].adjoint());
        const Vector vh = vectorize_matrix(h), va = vectorize_matrix(a);
        cand.col(2 * k) << vh.real(), vh.imag();
        cand.col(2 * k + 1) << va.real(), va.imag();
    }
    const RealSvdResult svd = svd_real(cand);
    const double smax = svd.sigma(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.sigma.size(); ++i) {
        if (svd.sigma(i) > 1e-9 * smax) ++rank;
    }
    if (rank != d) {
        throw numerical_error(std::string(what) + ": span is not dagger-closed within tolerance (" +
                              std::to_string(rank) + " Hermitian directions for dimension " +
                              std::to_string(d) + ")");
    }

    std::vector<Matrix> out;
    out.reserve(d);
    for (int k = 0; k < d; ++k) {
        Vector v(n2);
        for (int i = 0; i < n2; ++i) v(i) = Complex(svd.u(i, k), svd.u(n2 + i, k));
        Matrix m = devectorize_matrix(v);
        m = 0.5 * (m + m.adjoint());  // strip rounding in the anti-Hermitian part
        m /= m.norm();
        out.push_back(std::move(m));
    }

    // The Hermitian basis must reproduce the original span.
    for (const Matrix& b : raw) {
        Matrix resid = b;
        for (const Matrix& m : out) resid -= (m.adjoint() * b).trace() * m;
        if (resid.norm() > 1e-8 * std::max(1.0, b.norm())) {
            throw numerical_error(std::string(what) +
                                  ": Hermitian repair changed the span, residual " +
                                  std::to_string(resid.norm()));
        }
    }
    return out;
}

namespace {

struct BasisKey {
    double diag_weight;
    int peak_index;
};

BasisKey key_of(const Matrix& m) {
    BasisKey k{m.diagonal().norm(), 0};
    double best = -1.0;
    const int n = static_cast<int>(m.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = std::abs(m(i, j));
            if (v > best + 1e-12) {
                best = v;
                k.peak_index = i * n + j;
            }
        }
    return k;
}

}  // namespace

void sort_and_sign_fix(std::vector<Matrix>& basis) {
    std::stable_sort(basis.begin(), basis.end(), [&](const Matrix& a, const Matrix& b) {
        const BasisKey ka = key_of(a), kb = key_of(b);
        if (std::abs(ka.diag_weight - kb.diag_weight) > 1e-9) {
            return ka.diag_weight > kb.diag_weight;
        }
        return ka.peak_index < kb.peak_index;
    });
    for (Matrix& m : basis) {
        const BasisKey k = key_of(m);
        const int n = static_cast<int>(m.rows());
        const Complex peak = m(k.peak_index / n, k.peak_index % n);
        const double score =
            std::abs(peak.real()) >= std::abs(peak.imag()) ? peak.real() : peak.imag();
        if (score < 0.0) m = -m;
    }
}

bool grow_span(Matrix& span, Vector v, double tol) {
    if (span.cols() > 0) {
        v -= span * (span.adjoint() * v);
        v -= span * (span.adjoint() * v);  // second pass against rounding
    }
    const double n = v.norm();
    if (n < tol) return false;
    span.conservativeResize(v.size(), span.cols() + 1);
    span.col(span.cols() - 1) = v / n;
    return true;
}

}  // namespace lindblad::detail
