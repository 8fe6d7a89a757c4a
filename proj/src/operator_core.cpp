// operator_core.cpp — Implementation of the dense operator algebra layer

#include "lindblad/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lindblad/linalg.hpp"

namespace lindblad {

HilbertSpace::HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) {
        throw model_error("HilbertSpace: at least one factor required");
    }
    long long n = 1;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Factor& f = factors_[i];
        if (f.kind == FactorKind::qubit && f.dim != 2) {
            throw model_error("HilbertSpace: qubit factor " + std::to_string(i) + " must have dim 2");
        }
        if (f.kind == FactorKind::fock && f.dim < 2) {
            throw model_error("HilbertSpace: fock factor " + std::to_string(i) + " must have dim >= 2");
        }
        n *= f.dim;
        if (n > (1 << 20)) {
            throw model_error("HilbertSpace: total dimension too large");
        }
    }
    dim_ = static_cast<int>(n);
    if (dim_ < 2) {
        throw model_error("HilbertSpace: total dimension must be >= 2");
    }
}

HilbertSpace HilbertSpace::qubits(int count) {
    if (count < 1) throw model_error("HilbertSpace::qubits: count must be positive");
    return HilbertSpace(std::vector<Factor>(count, Factor{FactorKind::qubit, 2}));
}

HilbertSpace HilbertSpace::fock(int dim) {
    return HilbertSpace({Factor{FactorKind::fock, dim}});
}

const Factor& HilbertSpace::factor(int site) const {
    if (site < 0 || site >= factor_count()) {
        throw model_error("HilbertSpace: factor index " + std::to_string(site) + " out of range");
    }
    return factors_[static_cast<std::size_t>(site)];
}

Operator::Operator(HilbertSpace s, Matrix m) : space(std::move(s)), mat(std::move(m)) {
    if (mat.rows() != space.dim() || mat.cols() != space.dim()) {
        throw model_error("Operator: matrix is " + std::to_string(mat.rows()) + "x" +
                          std::to_string(mat.cols()) + " but space has dim " +
                          std::to_string(space.dim()));
    }
}

namespace {

void require_same_space(const Operator& a, const Operator& b, const char* what) {
    if (!(a.space == b.space)) {
        throw model_error(std::string(what) + ": operators live on different spaces");
    }
}

}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a, b, "operator+");
    return {a.space, a.mat + b.mat};
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a, b, "operator-");
    return {a.space, a.mat - b.mat};
}

Operator operator-(const Operator& a) { return {a.space, -a.mat}; }

Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a, b, "operator*");
    return {a.space, a.mat * b.mat};
}

Operator operator*(Complex c, const Operator& a) { return {a.space, c * a.mat}; }
Operator operator*(double c, const Operator& a) { return {a.space, c * a.mat}; }

Operator pow(const Operator& a, int k) {
    if (k < 0) throw model_error("pow: exponent must be nonnegative");
    Operator r = identity(a.space);
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Vector vectorize_matrix(const Matrix& a) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    Vector v(rows * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) v(i * cols + j) = a(i, j);
    return v;
}

Matrix devectorize_matrix(const Vector& v) {
    const int n2 = static_cast<int>(v.size());
    const int n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n2))));
    if (n * n != n2) throw model_error("devectorize: length is not a perfect square");
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = v(i * n + j);
    return a;
}

SuperVector vectorize(const Operator& a) { return {a.space, vectorize_matrix(a.mat)}; }

Operator devectorize(const SuperVector& v) {
    Matrix a = devectorize_matrix(v.vec);
    if (a.rows() != v.space.dim()) {
        throw model_error("devectorize: vector length does not match space dimension");
    }
    return {v.space, std::move(a)};
}

Complex hs_inner(const Operator& a, const Operator& b) {
    require_same_space(a, b, "hs_inner");
    return (a.mat.adjoint() * b.mat).trace();
}

double hs_norm(const Operator& a) { return a.mat.norm(); }

Matrix kron_matrix(const Matrix& a, const Matrix& b) {
    const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    Matrix out(ar * br, ac * bc);
    for (Eigen::Index i = 0; i < ar; ++i)
        for (Eigen::Index j = 0; j < ac; ++j) out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    return out;
}

Operator kron(const Operator& a, const Operator& b) {
    std::vector<Factor> factors = a.space.factors();
    const auto& bf = b.space.factors();
    factors.insert(factors.end(), bf.begin(), bf.end());
    return {HilbertSpace(std::move(factors)), kron_matrix(a.mat, b.mat)};
}

Operator embed(int site, const Operator& local, const HilbertSpace& space) {
    if (site < 0 || site >= space.factor_count()) {
        throw model_error("embed: site " + std::to_string(site) + " out of range");
    }
    if (local.dim() != space.factor(site).dim) {
        throw model_error("embed: local operator dim " + std::to_string(local.dim()) +
                          " does not match factor dim " + std::to_string(space.factor(site).dim));
    }
    Matrix m = Matrix::Identity(1, 1);
    for (int s = 0; s < space.factor_count(); ++s) {
        const int d = space.factor(s).dim;
        m = kron_matrix(m, s == site ? local.mat : Matrix(Matrix::Identity(d, d)));
    }
    return {space, std::move(m)};
}

Operator annihilation(int dim) {
    if (dim < 2) throw model_error("annihilation: dim must be >= 2");
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {HilbertSpace::fock(dim), std::move(a)};
}

Operator number_operator(int dim) {
    if (dim < 2) throw model_error("number_operator: dim must be >= 2");
    Matrix n = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return {HilbertSpace::fock(dim), std::move(n)};
}

Operator partial_trace(const Operator& a, const std::vector<int>& keep) {
    if (keep.empty()) throw model_error("partial_trace: keep set must be nonempty");
    const int f = a.space.factor_count();
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= f) throw model_error("partial_trace: keep index out of range");
        if (i > 0 && keep[i] <= keep[i - 1]) {
            throw model_error("partial_trace: keep indices must be strictly increasing");
        }
    }

    std::vector<int> dims(f);
    for (int s = 0; s < f; ++s) dims[s] = a.space.factor(s).dim;
    std::vector<bool> kept(f, false);
    for (int s : keep) kept[s] = true;

    std::vector<Factor> out_factors;
    int dk = 1, dt = 1;
    for (int s = 0; s < f; ++s) {
        if (kept[s]) {
            out_factors.push_back(a.space.factor(s));
            dk *= dims[s];
        } else {
            dt *= dims[s];
        }
    }

    // Strides of each factor in the full index, then separate strides for the
    // kept and traced sub-indices.
    std::vector<int> stride(f, 1);
    for (int s = f - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

    auto full_index = [&](int ik, int it) {
        int idx = 0, rk = ik, rt = it;
        // Decompose kept/traced multi-indices factor by factor (most significant first).
        int wk = dk, wt = dt;
        for (int s = 0; s < f; ++s) {
            if (kept[s]) {
                wk /= dims[s];
                idx += (rk / wk) * stride[s];
                rk %= wk;
            } else {
                wt /= dims[s];
                idx += (rt / wt) * stride[s];
                rt %= wt;
            }
        }
        return idx;
    };

    Matrix out = Matrix::Zero(dk, dk);
    for (int i = 0; i < dk; ++i)
        for (int j = 0; j < dk; ++j) {
            Complex sum = 0.0;
            for (int t = 0; t < dt; ++t) sum += a.mat(full_index(i, t), full_index(j, t));
            out(i, j) = sum;
        }
    HilbertSpace out_space = (out_factors.size() == static_cast<std::size_t>(f))
                                 ? a.space
                                 : HilbertSpace(std::move(out_factors));
    return {std::move(out_space), std::move(out)};
}

Operator identity(const HilbertSpace& space) {
    return {space, Matrix::Identity(space.dim(), space.dim())};
}

Operator zero(const HilbertSpace& space) {
    return {space, Matrix::Zero(space.dim(), space.dim())};
}

Operator matrix_unit(const HilbertSpace& space, int i, int j) {
    const int n = space.dim();
    if (i < 0 || i >= n || j < 0 || j >= n) throw model_error("matrix_unit: index out of range");
    Matrix m = Matrix::Zero(n, n);
    m(i, j) = 1.0;
    return {space, std::move(m)};
}

namespace {

Operator single_qubit(std::initializer_list<Complex> entries) {
    Matrix m(2, 2);
    auto it = entries.begin();
    m(0, 0) = *it++;
    m(0, 1) = *it++;
    m(1, 0) = *it++;
    m(1, 1) = *it;
    return {HilbertSpace::qubits(1), std::move(m)};
}

}  // namespace

Operator pauli_x() { return single_qubit({0, 1, 1, 0}); }
Operator pauli_y() { return single_qubit({0, Complex(0, -1), Complex(0, 1), 0}); }
Operator pauli_z() { return single_qubit({1, 0, 0, -1}); }
Operator sigma_plus() { return single_qubit({0, 1, 0, 0}); }
Operator sigma_minus() { return single_qubit({0, 0, 1, 0}); }

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
double max_abs(const Operator& a) { return max_abs(a.mat); }

bool is_hermitian(const Matrix& a, double tol) {
    return max_abs(Matrix(a - a.adjoint())) < tol;
}

double trace_distance(const Operator& a, const Operator& b) {
    require_same_space(a, b, "trace_distance");
    return 0.5 * detail::singular_values(a.mat - b.mat).sum();
}

DensityMatrix DensityMatrix::from_operator(Operator rho, const DensityTolerances& tol) {
    const double herm = max_abs(Matrix(rho.mat - rho.mat.adjoint()));
    if (herm >= tol.hermiticity) {
        throw numerical_error("DensityMatrix: not Hermitian, max deviation " + std::to_string(herm));
    }
    const double trdev = std::abs(rho.mat.trace() - Complex(1.0));
    if (trdev >= tol.trace) {
        throw numerical_error("DensityMatrix: trace deviates from 1 by " + std::to_string(trdev));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho.mat + rho.mat.adjoint()),
                                             Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin <= tol.min_eigenvalue) {
        throw numerical_error("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
    }
    return DensityMatrix{std::move(rho)};
}

DensityMatrix DensityMatrix::pure(const HilbertSpace& space, const Vector& ket) {
    if (ket.size() != space.dim()) throw model_error("DensityMatrix::pure: ket length mismatch");
    const double n = ket.norm();
    if (n == 0.0) throw model_error("DensityMatrix::pure: zero ket");
    Vector k = ket / n;
    return DensityMatrix{Operator{space, k * k.adjoint()}};
}

DensityMatrix DensityMatrix::maximally_mixed(const HilbertSpace& space) {
    const int n = space.dim();
    return DensityMatrix{Operator{space, Matrix::Identity(n, n) / static_cast<double>(n)}};
}

}  // namespace lindblad
