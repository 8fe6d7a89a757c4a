// liouvillian.cpp — Generator assembly and spectrum

#include "lindblad/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace lindblad {

namespace {

constexpr double kHermiticityTol = 1e-10;
constexpr Complex kImag{0.0, 1.0};

}  // namespace

Model::Model(std::string name_, HilbertSpace space_, Operator hamiltonian_,
             std::vector<Operator> jumps_)
    : name(std::move(name_)),
      space(std::move(space_)),
      hamiltonian(std::move(hamiltonian_)),
      jumps(std::move(jumps_)) {
    if (!(hamiltonian.space == space)) {
        throw model_error("Model '" + name + "': Hamiltonian lives on a different space");
    }
    for (std::size_t l = 0; l < jumps.size(); ++l) {
        if (!(jumps[l].space == space)) {
            throw model_error("Model '" + name + "': jump operator " + std::to_string(l) +
                              " lives on a different space");
        }
    }
    const double herm = max_abs(Matrix(hamiltonian.mat - hamiltonian.mat.adjoint()));
    if (herm >= kHermiticityTol) {
        throw model_error("Model '" + name + "': Hamiltonian not Hermitian, deviation " +
                          std::to_string(herm));
    }
}

Liouvillian::Liouvillian(Model model) : model_(std::move(model)) {}

int Liouvillian::liouville_dim() const {
    const int n = model_.space.dim();
    return n * n;
}

const Matrix& Liouvillian::matrix() const {
    if (!matrix_) {
        const int n = model_.space.dim();
        const Matrix id = Matrix::Identity(n, n);
        const Matrix& h = model_.hamiltonian.mat;
        Matrix l = -kImag * (kron_matrix(h, id) - kron_matrix(id, h.transpose()));
        for (const Operator& f : model_.jumps) {
            const Matrix fdf = f.mat.adjoint() * f.mat;
            l += 2.0 * kron_matrix(f.mat, f.mat.conjugate());
            l -= kron_matrix(fdf, id);
            l -= kron_matrix(id, fdf.transpose());
        }
        matrix_ = std::make_shared<const Matrix>(std::move(l));
    }
    return *matrix_;
}

const Matrix& Liouvillian::adjoint_matrix() const {
    if (!adjoint_) {
        adjoint_ = std::make_shared<const Matrix>(build_adjoint(model_));
    }
    return *adjoint_;
}

Liouvillian build_liouvillian(Model model) { return Liouvillian(std::move(model)); }

Matrix build_adjoint(const Model& model) {
    const int n = model.space.dim();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix& h = model.hamiltonian.mat;
    Matrix l = kImag * (kron_matrix(h, id) - kron_matrix(id, h.transpose()));
    for (const Operator& f : model.jumps) {
        const Matrix fd = f.mat.adjoint();
        const Matrix fdf = fd * f.mat;
        l += 2.0 * kron_matrix(fd, f.mat.transpose());
        l -= kron_matrix(fdf, id);
        l -= kron_matrix(id, fdf.transpose());
    }
    return l;
}

Operator apply(const Liouvillian& liouvillian, const Operator& rho) {
    if (!(rho.space == liouvillian.space())) {
        throw model_error("apply: state lives on a different space");
    }
    return devectorize({rho.space, liouvillian.matrix() * vectorize_matrix(rho.mat)});
}

Operator apply_direct(const Model& model, const Operator& rho) {
    if (!(rho.space == model.space)) {
        throw model_error("apply_direct: state lives on a different space");
    }
    Matrix out = -kImag * (model.hamiltonian.mat * rho.mat - rho.mat * model.hamiltonian.mat);
    for (const Operator& f : model.jumps) {
        const Matrix fd = f.mat.adjoint();
        const Matrix fdf = fd * f.mat;
        out += 2.0 * f.mat * rho.mat * fd;
        out -= fdf * rho.mat;
        out -= rho.mat * fdf;
    }
    return {rho.space, std::move(out)};
}

Operator heisenberg_apply_direct(const Model& model, const Operator& x) {
    if (!(x.space == model.space)) {
        throw model_error("heisenberg_apply_direct: observable lives on a different space");
    }
    Matrix out = kImag * (model.hamiltonian.mat * x.mat - x.mat * model.hamiltonian.mat);
    for (const Operator& f : model.jumps) {
        const Matrix fd = f.mat.adjoint();
        const Matrix fdf = fd * f.mat;
        out += 2.0 * fd * x.mat * f.mat;
        out -= fdf * x.mat;
        out -= x.mat * fdf;
    }
    return {x.space, std::move(out)};
}

double default_zero_tolerance(const Matrix& liouvillian_matrix) {
    return 1e-9 * std::max(1.0, max_abs(liouvillian_matrix));
}

namespace {

bool spectral_order(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
}

}  // namespace

Spectrum spectrum(const Liouvillian& liouvillian, double tol_real) {
    const Matrix& lm = liouvillian.matrix();
    const int n = static_cast<int>(lm.rows());
    const double tol = tol_real > 0.0 ? tol_real : default_zero_tolerance(lm);

    Eigen::ComplexEigenSolver<Matrix> right_solver(lm, true);
    if (right_solver.info() != Eigen::Success) {
        throw numerical_error("spectrum: eigendecomposition of the Liouvillian failed");
    }
    Eigen::ComplexEigenSolver<Matrix> left_solver(liouvillian.adjoint_matrix(), true);
    if (left_solver.info() != Eigen::Success) {
        throw numerical_error("spectrum: eigendecomposition of the adjoint failed");
    }
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(right_solver.eigenvalues()(i).real()) ||
            !std::isfinite(right_solver.eigenvalues()(i).imag())) {
            throw numerical_error("spectrum: non-finite eigenvalue from the solver");
        }
    }

    std::vector<int> right_order(n), left_order(n);
    for (int i = 0; i < n; ++i) right_order[i] = left_order[i] = i;
    std::sort(right_order.begin(), right_order.end(), [&](int a, int b) {
        return spectral_order(right_solver.eigenvalues()(a), right_solver.eigenvalues()(b));
    });
    // Sorting adjoint eigenvalues by the same key applied to their conjugates
    // aligns the two multisets index by index.
    std::sort(left_order.begin(), left_order.end(), [&](int a, int b) {
        return spectral_order(std::conj(left_solver.eigenvalues()(a)),
                              std::conj(left_solver.eigenvalues()(b)));
    });

    Spectrum s;
    s.space = liouvillian.space();
    s.zero_tolerance = tol;
    s.matrix_scale = max_abs(lm);
    s.eigenvalues.resize(n);
    s.right.resize(n, n);
    s.left.resize(n, n);
    s.pair_residual.resize(n);
    for (int k = 0; k < n; ++k) {
        s.eigenvalues[k] = right_solver.eigenvalues()(right_order[k]);
        s.right.col(k) = right_solver.eigenvectors().col(right_order[k]);
        s.left.col(k) = left_solver.eigenvectors().col(left_order[k]);
        s.pair_residual(k) =
            std::abs(std::conj(s.eigenvalues[k]) - left_solver.eigenvalues()(left_order[k]));
    }
    const Matrix lv = lm * s.right;
    s.eig_residual.resize(n);
    for (int k = 0; k < n; ++k) {
        s.eig_residual(k) = (lv.col(k) - s.eigenvalues[k] * s.right.col(k)).norm();
    }
    s.gap = dissipation_gap(s);
    return s;
}

double dissipation_gap(const Spectrum& s) {
    double gap = kInfiniteGap;
    for (const Complex& ev : s.eigenvalues) {
        if (ev.real() < -s.zero_tolerance) gap = std::min(gap, std::abs(ev.real()));
    }
    return gap;
}

}  // namespace lindblad
