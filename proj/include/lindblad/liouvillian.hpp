// liouvillian.hpp — Lindblad generator as a Liouville-space matrix, its
// Heisenberg-picture adjoint, and the non-Hermitian spectrum.

#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "lindblad/operator_core.hpp"

namespace lindblad {

// Hamiltonian plus jump operators. Jump operators carry their rates inside
// themselves (F ← √γ F), matching the rate-free generator with prefactor 2:
//   L(ρ) = −i[H,ρ] + Σ_l 2 F_l ρ F_l† − F_l†F_l ρ − ρ F_l†F_l.
struct Model {
    std::string name;
    HilbertSpace space;
    Operator hamiltonian;
    std::vector<Operator> jumps;

    Model(std::string name, HilbertSpace space, Operator hamiltonian, std::vector<Operator> jumps);
};

// The generator as an N²×N² matrix on row-stacked density matrices:
//   L̂ = −i(H⊗I − I⊗Hᵀ) + Σ_l 2 F_l⊗F_l* − F_l†F_l⊗I − I⊗(F_l†F_l)ᵀ.
// The matrix is materialized lazily; sector-reduced workflows never touch it.
class Liouvillian {
public:
    explicit Liouvillian(Model model);

    const Model& model() const { return model_; }
    const HilbertSpace& space() const { return model_.space; }
    int liouville_dim() const;

    const Matrix& matrix() const;
    const Matrix& adjoint_matrix() const;

private:
    Model model_;
    mutable std::shared_ptr<const Matrix> matrix_;
    mutable std::shared_ptr<const Matrix> adjoint_;
};

Liouvillian build_liouvillian(Model model);

// Adjoint (Heisenberg) superoperator matrix for
//   L†(J) = i[H,J] + Σ_l 2 F_l†JF_l − F_l†F_l J − J F_l†F_l.
Matrix build_adjoint(const Model& model);

// devectorize(L̂ · vectorize(rho)).
Operator apply(const Liouvillian& liouvillian, const Operator& rho);

// Same maps evaluated by operator products, never materializing L̂.
Operator apply_direct(const Model& model, const Operator& rho);
Operator heisenberg_apply_direct(const Model& model, const Operator& x);

// Default zero-eigenvalue threshold, 1e-9·max(1, ‖L̂‖_max).
double default_zero_tolerance(const Matrix& liouvillian_matrix);

constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

// Full non-Hermitian eigendecomposition. Eigenvalues sorted by
// (Re descending, Im ascending); column k of `right` is the eigenvector for
// eigenvalues[k]; column k of `left` is the adjoint-matrix eigenvector paired
// to conj(eigenvalues[k]), with the pairing distance in pair_residual.
struct Spectrum {
    HilbertSpace space;
    std::vector<Complex> eigenvalues;
    Matrix right;
    Matrix left;
    Eigen::VectorXd pair_residual;
    Eigen::VectorXd eig_residual;  // ‖L̂v − λv‖ per unit right eigenvector
    double matrix_scale = 0.0;     // ‖L̂‖_max
    double zero_tolerance = 0.0;
    double gap = kInfiniteGap;
};

Spectrum spectrum(const Liouvillian& liouvillian, double tol_real = -1.0);

// Δ = min |Re λ| over eigenvalues with Re λ < −tol; +inf if none decay.
double dissipation_gap(const Spectrum& s);

}  // namespace lindblad
