// models.hpp — Catalog of worked master-equation examples with closed-form
// steady bases and conserved quantities, used as exact oracles.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lindblad/liouvillian.hpp"
#include "lindblad/operator_core.hpp"

namespace lindblad::models {

struct CatalogEntry {
    Model model;
    std::vector<Operator> analytic_steady;     // {M_μ} (row-major in μν for the 2-index families)
    std::vector<Operator> analytic_conserved;  // {J_μ} paired index-by-index with the steady list
    std::vector<std::string> notes;
};

// Single qubit, F = Z: two pointer states, J_μ = M_μ = |μ⟩⟨μ|.
CatalogEntry dephasing();

// Two qubits, F = ½(I−Z₁Z₂)X₂: a two-dimensional decoherence-free subspace
// spanned by the odd-parity Bell states. Order: M_00, M_01, M_10, M_11.
CatalogEntry two_qubit();

// Adds H = ωX₂; steady basis deforms to M̄_μν with ζ = √(2ω⁴+4ω²+1) and the
// conserved quantities rescale to J̄ = ζ/(2ω²+1)·J.
CatalogEntry driven_two_qubit(double omega);

// The unitary ½[I + Z₁(X₂−I) + X₂] that factors the driven steady basis into
// |μ⟩⟨ν| ⊗ T with T = (1/ζ)[[1+ω², iω],[−iω, ω²]] on qubit 2.
Operator driven_two_qubit_factorizer();
Matrix driven_two_qubit_factor(double omega);  // the 2×2 matrix T above (hs-unit norm)

// Fock space truncated at `dim`, F = a^d. Steady M_μν = |μ⟩⟨ν| for μ,ν < d;
// conserved J_μν = j_μν(n̂)/√((ν)_{ν−μ})·Π_μ a^{ν−μ}. Requires dim > d² + d.
// Order: (μ,ν) row-major.
CatalogEntry d_photon(int d, int dim);

// Π_μ = Σ_n |dn+μ⟩⟨dn+μ| on the truncated Fock space.
Operator photon_sector_projector(int d, int mu, int dim);

// The scalar j_μν(q) of the conserved-quantity product formula (q ≡ μ mod d).
double d_photon_j(int d, int mu, int nu, int q);

// Zero out rows and columns within `margin` of the Fock cutoff; conservation
// of the truncated analytic J is checked on this interior block.
Operator interior_project(const Operator& a, int margin);

// Steady-state coefficient matrix ρ_μν reached from a coherent state |α⟩
// under d-photon absorption, by direct series summation.
Matrix coherent_steady(int d, Complex alpha);

// Closed DFT form for the diagonal ρ_μμ, used as an independent cross-check.
double coherent_steady_diagonal_dft(int d, Complex alpha, int mu);

// Truncated, renormalized coherent state; tail_mass reports the dropped
// probability before renormalization.
DensityMatrix coherent_state(int dim, Complex alpha, double* tail_mass = nullptr);

// Exact integer combinatorics (overflow-checked); negative arguments throw.
std::int64_t double_factorial(int m);
std::int64_t falling_factorial(std::int64_t x, int n);
double falling_factorial_real(double x, int n);

}  // namespace lindblad::models
