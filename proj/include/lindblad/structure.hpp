// structure.hpp — Symmetry classification, conserved-projector partitioning of
// Liouville space, and discovery of the block ⊕_κ [n_κ ⊗ T^(κ)] structure.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lindblad/asymptotics.hpp"
#include "lindblad/liouvillian.hpp"
#include "lindblad/operator_core.hpp"

namespace lindblad {

struct SymmetryReport {
    Operator candidate;
    bool strong = false;
    bool weak = false;
    bool conserved = false;
    std::vector<std::pair<std::string, double>> residuals;
};

// conserved ⇔ ‖L†(A)‖ small relative to the generator scale.
bool check_conserved(const Operator& a, const Liouvillian& liouvillian, double tol = 1e-9);

// strong ⇔ A commutes with H and with every jump operator.
bool check_strong_symmetry(const Operator& a, const Model& model, double tol = 1e-9);

// weak ⇔ the generator Â = A⊗I − I⊗A* commutes with L̂.
bool check_weak_symmetry(const Operator& a, const Liouvillian& liouvillian, double tol = 1e-9);

SymmetryReport classify_symmetry(const Operator& a, const Liouvillian& liouvillian,
                                 double tol = 1e-9);

// Basis of {A : [Â, L̂] = 0} from the nullspace of the map A ↦ [Â, L̂].
// Guarded to N ≤ 16; always contains the identity.
std::vector<Operator> find_symmetry_generators(const Liouvillian& liouvillian, double rtol = 1e-7);

// One independently evolving subspace Π_μ·ρ·Π_ν of Liouville space. The
// coefficient frame is the orthonormal family u_i v_j† built from range bases
// of the two projectors; sub_liouvillian acts on row-stacked coefficients.
struct Sector {
    int mu = 0;
    int nu = 0;
    Matrix row_basis;        // N × rank(Π_mu)
    Matrix col_basis;        // N × rank(Π_nu)
    Matrix sub_liouvillian;  // (d_mu·d_nu) × (d_mu·d_nu)
};

struct ParityPartition {
    std::vector<Operator> projectors;
    std::vector<Sector> sectors;  // row-major in (mu, nu)
    double max_cross_coupling = 0.0;

    const Sector& sector(int mu, int nu) const;
};

// Requires the projectors to be Hermitian, idempotent, mutually orthogonal,
// conserved, and summing to the identity; violations are reported one by one.
// Built from operator products only — the full L̂ is never materialized.
ParityPartition parity_partition(const std::vector<Operator>& projectors,
                                 const Liouvillian& liouvillian, double tol = 1e-9);

Matrix sector_compress(const Sector& sector, const Operator& x);
Operator sector_decompress(const Sector& sector, const Matrix& coefficients,
                           const HilbertSpace& space);

// One block of the limit set: basis column μ·m + a is |μ⟩⊗|a⟩ of the hidden
// n ⊗ m tensor structure; the factor state is diagonal (descending) in its
// own frame and has unit trace.
struct Block {
    int n = 0;
    int m = 0;
    Matrix basis;                  // N × (n·m), orthonormal columns
    Matrix factor_state;           // m × m
    std::vector<double> energies;  // E_μ, gauge min E = 0; zeros until extracted
};

struct BlockStructure {
    std::vector<Block> blocks;
    int support_dim = 0;
    double reconstruction_residual = 0.0;
};

struct BlockOptions {
    unsigned seed = 0x1db7ad;
    double support_rtol = 1e-10;  // support of the maximal steady state
    double span_tol = 1e-8;       // closure span growth threshold
    int max_retries = 8;          // probe reseeds on eigenvalue collisions
};

// Decomposes the limit set via the dagger-closed algebra generated by the
// support compressions of the conserved quantities (and rotating duals).
BlockStructure block_structure(const AsymptoticDecomposition& dec, const Liouvillian& liouvillian,
                               const BlockOptions& opts = {});

// Coefficient matrix of x in block coordinates: x ≈ basis·(A ⊗ T)·basis†.
Matrix block_coefficients(const Block& block, const Operator& x);

// Solves λ_μν = E_ν − E_μ per block from the rotating frequencies, gauge
// min_μ E_μ = 0. Throws when the difference system is inconsistent.
std::vector<std::vector<double>> extract_rotation_hamiltonian(
    const std::vector<RotatingPair>& rotating, BlockStructure& blocks, double tol = 1e-8);

// True iff U†M_μU stays in span{M} for every steady basis element.
bool subspace_symmetry_check(const Operator& u, const AsymptoticDecomposition& dec,
                             double tol = 1e-8);

}  // namespace lindblad
