// operator_core.hpp — Hilbert-space bookkeeping, dense complex operator algebra,
// and the row-stacking vectorization between operator space and Liouville space.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "lindblad/errors.hpp"

namespace lindblad {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class FactorKind { qubit, fock };

struct Factor {
    FactorKind kind;
    int dim;

    bool operator==(const Factor&) const = default;
};

// Ordered tensor product of qubit/Fock factors. Factor 0 is the most
// significant index: a basis state of kron(A, B) is |a⟩|b⟩ ↦ a·dim(B) + b.
class HilbertSpace {
public:
    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<Factor> factors);

    static HilbertSpace qubits(int count);
    static HilbertSpace fock(int dim);

    int dim() const { return dim_; }
    int factor_count() const { return static_cast<int>(factors_.size()); }
    const Factor& factor(int site) const;
    const std::vector<Factor>& factors() const { return factors_; }

    bool operator==(const HilbertSpace&) const = default;

private:
    std::vector<Factor> factors_;
    int dim_ = 0;
};

// Dense N×N complex matrix tagged with the space it acts on.
struct Operator {
    HilbertSpace space;
    Matrix mat;

    Operator() = default;
    Operator(HilbertSpace s, Matrix m);

    int dim() const { return space.dim(); }
    Operator dagger() const { return {space, mat.adjoint()}; }
    Complex trace() const { return mat.trace(); }
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator-(const Operator& a);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex c, const Operator& a);
Operator operator*(double c, const Operator& a);

// a^k by repeated left-to-right multiplication, k ≥ 0.
Operator pow(const Operator& a, int k);
Operator commutator(const Operator& a, const Operator& b);

// N²-component vector living in Liouville space.
struct SuperVector {
    HilbertSpace space;
    Vector vec;
};

// Row-stacking: element (i,j) of A lands at index i·N + j. Under this
// convention vec(AXB) = (A ⊗ Bᵀ)·vec(X), so F·ρ·F† ↦ (F ⊗ F*)|ρ⟩⟩.
SuperVector vectorize(const Operator& a);
Operator devectorize(const SuperVector& v);
Vector vectorize_matrix(const Matrix& a);
Matrix devectorize_matrix(const Vector& v);

// Hilbert-Schmidt inner product Tr{A†B}.
Complex hs_inner(const Operator& a, const Operator& b);
double hs_norm(const Operator& a);

Matrix kron_matrix(const Matrix& a, const Matrix& b);
Operator kron(const Operator& a, const Operator& b);

// Pad `local` with identities on every other factor of `space` (site 0-based).
Operator embed(int site, const Operator& local, const HilbertSpace& space);

// Truncated Fock-space lowering operator, a|n⟩ = √n|n−1⟩.
Operator annihilation(int dim);
Operator number_operator(int dim);

// Trace over all factors not listed in `keep` (0-based, strictly increasing).
Operator partial_trace(const Operator& a, const std::vector<int>& keep);

Operator identity(const HilbertSpace& space);
Operator zero(const HilbertSpace& space);
Operator matrix_unit(const HilbertSpace& space, int i, int j);

// Single-qubit primitives on HilbertSpace::qubits(1), Z|0⟩ = +|0⟩.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator sigma_plus();   // |0⟩⟨1| = (X + iY)/2
Operator sigma_minus();

double max_abs(const Matrix& a);
double max_abs(const Operator& a);
bool is_hermitian(const Matrix& a, double tol);

// ½‖a − b‖₁ (nuclear norm of the difference).
double trace_distance(const Operator& a, const Operator& b);

struct DensityTolerances {
    double hermiticity = 1e-12;
    double trace = 1e-12;
    double min_eigenvalue = -1e-10;
};

// Operator validated as a physical state: Hermitian, unit trace, PSD.
struct DensityMatrix {
    Operator op;

    static DensityMatrix from_operator(Operator rho, const DensityTolerances& tol = {});
    static DensityMatrix pure(const HilbertSpace& space, const Vector& ket);
    static DensityMatrix maximally_mixed(const HilbertSpace& space);

    int dim() const { return op.dim(); }
};

}  // namespace lindblad
