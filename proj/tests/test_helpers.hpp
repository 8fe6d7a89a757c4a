// test_helpers.hpp — Seeded generators and independent Lindblad oracles

#pragma once

#include <random>

#include "lindblad/liouvillian.hpp"
#include "lindblad/operator_core.hpp"

namespace lindblad::testing {

inline Matrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

inline Operator random_operator(const HilbertSpace& space, std::mt19937_64& rng) {
    return {space, random_matrix(rng, space.dim())};
}

inline Operator random_hermitian(const HilbertSpace& space, std::mt19937_64& rng) {
    Matrix m = random_matrix(rng, space.dim());
    return {space, Matrix(0.5 * (m + m.adjoint()))};
}

inline DensityMatrix random_density(const HilbertSpace& space, std::mt19937_64& rng) {
    const Matrix g = random_matrix(rng, space.dim());
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix{Operator{space, std::move(rho)}};
}

// Independent right-hand side oracle, evaluated term by term from the
// equation of motion rather than through the superoperator matrix.
inline Operator lindblad_rhs_oracle(const Model& model, const Operator& rho) {
    const Complex im{0.0, 1.0};
    Matrix out = -im * (model.hamiltonian.mat * rho.mat) + im * (rho.mat * model.hamiltonian.mat);
    for (const Operator& f : model.jumps) {
        out += 2.0 * (f.mat * (rho.mat * f.mat.adjoint()));
        out -= (f.mat.adjoint() * f.mat) * rho.mat;
        out -= rho.mat * (f.mat.adjoint() * f.mat);
    }
    return {rho.space, std::move(out)};
}

inline Operator heisenberg_rhs_oracle(const Model& model, const Operator& x) {
    const Complex im{0.0, 1.0};
    Matrix out = im * (model.hamiltonian.mat * x.mat) - im * (x.mat * model.hamiltonian.mat);
    for (const Operator& f : model.jumps) {
        out += 2.0 * (f.mat.adjoint() * (x.mat * f.mat));
        out -= (f.mat.adjoint() * f.mat) * x.mat;
        out -= x.mat * (f.mat.adjoint() * f.mat);
    }
    return {x.space, std::move(out)};
}

}  // namespace lindblad::testing
