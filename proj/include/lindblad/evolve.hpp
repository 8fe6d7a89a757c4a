// evolve.hpp — Direct time propagation in the Schrödinger and Heisenberg
// pictures via the superoperator matrix exponential.

#pragma once

#include <utility>
#include <vector>

#include "lindblad/asymptotics.hpp"
#include "lindblad/liouvillian.hpp"
#include "lindblad/operator_core.hpp"

namespace lindblad {

// exp(L̂t), reusable across states.
class Propagator {
public:
    Propagator(const Liouvillian& liouvillian, double t);

    double time() const { return t_; }
    const Matrix& matrix() const { return matrix_; }
    Operator apply(const Operator& x) const;

private:
    HilbertSpace space_;
    double t_;
    Matrix matrix_;
};

DensityMatrix propagate(const Liouvillian& liouvillian, const DensityMatrix& rho, double t);
Operator heisenberg_propagate(const Liouvillian& liouvillian, const Operator& x, double t);

// Frobenius distance of e^{L̂t}ρ from its asymptotic projection, sampled at
// the given (sorted, nonnegative) times.
std::vector<std::pair<double, double>> convergence_profile(const Liouvillian& liouvillian,
                                                           const AsymptoticDecomposition& dec,
                                                           const DensityMatrix& rho,
                                                           const std::vector<double>& times);

}  // namespace lindblad
