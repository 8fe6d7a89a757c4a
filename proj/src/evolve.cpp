// evolve.cpp — Matrix-exponential propagation

#include "lindblad/evolve.hpp"

#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

namespace lindblad {

namespace {

// Scaling-and-squaring Padé exponential; well-defined even when L̂ is
// defective, unlike a spectral route.
Matrix expm(const Matrix& a) { return a.exp(); }

void require_nonnegative_time(double t, const char* what) {
    if (t < 0.0 || !std::isfinite(t)) {
        throw model_error(std::string(what) + ": the semigroup is defined for t >= 0 only");
    }
}

}  // namespace

Propagator::Propagator(const Liouvillian& liouvillian, double t)
    : space_(liouvillian.space()), t_(t) {
    require_nonnegative_time(t, "Propagator");
    matrix_ = expm(Matrix(liouvillian.matrix() * t));
}

Operator Propagator::apply(const Operator& x) const {
    if (!(x.space == space_)) throw model_error("Propagator::apply: space mismatch");
    return devectorize({space_, matrix_ * vectorize_matrix(x.mat)});
}

DensityMatrix propagate(const Liouvillian& liouvillian, const DensityMatrix& rho, double t) {
    require_nonnegative_time(t, "propagate");
    const Operator out = Propagator(liouvillian, t).apply(rho.op);
    return DensityMatrix::from_operator(out, DensityTolerances{1e-9, 1e-9, -1e-9});
}

Operator heisenberg_propagate(const Liouvillian& liouvillian, const Operator& x, double t) {
    require_nonnegative_time(t, "heisenberg_propagate");
    if (!(x.space == liouvillian.space())) {
        throw model_error("heisenberg_propagate: space mismatch");
    }
    const Matrix u = expm(Matrix(liouvillian.adjoint_matrix() * t));
    return devectorize({x.space, u * vectorize_matrix(x.mat)});
}

std::vector<std::pair<double, double>> convergence_profile(const Liouvillian& liouvillian,
                                                           const AsymptoticDecomposition& dec,
                                                           const DensityMatrix& rho,
                                                           const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        require_nonnegative_time(times[i], "convergence_profile");
        if (i > 0 && times[i] < times[i - 1]) {
            throw model_error("convergence_profile: times must be sorted");
        }
    }
    const DensityMatrix target = asymptotic_project(dec, rho);

    // Step through the sorted times with one exponential per distinct gap.
    std::map<double, Matrix> step_cache;
    Vector state = vectorize_matrix(rho.op.mat);
    double now = 0.0;
    std::vector<std::pair<double, double>> profile;
    profile.reserve(times.size());
    for (double t : times) {
        const double dt = t - now;
        if (dt > 0.0) {
            auto it = step_cache.find(dt);
            if (it == step_cache.end()) {
                it = step_cache.emplace(dt, Matrix(liouvillian.matrix() * dt).exp()).first;
            }
            state = it->second * state;
            now = t;
        }
        const Matrix diff = devectorize_matrix(state) - target.op.mat;
        profile.emplace_back(t, diff.norm());
    }
    return profile;
}

}  // namespace lindblad
