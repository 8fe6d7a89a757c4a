// asymptotics.cpp — Nullspace extraction and infinite-time maps

#include "lindblad/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "lindblad/linalg.hpp"

namespace lindblad {

namespace {

std::vector<Operator> nullspace_basis(const Matrix& mat, const HilbertSpace& space, double rtol,
                                      const char* what) {
    const Matrix null = detail::right_nullspace(mat, rtol);
    std::vector<Matrix> raw;
    raw.reserve(null.cols());
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
        raw.push_back(devectorize_matrix(null.col(c)));
    }
    // The nullspaces of L̂ and L̂† are dagger-closed, so a Hermitian basis
    // exists; failure to find one signals a rank/tolerance problem.
    std::vector<Matrix> herm = detail::hermitian_matrix_basis(raw, what);
    detail::sort_and_sign_fix(herm);
    std::vector<Operator> basis;
    basis.reserve(herm.size());
    for (Matrix& m : herm) basis.push_back(Operator{space, std::move(m)});
    return basis;
}

std::string singular_value_tail(const Eigen::VectorXd& sigma, int count) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific;
    const int start = std::max<int>(0, static_cast<int>(sigma.size()) - count);
    for (int i = start; i < sigma.size(); ++i) os << (i > start ? ", " : "") << sigma(i);
    return os.str();
}

}  // namespace

std::vector<Operator> steady_basis(const Liouvillian& liouvillian, double rtol) {
    std::vector<Operator> basis =
        nullspace_basis(liouvillian.matrix(), liouvillian.space(), rtol, "steady_basis");
    if (basis.empty()) {
        throw numerical_error(
            "steady_basis: empty nullspace; a finite Lindblad generator always has a steady state, "
            "so the tolerance misclassified the smallest singular values");
    }
    return basis;
}

std::vector<Operator> conserved_quantities(const Liouvillian& liouvillian, double rtol) {
    std::vector<Operator> basis =
        nullspace_basis(liouvillian.adjoint_matrix(), liouvillian.space(), rtol,
                        "conserved_quantities");

    const detail::SvdResult sv_l = detail::svd(liouvillian.matrix());
    const int dim_right = static_cast<int>(sv_l.v.cols()) - detail::svd_rank(sv_l.sigma, rtol);
    if (static_cast<int>(basis.size()) != dim_right) {
        throw numerical_error(
            "conserved_quantities: left nullspace dimension " + std::to_string(basis.size()) +
            " != right nullspace dimension " + std::to_string(dim_right) +
            "; trailing singular values of the Liouvillian: " + singular_value_tail(sv_l.sigma, 6));
    }

    // Trace preservation puts the identity in the span.
    const Operator id = identity(liouvillian.space());
    Matrix resid = id.mat;
    for (const Operator& j : basis) resid -= hs_inner(j, id) * j.mat;
    if (resid.norm() > 1e-7 * id.mat.norm()) {
        throw numerical_error("conserved_quantities: span does not contain the identity, residual " +
                              std::to_string(resid.norm()));
    }
    return basis;
}

std::vector<Operator> biorthogonalize(const std::vector<Operator>& steady,
                                      const std::vector<Operator>& conserved_raw) {
    const int d = static_cast<int>(steady.size());
    if (static_cast<int>(conserved_raw.size()) != d) {
        throw model_error("biorthogonalize: list lengths differ");
    }
    if (d == 0) return {};
    Matrix gram(d, d);
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) gram(mu, nu) = hs_inner(conserved_raw[mu], steady[nu]);

    const detail::SvdResult svd = detail::svd(gram);
    const double smax = svd.sigma(0);
    const double smin = svd.sigma(d - 1);
    if (!(smin > 0.0) || smax / smin > 1e12) {
        throw numerical_error(
            "biorthogonalize: Gram matrix singular beyond cond 1e12 (singular values " +
            singular_value_tail(svd.sigma, d) +
            "); null and near-null vectors were likely misclassified");
    }

    // J_μ = Σ_α conj(G⁻¹)_{μα} J_raw_α gives hs_inner(J_μ, M_ν) = δ_μν.
    const Matrix g_inv = svd.v * svd.sigma.cwiseInverse().asDiagonal() * svd.u.adjoint();
    std::vector<Operator> out;
    out.reserve(d);
    for (int mu = 0; mu < d; ++mu) {
        Matrix m = Matrix::Zero(steady[0].dim(), steady[0].dim());
        for (int alpha = 0; alpha < d; ++alpha) {
            m += std::conj(g_inv(mu, alpha)) * conserved_raw[alpha].mat;
        }
        out.push_back(Operator{steady[0].space, std::move(m)});
    }
    return out;
}

std::vector<RotatingPair> rotating_from_spectrum(const Spectrum& s, double cluster_rtol) {
    const double tol = s.zero_tolerance;
    std::vector<int> picks;
    double max_im = 0.0;
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        const Complex ev = s.eigenvalues[k];
        if (std::abs(ev.real()) < tol && std::abs(ev.imag()) >= tol) {
            picks.push_back(static_cast<int>(k));
            max_im = std::max(max_im, std::abs(ev.imag()));
        }
    }
    if (picks.empty()) return {};

    // Eigenvalues on the imaginary axis are proper (non-defective); a large
    // eigenvector residual means the pair cannot be trusted.
    for (int k : picks) {
        if (s.eig_residual(k) > 1e-9 * std::max(1.0, s.matrix_scale)) {
            throw numerical_error("rotating_decomposition: imaginary-axis eigenvector residual " +
                                  std::to_string(s.eig_residual(k)) + " too large");
        }
    }

    std::sort(picks.begin(), picks.end(),
              [&](int a, int b) { return s.eigenvalues[a].imag() < s.eigenvalues[b].imag(); });

    const double cluster_tol = cluster_rtol * max_im;
    std::vector<RotatingPair> out;
    std::size_t i = 0;
    while (i < picks.size()) {
        std::size_t j = i + 1;
        while (j < picks.size() && s.eigenvalues[picks[j]].imag() -
                                       s.eigenvalues[picks[j - 1]].imag() <=
                                   cluster_tol) {
            ++j;
        }
        const int cluster = static_cast<int>(j - i);
        double freq = 0.0;
        for (std::size_t k = i; k < j; ++k) freq += s.eigenvalues[picks[k]].imag() / cluster;

        std::vector<Operator> modes, duals_raw;
        for (std::size_t k = i; k < j; ++k) {
            const int idx = picks[k];
            if (s.pair_residual(idx) > std::max(1e-6, 100 * tol)) {
                throw numerical_error(
                    "rotating_decomposition: no adjoint eigenvector pairs with frequency " +
                    std::to_string(freq) + " (pairing residual " +
                    std::to_string(s.pair_residual(idx)) + ")");
            }
            modes.push_back(devectorize({s.space, s.right.col(idx)}));
            duals_raw.push_back(devectorize({s.space, s.left.col(idx)}));
        }

        // Cluster-wise biorthogonalization: want hs_inner(S_k, O_l) = δ_kl.
        Matrix gram(cluster, cluster);
        for (int a = 0; a < cluster; ++a)
            for (int b = 0; b < cluster; ++b) gram(a, b) = hs_inner(duals_raw[a], modes[b]);
        const detail::SvdResult svd = detail::svd(gram);
        if (svd.sigma(cluster - 1) < 1e-12 * svd.sigma(0)) {
            throw numerical_error(
                "rotating_decomposition: degenerate frequency cluster at " + std::to_string(freq) +
                " could not be biorthogonalized");
        }
        const Matrix g_inv = svd.v * svd.sigma.cwiseInverse().asDiagonal() * svd.u.adjoint();
        for (int a = 0; a < cluster; ++a) {
            Matrix dual = Matrix::Zero(s.space.dim(), s.space.dim());
            for (int b = 0; b < cluster; ++b) dual += std::conj(g_inv(a, b)) * duals_raw[b].mat;
            out.push_back(RotatingPair{freq, modes[a], Operator{s.space, std::move(dual)}});
        }
        i = j;
    }
    return out;
}

std::vector<RotatingPair> rotating_decomposition(const Liouvillian& liouvillian,
                                                 const AsymptoticsOptions& opts) {
    return rotating_from_spectrum(spectrum(liouvillian), opts.cluster_rtol);
}

AsymptoticDecomposition analyze_asymptotics(const Liouvillian& liouvillian,
                                            const AsymptoticsOptions& opts) {
    AsymptoticDecomposition dec;
    dec.steady_basis = steady_basis(liouvillian, opts.svd_rtol);
    dec.conserved = biorthogonalize(dec.steady_basis,
                                    conserved_quantities(liouvillian, opts.svd_rtol));
    if (opts.compute_rotating || opts.compute_gap) {
        const Spectrum s = spectrum(liouvillian);
        dec.gap = s.gap;
        if (opts.compute_rotating) {
            dec.rotating = rotating_from_spectrum(s, opts.cluster_rtol);
        }
    }
    return dec;
}

namespace {

DensityMatrix clip_to_state(Matrix rho, const HilbertSpace& space, double psd_tol) {
    rho = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < psd_tol) {
        throw numerical_error("asymptotic projection produced eigenvalue " + std::to_string(lmin) +
                              " below tolerance " + std::to_string(psd_tol));
    }
    if (lmin < 0.0) {
        Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
        rho = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
        rho /= rho.trace().real();
    }
    const double trdev = std::abs(rho.trace() - Complex(1.0));
    if (trdev > 1e-8) {
        throw numerical_error("asymptotic projection trace deviates from 1 by " +
                              std::to_string(trdev));
    }
    rho /= rho.trace().real();
    return DensityMatrix{Operator{space, std::move(rho)}};
}

}  // namespace

DensityMatrix asymptotic_project(const AsymptoticDecomposition& dec, const DensityMatrix& rho_in) {
    if (dec.steady_basis.empty()) throw model_error("asymptotic_project: empty decomposition");
    const HilbertSpace& space = dec.steady_basis[0].space;
    if (!(rho_in.op.space == space)) {
        throw model_error("asymptotic_project: state lives on a different space");
    }
    Matrix out = Matrix::Zero(space.dim(), space.dim());
    for (std::size_t mu = 0; mu < dec.steady_basis.size(); ++mu) {
        out += hs_inner(dec.conserved[mu], rho_in.op) * dec.steady_basis[mu].mat;
    }
    return clip_to_state(std::move(out), space, -1e-8);
}

DensityMatrix infinite_time_state(const AsymptoticDecomposition& dec, const DensityMatrix& rho_in,
                                  double t) {
    if (dec.steady_basis.empty()) throw model_error("infinite_time_state: empty decomposition");
    const HilbertSpace& space = dec.steady_basis[0].space;
    if (!(rho_in.op.space == space)) {
        throw model_error("infinite_time_state: state lives on a different space");
    }
    Matrix out = Matrix::Zero(space.dim(), space.dim());
    for (std::size_t mu = 0; mu < dec.steady_basis.size(); ++mu) {
        out += hs_inner(dec.conserved[mu], rho_in.op) * dec.steady_basis[mu].mat;
    }
    for (const RotatingPair& r : dec.rotating) {
        const Complex phase = std::exp(Complex(0.0, r.frequency * t));
        out += phase * hs_inner(r.dual, rho_in.op) * r.mode.mat;
    }
    return clip_to_state(std::move(out), space, -1e-8);
}

Operator project_onto_steady_span(const AsymptoticDecomposition& dec, const Operator& x) {
    Matrix out = Matrix::Zero(x.dim(), x.dim());
    for (const Operator& m : dec.steady_basis) out += hs_inner(m, x) * m.mat;
    return {x.space, std::move(out)};
}

}  // namespace lindblad
