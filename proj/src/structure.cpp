// structure.cpp — Symmetry checks, sector partitioning, block discovery

#include "lindblad/structure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "lindblad/linalg.hpp"

namespace lindblad {

namespace {

constexpr Complex kImag{0.0, 1.0};

// Characteristic magnitude of the generator's ingredients, used to make the
// symmetry residual thresholds scale-invariant.
double model_scale(const Model& model) {
    double s = max_abs(model.hamiltonian);
    for (const Operator& f : model.jumps) {
        const double fm = max_abs(f);
        s = std::max(s, fm * fm);
    }
    return std::max(1.0, s);
}

int exact_isqrt(int x, const char* what) {
    const int r = static_cast<int>(std::llround(std::sqrt(static_cast<double>(x))));
    if (r * r != x) {
        throw numerical_error(std::string(what) + ": dimension " + std::to_string(x) +
                              " is not a perfect square");
    }
    return r;
}

}  // namespace

bool check_conserved(const Operator& a, const Liouvillian& liouvillian, double tol) {
    const double resid = max_abs(heisenberg_apply_direct(liouvillian.model(), a));
    return resid < tol * model_scale(liouvillian.model()) * std::max(1.0, max_abs(a));
}

bool check_strong_symmetry(const Operator& a, const Model& model, double tol) {
    const double scale = model_scale(model) * std::max(1.0, max_abs(a));
    if (max_abs(commutator(a, model.hamiltonian)) >= tol * scale) return false;
    for (const Operator& f : model.jumps) {
        if (max_abs(commutator(a, f)) >= tol * scale) return false;
    }
    return true;
}

bool check_weak_symmetry(const Operator& a, const Liouvillian& liouvillian, double tol) {
    const int n = a.dim();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix gen = kron_matrix(a.mat, id) - kron_matrix(id, a.mat.conjugate());
    const Matrix& lm = liouvillian.matrix();
    const double resid = max_abs(Matrix(gen * lm - lm * gen));
    return resid < tol * model_scale(liouvillian.model()) * std::max(1.0, max_abs(a));
}

SymmetryReport classify_symmetry(const Operator& a, const Liouvillian& liouvillian, double tol) {
    SymmetryReport r;
    r.candidate = a;
    const Model& model = liouvillian.model();
    const double scale = model_scale(model) * std::max(1.0, max_abs(a));

    double strong_resid = max_abs(commutator(a, model.hamiltonian));
    for (const Operator& f : model.jumps) {
        strong_resid = std::max(strong_resid, max_abs(commutator(a, f)));
    }
    const double conserved_resid = max_abs(heisenberg_apply_direct(model, a));
    const int n = a.dim();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix gen = kron_matrix(a.mat, id) - kron_matrix(id, a.mat.conjugate());
    const Matrix& lm = liouvillian.matrix();
    const double weak_resid = max_abs(Matrix(gen * lm - lm * gen));

    r.strong = strong_resid < tol * scale;
    r.conserved = conserved_resid < tol * scale;
    r.weak = weak_resid < tol * scale;
    r.residuals = {{"strong", strong_resid}, {"weak", weak_resid}, {"conserved", conserved_resid}};
    return r;
}

std::vector<Operator> find_symmetry_generators(const Liouvillian& liouvillian, double rtol) {
    const int n = liouvillian.space().dim();
    if (n > 16) {
        throw model_error("find_symmetry_generators: N = " + std::to_string(n) +
                          " exceeds the N <= 16 guard (cost grows as N^4 x N^2)");
    }
    const int n2 = n * n;
    const Matrix id = Matrix::Identity(n, n);
    const Matrix& lm = liouvillian.matrix();

    // Columns of the map A ↦ [Â, L̂] over the matrix units E_ab.
    Matrix phi(n2 * n2, n2);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            Matrix e = Matrix::Zero(n, n);
            e(a, b) = 1.0;
            const Matrix gen = kron_matrix(e, id) - kron_matrix(id, e.conjugate());
            phi.col(a * n + b) = vectorize_matrix(Matrix(gen * lm - lm * gen));
        }
    }

    // The commutant is separated from the rest by physical rates, so the
    // squared (normal-matrix) spectrum is rank-revealing enough here.
    const Matrix gram = phi.adjoint() * phi;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.info() != Eigen::Success) {
        throw numerical_error("find_symmetry_generators: eigensolver failed");
    }
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 1e-300);
    const double cut = std::max(rtol * rtol * lmax, 1e-28 * lmax);

    std::vector<Matrix> raw;
    for (int k = 0; k < n2; ++k) {
        if (es.eigenvalues()(k) < cut) {
            raw.push_back(devectorize_matrix(es.eigenvectors().col(k)));
        }
    }
    std::vector<Matrix> basis;
    try {
        basis = detail::hermitian_matrix_basis(raw, "find_symmetry_generators");
    } catch (const numerical_error&) {
        basis = std::move(raw);  // non-dagger-closed commutant: report as computed
    }
    detail::sort_and_sign_fix(basis);
    std::vector<Operator> out;
    out.reserve(basis.size());
    for (Matrix& m : basis) out.push_back(Operator{liouvillian.space(), std::move(m)});
    return out;
}

// ---------------------------------------------------------------- sectors --

const Sector& ParityPartition::sector(int mu, int nu) const {
    const int d = static_cast<int>(projectors.size());
    if (mu < 0 || mu >= d || nu < 0 || nu >= d) {
        throw model_error("ParityPartition::sector: index out of range");
    }
    return sectors[static_cast<std::size_t>(mu) * d + nu];
}

ParityPartition parity_partition(const std::vector<Operator>& projectors,
                                 const Liouvillian& liouvillian, double tol) {
    if (projectors.empty()) throw model_error("parity_partition: no projectors given");
    const Model& model = liouvillian.model();
    const HilbertSpace& space = model.space;
    const int n = space.dim();
    const double scale = model_scale(model);

    for (std::size_t k = 0; k < projectors.size(); ++k) {
        const Operator& p = projectors[k];
        const std::string label = "projector " + std::to_string(k);
        if (!(p.space == space)) throw model_error("parity_partition: " + label + " space mismatch");
        if (!is_hermitian(p.mat, tol)) {
            throw model_error("parity_partition: " + label + " is not Hermitian");
        }
        if (max_abs(Matrix(p.mat * p.mat - p.mat)) >= tol) {
            throw model_error("parity_partition: " + label + " is not idempotent");
        }
        const double cons = max_abs(heisenberg_apply_direct(model, p));
        if (cons >= tol * scale) {
            throw model_error("parity_partition: " + label + " is not conserved, residual " +
                              std::to_string(cons));
        }
        for (std::size_t l = 0; l < k; ++l) {
            if (max_abs(Matrix(p.mat * projectors[l].mat)) >= tol) {
                throw model_error("parity_partition: projectors " + std::to_string(l) + " and " +
                                  std::to_string(k) + " are not orthogonal");
            }
        }
    }
    Matrix sum = Matrix::Zero(n, n);
    for (const Operator& p : projectors) sum += p.mat;
    if (max_abs(Matrix(sum - Matrix::Identity(n, n))) >= tol) {
        throw model_error("parity_partition: projectors do not sum to the identity");
    }

    ParityPartition part;
    part.projectors = projectors;
    std::vector<Matrix> ranges;
    for (const Operator& p : projectors) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(p.mat);
        std::vector<int> cols;
        for (int i = 0; i < n; ++i) {
            if (es.eigenvalues()(i) > 0.5) cols.push_back(i);
        }
        Matrix basis(n, cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) basis.col(i) = es.eigenvectors().col(cols[i]);
        ranges.push_back(std::move(basis));
    }

    // Compressions of the generator's ingredients into each projector range.
    // Because U_α† A (U_μ C U_ν†) B U_β = (U_α†AU_μ) C (U_ν†BU_β), the sector
    // restriction of L̂ assembles exactly from these small matrices.
    const int d = static_cast<int>(projectors.size());
    Matrix gsum = Matrix::Zero(n, n);
    for (const Operator& f : model.jumps) gsum += f.mat.adjoint() * f.mat;
    std::vector<Matrix> h_c(d), g_c(d);
    std::vector<std::vector<Matrix>> f_c(model.jumps.size(), std::vector<Matrix>(d));
    for (int mu = 0; mu < d; ++mu) {
        h_c[mu] = ranges[mu].adjoint() * model.hamiltonian.mat * ranges[mu];
        g_c[mu] = ranges[mu].adjoint() * gsum * ranges[mu];
        for (std::size_t l = 0; l < model.jumps.size(); ++l) {
            f_c[l][mu] = ranges[mu].adjoint() * model.jumps[l].mat * ranges[mu];
        }
    }

    const Complex im{0.0, 1.0};
    for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) {
            Sector s;
            s.mu = mu;
            s.nu = nu;
            s.row_basis = ranges[mu];
            s.col_basis = ranges[nu];
            const int dm = static_cast<int>(s.row_basis.cols());
            const int dn = static_cast<int>(s.col_basis.cols());
            const Matrix idm = Matrix::Identity(dm, dm);
            const Matrix idn = Matrix::Identity(dn, dn);
            Matrix sub = -im * (kron_matrix(h_c[mu], idn) -
                                kron_matrix(idm, h_c[nu].transpose()));
            for (std::size_t l = 0; l < model.jumps.size(); ++l) {
                sub += 2.0 * kron_matrix(f_c[l][mu], f_c[l][nu].conjugate());
            }
            sub -= kron_matrix(g_c[mu], idn);
            sub -= kron_matrix(idm, g_c[nu].transpose());
            s.sub_liouvillian = std::move(sub);
            part.sectors.push_back(std::move(s));
        }
    }

    // Block-diagonality check against the direct evolution: exhaustive for
    // small spaces, a deterministic sample of basis directions otherwise.
    for (Sector& s : part.sectors) {
        const int dm = static_cast<int>(s.row_basis.cols());
        const int dn = static_cast<int>(s.col_basis.cols());
        const int samples = n <= 32 ? dm * dn : std::min(dm * dn, 8);
        const int stride = std::max(1, dm * dn / std::max(1, samples));
        for (int k = 0; k < dm * dn; k += stride) {
            const int i = k / dn, j = k % dn;
            const Operator x{space, Matrix(s.row_basis.col(i) * s.col_basis.col(j).adjoint())};
            const Operator lx = apply_direct(model, x);
            const Matrix coef = s.row_basis.adjoint() * lx.mat * s.col_basis;
            const double cross2 = lx.mat.squaredNorm() - coef.squaredNorm();
            part.max_cross_coupling =
                std::max(part.max_cross_coupling, std::sqrt(std::max(0.0, cross2)));
            const Vector diff = s.sub_liouvillian.col(k) - vectorize_matrix(coef);
            part.max_cross_coupling = std::max(part.max_cross_coupling, diff.norm());
        }
    }
    if (part.max_cross_coupling >= tol * scale * n) {
        throw numerical_error("parity_partition: cross-sector coupling " +
                              std::to_string(part.max_cross_coupling) +
                              " — the Liouvillian is not block-diagonal over these projectors");
    }
    return part;
}

Matrix sector_compress(const Sector& sector, const Operator& x) {
    return sector.row_basis.adjoint() * x.mat * sector.col_basis;
}

Operator sector_decompress(const Sector& sector, const Matrix& coefficients,
                           const HilbertSpace& space) {
    return {space, Matrix(sector.row_basis * coefficients * sector.col_basis.adjoint())};
}

// ----------------------------------------------------------------- blocks --

namespace {

// Orthonormal basis (as matrices) of the dagger-closed algebra generated by
// the seed matrices; throws when products keep escaping the span.
std::vector<Matrix> algebra_closure(const std::vector<Matrix>& seeds, int s, double span_tol,
                                    int pass_limit) {
    Matrix span(s * s, 0);
    std::vector<Matrix> basis;
    auto push = [&](const Matrix& m) {
        if (detail::grow_span(span, vectorize_matrix(m), span_tol)) {
            basis.push_back(devectorize_matrix(span.col(span.cols() - 1)));
            return true;
        }
        return false;
    };
    push(Matrix::Identity(s, s));
    for (const Matrix& m : seeds) {
        push(m);
        push(Matrix(m.adjoint()));
    }
    bool grew = true;
    int pass = 0;
    while (grew) {
        if (++pass > pass_limit) {
            throw numerical_error("block_structure: algebra closure did not converge within " +
                                  std::to_string(pass_limit) + " passes");
        }
        grew = false;
        const std::size_t k0 = basis.size();
        for (std::size_t i = 0; i < k0; ++i) {
            for (std::size_t j = 0; j < k0; ++j) {
                if (push(Matrix(basis[i] * basis[j]))) grew = true;
            }
        }
    }
    return basis;
}

// Basis (as coefficient combinations of `basis`) of {Z : [Z, B_i] = 0 ∀i},
// computed inside the given subspace of matrices.
std::vector<Matrix> commuting_subspace(const std::vector<Matrix>& basis,
                                       const std::vector<Matrix>& against, double rtol) {
    const int k = static_cast<int>(basis.size());
    const int s = static_cast<int>(basis[0].rows());
    const int rows = static_cast<int>(against.size()) * s * s;
    Matrix map(rows, k);
    for (int j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < against.size(); ++i) {
            const Matrix c = basis[j] * against[i] - against[i] * basis[j];
            map.block(static_cast<int>(i) * s * s, j, s * s, 1) = vectorize_matrix(c);
        }
    }
    const Matrix null = detail::right_nullspace(map, rtol);
    std::vector<Matrix> out;
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
        Matrix z = Matrix::Zero(s, s);
        for (int j = 0; j < k; ++j) z += null(j, c) * basis[j];
        out.push_back(std::move(z));
    }
    return out;
}

// Full matrix basis E_ab of an s-dimensional block, for commutant solves.
std::vector<Matrix> matrix_unit_basis(int s) {
    std::vector<Matrix> units;
    units.reserve(s * s);
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
            Matrix e = Matrix::Zero(s, s);
            e(a, b) = 1.0;
            units.push_back(std::move(e));
        }
    return units;
}

Matrix random_hermitian_combo(const std::vector<Matrix>& herm_basis, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix z = Matrix::Zero(herm_basis[0].rows(), herm_basis[0].cols());
    for (const Matrix& b : herm_basis) z += g(rng) * b;
    return z;
}

// Group sorted eigenvalues into clusters separated by more than `gap`.
std::vector<std::pair<int, int>> cluster_eigenvalues(const Eigen::VectorXd& vals, double gap) {
    std::vector<std::pair<int, int>> clusters;
    int start = 0;
    for (int i = 1; i <= vals.size(); ++i) {
        if (i == vals.size() || vals(i) - vals(i - 1) > gap) {
            clusters.emplace_back(start, i);
            start = i;
        }
    }
    return clusters;
}

}  // namespace

BlockStructure block_structure(const AsymptoticDecomposition& dec, const Liouvillian& liouvillian,
                               const BlockOptions& opts) {
    const HilbertSpace& space = liouvillian.space();
    const int n = space.dim();
    const int d_steady = dec.steady_dimension();
    if (d_steady == 0) throw model_error("block_structure: empty decomposition");

    // Support of the maximal steady state (asymptotic projection of I/N).
    const DensityMatrix rho_star = asymptotic_project(dec, DensityMatrix::maximally_mixed(space));
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_star.op.mat);
    const double lmax = es.eigenvalues().maxCoeff();
    std::vector<int> sup_cols;
    for (int i = 0; i < n; ++i) {
        if (es.eigenvalues()(i) > opts.support_rtol * lmax) sup_cols.push_back(i);
    }
    const int s = static_cast<int>(sup_cols.size());
    Matrix support(n, s);
    for (int i = 0; i < s; ++i) support.col(i) = es.eigenvectors().col(sup_cols[i]);
    const Matrix rho_supp = support.adjoint() * rho_star.op.mat * support;

    // The support compressions of the conserved quantities (and rotating
    // duals, when present) generate the structure algebra ⊕_κ M_{n_κ}⊗I_{m_κ}.
    std::vector<Matrix> seeds;
    for (const Operator& j : dec.conserved) seeds.push_back(support.adjoint() * j.mat * support);
    for (const RotatingPair& r : dec.rotating) {
        seeds.push_back(support.adjoint() * r.dual.mat * support);
    }
    const int pass_limit = std::max(8, d_steady * d_steady);
    const std::vector<Matrix> algebra = algebra_closure(seeds, s, opts.span_tol, pass_limit);

    const std::vector<Matrix> center_raw = commuting_subspace(algebra, algebra, 1e-8);
    const std::vector<Matrix> center =
        detail::hermitian_matrix_basis(center_raw, "block_structure center");
    const int n_blocks = static_cast<int>(center.size());

    // A generic Hermitian center element takes one constant value per block;
    // its eigenvalue clusters reveal the block supports.
    std::vector<std::pair<Eigen::VectorXd, Matrix>> block_frames;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= opts.max_retries) {
            throw numerical_error("block_structure: center probe kept colliding after " +
                                  std::to_string(opts.max_retries) + " reseeds");
        }
        const Matrix probe = random_hermitian_combo(center, opts.seed + attempt);
        Eigen::SelfAdjointEigenSolver<Matrix> pes(probe);
        const double spread = pes.eigenvalues().maxCoeff() - pes.eigenvalues().minCoeff();
        const auto clusters =
            cluster_eigenvalues(pes.eigenvalues(), std::max(1e-8, 1e-8 * spread));
        if (static_cast<int>(clusters.size()) != n_blocks) continue;
        block_frames.clear();
        for (const auto& [lo, hi] : clusters) {
            block_frames.emplace_back(pes.eigenvalues().segment(lo, hi - lo),
                                      pes.eigenvectors().middleCols(lo, hi - lo));
        }
        break;
    }

    BlockStructure out;
    out.support_dim = s;
    int capacity = 0;
    for (const auto& [vals, w] : block_frames) {
        const int sk = static_cast<int>(w.cols());

        std::vector<Matrix> alg_in_block;
        Matrix alg_span(sk * sk, 0);
        for (const Matrix& b : algebra) {
            const Matrix r = w.adjoint() * b * w;
            if (detail::grow_span(alg_span, vectorize_matrix(r), opts.span_tol)) {
                alg_in_block.push_back(devectorize_matrix(alg_span.col(alg_span.cols() - 1)));
            }
        }
        const int nk = exact_isqrt(static_cast<int>(alg_in_block.size()), "block_structure (n)");

        const std::vector<Matrix> comm_raw =
            commuting_subspace(matrix_unit_basis(sk), alg_in_block, 1e-8);
        const int mk = exact_isqrt(static_cast<int>(comm_raw.size()), "block_structure (m)");
        if (nk * mk != sk) {
            throw numerical_error("block_structure: block of dimension " + std::to_string(sk) +
                                  " does not factor as " + std::to_string(nk) + " x " +
                                  std::to_string(mk));
        }

        Block block;
        block.n = nk;
        block.m = mk;
        block.energies.assign(nk, 0.0);

        Matrix frame(sk, sk);  // columns ordered (μ·m + a)
        if (mk == 1) {
            frame = Matrix::Identity(sk, sk);
        } else {
            const std::vector<Matrix> comm =
                detail::hermitian_matrix_basis(comm_raw, "block_structure commutant");
            bool built = false;
            for (int attempt = 0; attempt < opts.max_retries && !built; ++attempt) {
                const Matrix y1 = random_hermitian_combo(comm, opts.seed + 71 * attempt + 13);
                Eigen::SelfAdjointEigenSolver<Matrix> yes(y1);
                const double spread = yes.eigenvalues().maxCoeff() - yes.eigenvalues().minCoeff();
                const auto clusters =
                    cluster_eigenvalues(yes.eigenvalues(), std::max(1e-8, 1e-8 * spread));
                if (static_cast<int>(clusters.size()) != mk) continue;
                bool sizes_ok = true;
                for (const auto& [lo, hi] : clusters) sizes_ok &= (hi - lo == nk);
                if (!sizes_ok) continue;

                // Align the n-factor frames of the eigenspaces through a
                // second commutant element (I⊗g maps eigenspace 1 to j with a
                // scalar times a unitary).
                const Matrix y2 = random_hermitian_combo(comm, opts.seed + 71 * attempt + 39);
                const Matrix v1 = yes.eigenvectors().middleCols(clusters[0].first, nk);
                bool aligned = true;
                std::vector<Matrix> factors(mk);
                factors[0] = v1;
                for (int j = 1; j < mk; ++j) {
                    const Matrix vj = yes.eigenvectors().middleCols(clusters[j].first, nk);
                    const Matrix c = vj.adjoint() * y2 * v1;
                    const detail::SvdResult csvd = detail::svd(c);
                    if (csvd.sigma(nk - 1) < 1e-8 * csvd.sigma(0) || csvd.sigma(0) < 1e-10) {
                        aligned = false;
                        break;
                    }
                    factors[j] = vj * (csvd.u * csvd.v.adjoint());
                }
                if (!aligned) continue;
                for (int mu = 0; mu < nk; ++mu)
                    for (int j = 0; j < mk; ++j) frame.col(mu * mk + j) = factors[j].col(mu);
                built = true;
            }
            if (!built) {
                throw numerical_error(
                    "block_structure: commutant probe kept colliding; factor alignment failed");
            }
        }

        block.basis = support * w * frame;

        // Factor state from the maximal steady state restricted to the block.
        const Matrix r = block.basis.adjoint() * rho_star.op.mat * block.basis;
        Matrix t = Matrix::Zero(mk, mk);
        for (int mu = 0; mu < nk; ++mu) t += r.block(mu * mk, mu * mk, mk, mk);
        const double tr = t.trace().real();
        if (tr <= 0.0) throw numerical_error("block_structure: factor state has nonpositive trace");
        t /= tr;
        t = 0.5 * (t + t.adjoint());

        // Canonical frame: factor state diagonal with descending weights.
        Eigen::SelfAdjointEigenSolver<Matrix> tes(t);
        Matrix wt(mk, mk);
        Eigen::VectorXd tvals(mk);
        for (int a = 0; a < mk; ++a) {
            wt.col(a) = tes.eigenvectors().col(mk - 1 - a);
            tvals(a) = tes.eigenvalues()(mk - 1 - a);
        }
        if (tvals.minCoeff() < -1e-10) {
            throw numerical_error("block_structure: factor state not PSD, eigenvalue " +
                                  std::to_string(tvals.minCoeff()));
        }
        block.basis = block.basis * kron_matrix(Matrix::Identity(nk, nk), wt);
        block.factor_state = tvals.cwiseMax(0.0).asDiagonal();
        block.factor_state /= block.factor_state.trace().real();

        capacity += nk * nk;
        out.blocks.push_back(std::move(block));
        (void)vals;
    }

    const int expected = d_steady + static_cast<int>(dec.rotating.size());
    if (capacity != expected) {
        throw numerical_error("block_structure: capacity sum(n^2) = " + std::to_string(capacity) +
                              " does not account for the limit-set dimension " +
                              std::to_string(expected));
    }

    std::stable_sort(out.blocks.begin(), out.blocks.end(), [](const Block& a, const Block& b) {
        if (a.n != b.n) return a.n > b.n;
        if (a.m != b.m) return a.m > b.m;
        // Lexicographic tie-break on the first basis column's peak position.
        auto peak = [](const Block& blk) {
            int idx = 0;
            double best = -1.0;
            for (int i = 0; i < blk.basis.rows(); ++i) {
                const double v = std::abs(blk.basis(i, 0));
                if (v > best + 1e-12) {
                    best = v;
                    idx = i;
                }
            }
            return idx;
        };
        return peak(a) < peak(b);
    });

    // Reconstruction check: every element of the limit set must be reproduced
    // by its block coefficients.
    double max_resid = 0.0;
    auto check = [&](const Operator& x) {
        Matrix recon = Matrix::Zero(n, n);
        for (const Block& b : out.blocks) {
            const Matrix a = block_coefficients(b, x);
            recon += b.basis * kron_matrix(a, b.factor_state) * b.basis.adjoint();
        }
        max_resid = std::max(max_resid, max_abs(Matrix(x.mat - recon)));
    };
    for (const Operator& m : dec.steady_basis) check(m);
    for (const RotatingPair& r : dec.rotating) check(r.mode);
    out.reconstruction_residual = max_resid;
    if (max_resid > 1e-8) {
        throw numerical_error("block_structure: reconstruction residual " +
                              std::to_string(max_resid) + " exceeds 1e-8");
    }
    return out;
}

Matrix block_coefficients(const Block& block, const Operator& x) {
    const Matrix r = block.basis.adjoint() * x.mat * block.basis;
    const double tnorm = block.factor_state.squaredNorm();
    Matrix a(block.n, block.n);
    for (int mu = 0; mu < block.n; ++mu) {
        for (int nu = 0; nu < block.n; ++nu) {
            a(mu, nu) = (block.factor_state.adjoint() *
                         r.block(mu * block.m, nu * block.m, block.m, block.m))
                            .trace() /
                        tnorm;
        }
    }
    return a;
}

std::vector<std::vector<double>> extract_rotation_hamiltonian(
    const std::vector<RotatingPair>& rotating, BlockStructure& blocks, double tol) {
    struct Constraint {
        int mu, nu;
        double lambda;
    };
    std::vector<std::vector<Constraint>> constraints(blocks.blocks.size());

    auto add_constraints = [&](const Operator& x, double lambda) {
        double peak = 0.0;
        std::vector<Matrix> coefs;
        for (const Block& b : blocks.blocks) {
            coefs.push_back(block_coefficients(b, x));
            peak = std::max(peak, max_abs(coefs.back()));
        }
        for (std::size_t k = 0; k < blocks.blocks.size(); ++k) {
            const Block& b = blocks.blocks[k];
            for (int mu = 0; mu < b.n; ++mu) {
                for (int nu = 0; nu < b.n; ++nu) {
                    if (mu != nu && std::abs(coefs[k](mu, nu)) > 1e-6 * peak) {
                        constraints[k].push_back({mu, nu, lambda});
                    }
                }
            }
        }
    };
    for (const RotatingPair& r : rotating) add_constraints(r.mode, r.frequency);

    std::vector<std::vector<double>> energies;
    for (std::size_t k = 0; k < blocks.blocks.size(); ++k) {
        Block& b = blocks.blocks[k];
        const int nk = b.n;
        Eigen::MatrixXd a(constraints[k].size() + 1, nk);
        Eigen::VectorXd rhs(constraints[k].size() + 1);
        a.setZero();
        rhs.setZero();
        for (std::size_t r = 0; r < constraints[k].size(); ++r) {
            a(r, constraints[k][r].nu) += 1.0;
            a(r, constraints[k][r].mu) -= 1.0;
            rhs(r) = constraints[k][r].lambda;
        }
        a(constraints[k].size(), 0) = 1.0;  // gauge row, removed again below

        Eigen::VectorXd e = a.colPivHouseholderQr().solve(rhs);
        for (const Constraint& c : constraints[k]) {
            if (std::abs(e(c.nu) - e(c.mu) - c.lambda) > tol) {
                throw numerical_error(
                    "extract_rotation_hamiltonian: frequency " + std::to_string(c.lambda) +
                    " is not expressible as an energy difference (block misidentified?)");
            }
        }
        const double shift = e.minCoeff();
        b.energies.resize(nk);
        for (int mu = 0; mu < nk; ++mu) b.energies[mu] = e(mu) - shift;
        energies.push_back(b.energies);
    }
    return energies;
}

bool subspace_symmetry_check(const Operator& u, const AsymptoticDecomposition& dec, double tol) {
    const double unit = max_abs(Matrix(u.mat.adjoint() * u.mat -
                                       Matrix::Identity(u.dim(), u.dim())));
    if (unit >= 1e-10) {
        throw model_error("subspace_symmetry_check: input not unitary, deviation " +
                          std::to_string(unit));
    }
    for (const Operator& m : dec.steady_basis) {
        const Operator moved{m.space, Matrix(u.mat.adjoint() * m.mat * u.mat)};
        const Operator resid = moved - project_onto_steady_span(dec, moved);
        if (hs_norm(resid) > tol) return false;
    }
    return true;
}

}  // namespace lindblad
