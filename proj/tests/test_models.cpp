#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lindblad/asymptotics.hpp"
#include "lindblad/linalg.hpp"
#include "lindblad/models.hpp"
#include "test_helpers.hpp"

using namespace lindblad;

namespace {

constexpr Complex kImag{0.0, 1.0};

Matrix stack_columns(const std::vector<Operator>& ops) {
    Matrix out(ops[0].dim() * ops[0].dim(), ops.size());
    for (std::size_t k = 0; k < ops.size(); ++k) out.col(k) = vectorize(ops[k]).vec;
    return out;
}

// Modified Bessel I0 by its power series: sum_k (x/2)^{2k} / (k!)^2.
double bessel_i0(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= (x * x / 4.0) / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("factorial kit") {
    CHECK(models::double_factorial(0) == 1);
    CHECK(models::double_factorial(1) == 1);
    CHECK(models::double_factorial(7) == 105);
    CHECK(models::double_factorial(8) == 384);
    CHECK(models::falling_factorial(5, 3) == 60);
    CHECK(models::falling_factorial(5, 0) == 1);
    CHECK(models::falling_factorial(2, 3) == 0);
    CHECK_THROWS_AS(models::double_factorial(-1), model_error);
    CHECK_THROWS_AS(models::falling_factorial(3, -2), model_error);
    CHECK_THROWS_AS(models::double_factorial(101), model_error);  // overflow guard
}

TEST_CASE("dephasing entry") {
    const models::CatalogEntry e = models::dephasing();
    Liouvillian l = build_liouvillian(e.model);
    for (std::size_t k = 0; k < e.analytic_steady.size(); ++k) {
        CHECK(hs_norm(apply(l, e.analytic_steady[k])) < 1e-13);
        CHECK(hs_norm(heisenberg_apply_direct(e.model, e.analytic_conserved[k])) < 1e-13);
    }
}

TEST_CASE("two-qubit entry: orthonormality, duality, steadiness") {
    const models::CatalogEntry e = models::two_qubit();
    Liouvillian l = build_liouvillian(e.model);
    for (std::size_t a = 0; a < 4; ++a) {
        CHECK(hs_norm(apply(l, e.analytic_steady[a])) < 1e-12);
        CHECK(hs_norm(heisenberg_apply_direct(e.model, e.analytic_conserved[a])) < 1e-12);
        for (std::size_t b = 0; b < 4; ++b) {
            const Complex mm = hs_inner(e.analytic_steady[a], e.analytic_steady[b]);
            const Complex jm = hs_inner(e.analytic_conserved[a], e.analytic_steady[b]);
            CHECK(std::abs(mm - (a == b ? 1.0 : 0.0)) < 1e-12);
            CHECK(std::abs(jm - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
    }

    // |Psi+> lies in the DFS and is exactly steady.
    Vector psi_plus = Vector::Zero(4);
    psi_plus(1) = psi_plus(2) = 1.0 / std::sqrt(2.0);
    const DensityMatrix rho = DensityMatrix::pure(e.model.space, psi_plus);
    CHECK(hs_norm(apply(l, rho.op)) < 1e-12);
}

TEST_CASE("driven two-qubit entry") {
    for (double omega : {0.3, 1.0, 3.0}) {
        const models::CatalogEntry e = models::driven_two_qubit(omega);
        Liouvillian l = build_liouvillian(e.model);
        for (std::size_t a = 0; a < 4; ++a) {
            CHECK(hs_norm(apply(l, e.analytic_steady[a])) < 1e-10);
            CHECK(hs_norm(heisenberg_apply_direct(e.model, e.analytic_conserved[a])) < 1e-10);
            for (std::size_t b = 0; b < 4; ++b) {
                const Complex jm = hs_inner(e.analytic_conserved[a], e.analytic_steady[b]);
                CHECK(std::abs(jm - (a == b ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }

    // omega -> 0 recovers the undriven basis.
    const models::CatalogEntry soft = models::driven_two_qubit(1e-9);
    const models::CatalogEntry base = models::two_qubit();
    for (std::size_t a = 0; a < 4; ++a) {
        CHECK(max_abs(soft.analytic_steady[a] - base.analytic_steady[a]) < 1e-8);
    }

    // Numeric nullspace matches the analytic span.
    const models::CatalogEntry e1 = models::driven_two_qubit(1.0);
    Liouvillian l1 = build_liouvillian(e1.model);
    const std::vector<Operator> numeric = steady_basis(l1);
    REQUIRE(numeric.size() == 4);
    CHECK(detail::subspace_angle_sin(stack_columns(numeric), stack_columns(e1.analytic_steady)) <
          1e-8);
}

TEST_CASE("driven two-qubit factorization into |mu><nu| x T") {
    const Operator u = models::driven_two_qubit_factorizer();
    CHECK(max_abs(Matrix(u.mat * u.mat.adjoint() - Matrix::Identity(4, 4))) < 1e-12);
    CHECK(max_abs(Matrix(u.mat - u.mat.adjoint())) < 1e-12);

    for (double omega : {0.3, 1.0, 3.0}) {
        const models::CatalogEntry e = models::driven_two_qubit(omega);
        const Matrix t = models::driven_two_qubit_factor(omega);
        CHECK(std::abs(t.norm() - 1.0) < 1e-12);
        for (int mu = 0; mu < 2; ++mu)
            for (int nu = 0; nu < 2; ++nu) {
                const Operator& mbar = e.analytic_steady[mu * 2 + nu];
                Matrix unit = Matrix::Zero(2, 2);
                unit(mu, nu) = 1.0;
                const Matrix rotated = u.mat * mbar.mat * u.mat;
                CHECK(max_abs(Matrix(rotated - kron_matrix(unit, t))) < 1e-12);
            }
    }
}

TEST_CASE("photon sector projectors and their DFT form") {
    const int d = 3, dim = 17;
    const Operator nhat = number_operator(dim);
    for (int mu = 0; mu < d; ++mu) {
        const Operator pi = models::photon_sector_projector(d, mu, dim);
        Matrix dft = Matrix::Zero(dim, dim);
        for (int nu = 0; nu < d; ++nu) {
            const Matrix arg = kImag * (2.0 * M_PI * nu / d) * (nhat.mat - mu * Matrix::Identity(dim, dim));
            Matrix expo = Matrix::Zero(dim, dim);
            for (int q = 0; q < dim; ++q) expo(q, q) = std::exp(arg(q, q));
            dft += expo / static_cast<double>(d);
        }
        CHECK(max_abs(Matrix(pi.mat - dft)) < 1e-12);
    }

    // Cyclic relation Pi_mu a = a Pi_{mu+1 mod d}.
    const Operator a = annihilation(dim);
    for (int mu = 0; mu < d; ++mu) {
        const Operator pi = models::photon_sector_projector(d, mu, dim);
        const Operator pi_next = models::photon_sector_projector(d, (mu + 1) % d, dim);
        CHECK(max_abs(pi * a - a * pi_next) < 1e-12);
    }
}

TEST_CASE("d-photon conserved quantities: double-factorial reduction at d=2") {
    // j_01(n) = (n-1)!!/n!! on even levels.
    for (int n = 2; n <= 20; n += 2) {
        const double expected = static_cast<double>(models::double_factorial(n - 1)) /
                                static_cast<double>(models::double_factorial(n));
        CHECK(models::d_photon_j(2, 0, 1, n) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(models::d_photon_j(2, 0, 1, 0) == doctest::Approx(1.0));

    const models::CatalogEntry e = models::d_photon(2, 16);
    const Operator j01 = e.analytic_conserved[1];
    // Explicit form (n-1)!!/n!! * Pi_0 * a.
    const Operator pi0 = models::photon_sector_projector(2, 0, 16);
    const Operator a = annihilation(16);
    Matrix dfac = Matrix::Zero(16, 16);
    for (int n = 0; n < 16; ++n) {
        dfac(n, n) = n == 0 ? 1.0
                            : (n % 2 == 0 ? static_cast<double>(models::double_factorial(n - 1)) /
                                                static_cast<double>(models::double_factorial(n))
                                          : 1.0);
    }
    const Matrix expected = dfac * (pi0.mat * a.mat);
    CHECK(max_abs(Matrix(j01.mat - expected)) < 1e-12);
}

TEST_CASE("d-photon truncated conservation is exact in the interior") {
    for (int d : {1, 2, 3}) {
        const int dim = d * d + d + 6;
        const models::CatalogEntry e = models::d_photon(d, dim);
        REQUIRE(static_cast<int>(e.analytic_conserved.size()) == d * d);
        Liouvillian l = build_liouvillian(e.model);
        for (const Operator& j : e.analytic_conserved) {
            const Operator resid = models::interior_project(heisenberg_apply_direct(e.model, j), 2 * d);
            CHECK(max_abs(resid) < 1e-11);
        }
        for (const Operator& m : e.analytic_steady) {
            CHECK(hs_norm(apply(l, m)) < 1e-11);
        }
    }
    CHECK_THROWS_AS(models::d_photon(3, 12), model_error);  // needs dim > d^2 + d
}

TEST_CASE("numeric and analytic spans coincide for the catalog") {
    struct Case {
        models::CatalogEntry entry;
        const char* name;
    };
    const Case cases[] = {
        {models::dephasing(), "dephasing"},
        {models::two_qubit(), "two_qubit"},
        {models::driven_two_qubit(0.7), "driven"},
        {models::d_photon(2, 14), "two_photon"},
        {models::d_photon(3, 16), "three_photon"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.name);
        Liouvillian l = build_liouvillian(c.entry.model);
        const std::vector<Operator> m_num = steady_basis(l);
        const std::vector<Operator> j_num = conserved_quantities(l);
        REQUIRE(m_num.size() == c.entry.analytic_steady.size());
        REQUIRE(j_num.size() == c.entry.analytic_conserved.size());
        CHECK(detail::subspace_angle_sin(stack_columns(m_num),
                                         stack_columns(c.entry.analytic_steady)) < 1e-8);
        CHECK(detail::subspace_angle_sin(stack_columns(j_num),
                                         stack_columns(c.entry.analytic_conserved)) < 1e-8);
    }
}

TEST_CASE("coherent-state steady coefficients: closed forms at d=2") {
    for (double re : {0.5, 1.0, 2.0}) {
        const Complex alpha(re, 0.0);
        const double x = std::norm(alpha);
        const Matrix rho = models::coherent_steady(2, alpha);
        CHECK(std::abs(rho(0, 0).real() - 0.5 * (1 + std::exp(-2 * x))) < 1e-12);
        CHECK(std::abs(rho(1, 1).real() - 0.5 * (1 - std::exp(-2 * x))) < 1e-12);
        const double expected01 = re * std::exp(-x) * bessel_i0(x);
        CHECK(std::abs(rho(0, 1) - Complex(expected01)) < 1e-10);
    }
}

TEST_CASE("coherent-state diagonals match the DFT closed form") {
    for (int d : {2, 3, 4}) {
        for (const Complex alpha : {Complex(0.7, 0.0), Complex(1.1, -0.6)}) {
            const Matrix rho = models::coherent_steady(d, alpha);
            for (int mu = 0; mu < d; ++mu) {
                CHECK(std::abs(rho(mu, mu).real() -
                               models::coherent_steady_diagonal_dft(d, alpha, mu)) < 1e-12);
                CHECK(std::abs(rho(mu, mu).imag()) < 1e-14);
            }
        }
    }
}

TEST_CASE("coherent-state output is a physical density matrix") {
    for (int d : {2, 3}) {
        for (const Complex alpha : {Complex(0.9, 0.4), Complex(2.0, -1.0)}) {
            const Matrix rho = models::coherent_steady(d, alpha);
            CHECK(max_abs(Matrix(rho - rho.adjoint())) < 1e-13);
            CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
            Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
            CHECK(es.eigenvalues().minCoeff() > -1e-12);
            for (int mu = 0; mu < d; ++mu)
                for (int nu = 0; nu < d; ++nu) {
                    CHECK(std::norm(rho(mu, nu)) <=
                          rho(mu, mu).real() * rho(nu, nu).real() + 1e-12);
                }
        }
    }
}

TEST_CASE("coherent-state phase is stored in the off-diagonals") {
    const int d = 3;
    const Complex alpha(1.3, 0.0);
    const Matrix base = models::coherent_steady(d, alpha);
    const double phi = 0.7;
    const Matrix rotated = models::coherent_steady(d, alpha * std::exp(kImag * phi));
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
            const Complex expected =
                base(mu, nu) * std::exp(-kImag * (phi * static_cast<double>(nu - mu)));
            CHECK(std::abs(rotated(mu, nu) - expected) < 1e-14);
        }
}

TEST_CASE("large-alpha limit distributes populations equally") {
    const Matrix rho = models::coherent_steady(4, Complex(6.0, 0.0));
    for (int mu = 0; mu < 4; ++mu) {
        CHECK(std::abs(rho(mu, mu).real() - 0.25) < 0.005);
    }
}

TEST_CASE("truncated coherent state: tail bound at the default heuristic cutoff") {
    for (double a : {0.8, 1.5, 2.0}) {
        const int cutoff = static_cast<int>(a * a + 10 * a + 20);
        double tail = 1.0;
        (void)models::coherent_state(cutoff, Complex(a, 0.0), &tail);
        CHECK(tail < 1e-12);
    }
}

TEST_CASE("series coefficients agree with the full nullspace machinery") {
    struct Case {
        int d;
        Complex alpha;
        int dim;
    };
    const Case cases[] = {
        {1, Complex(0.9, 0.3), 24},
        {2, Complex(1.2, -0.5), 26},
        {3, Complex(2.0, 0.0), 30},
    };
    for (const Case& c : cases) {
        CAPTURE(c.d);
        const models::CatalogEntry e = models::d_photon(c.d, c.dim);
        Liouvillian l = build_liouvillian(e.model);
        AsymptoticsOptions opts;
        opts.compute_rotating = false;
        opts.compute_gap = false;
        AsymptoticDecomposition dec = analyze_asymptotics(l, opts);

        double tail = 1.0;
        const DensityMatrix rho_in = models::coherent_state(c.dim, c.alpha, &tail);
        REQUIRE(tail < 1e-12);
        const DensityMatrix projected = asymptotic_project(dec, rho_in);
        const Matrix series = models::coherent_steady(c.d, c.alpha);
        for (int mu = 0; mu < c.d; ++mu)
            for (int nu = 0; nu < c.d; ++nu) {
                CHECK(std::abs(projected.op.mat(mu, nu) - series(mu, nu)) < 1e-6);
            }
    }
}

TEST_CASE("series guards") {
    CHECK_THROWS_AS(models::coherent_steady(0, Complex(1.0, 0.0)), model_error);
    CHECK_THROWS_AS(models::coherent_state(1, Complex(1.0, 0.0)), model_error);
}
