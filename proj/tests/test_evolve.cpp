#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lindblad/evolve.hpp"
#include "lindblad/models.hpp"
#include "test_helpers.hpp"

using namespace lindblad;
using testing::random_density;
using testing::random_operator;

TEST_CASE("propagation basics") {
    Liouvillian l = build_liouvillian(models::dephasing().model);
    const HilbertSpace& q = l.space();

    const Propagator p0(l, 0.0);
    CHECK(max_abs(Matrix(p0.matrix() - Matrix::Identity(4, 4))) < 1e-14);

    std::mt19937_64 rng(3);
    const DensityMatrix rho = random_density(q, rng);
    CHECK_THROWS_AS(propagate(l, rho, -0.5), model_error);

    // Dephasing coherence decays as exp(-4t) while populations freeze.
    Vector plus(2);
    plus << 1, 1;
    const DensityMatrix rho_plus = DensityMatrix::pure(q, plus);
    for (double t : {0.1, 0.3, 0.7}) {
        const DensityMatrix rt = propagate(l, rho_plus, t);
        CHECK(std::abs(rt.op.mat(0, 1) - 0.5 * std::exp(-4.0 * t)) < 1e-12);
        CHECK(std::abs(rt.op.mat(0, 0) - 0.5) < 1e-12);
    }
}

TEST_CASE("semigroup property and trace preservation") {
    Liouvillian l = build_liouvillian(models::two_qubit().model);
    const Propagator pa(l, 0.4), pb(l, 1.1), pab(l, 1.5);
    CHECK(max_abs(Matrix(pa.matrix() * pb.matrix() - pab.matrix())) < 1e-9);

    std::mt19937_64 rng(9);
    for (int k = 0; k < 10; ++k) {
        const DensityMatrix rho = random_density(l.space(), rng);
        for (double t : {0.2, 2.0, 8.0}) {
            const DensityMatrix rt = propagate(l, rho, t);
            CHECK(std::abs(rt.op.trace() - Complex(1.0)) < 1e-10);
        }
    }
}

TEST_CASE("Heisenberg propagation: identity fixed, duality with the state picture") {
    Liouvillian l = build_liouvillian(models::driven_two_qubit(0.5).model);
    const HilbertSpace& s = l.space();
    for (double t : {0.5, 3.0}) {
        CHECK(max_abs(heisenberg_propagate(l, identity(s), t) - identity(s)) < 1e-10);
    }
    std::mt19937_64 rng(15);
    for (int k = 0; k < 10; ++k) {
        const Operator x = random_operator(s, rng);
        const DensityMatrix rho = random_density(s, rng);
        const double t = 0.8;
        const Complex lhs = hs_inner(x, propagate(l, rho, t).op);
        const Complex rhs = hs_inner(heisenberg_propagate(l, x, t), rho.op);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("convergence profile: steady inputs sit at the target") {
    Liouvillian l = build_liouvillian(models::two_qubit().model);
    AsymptoticDecomposition dec = analyze_asymptotics(l);
    Vector psi_plus = Vector::Zero(4);
    psi_plus(1) = psi_plus(2) = 1.0 / std::sqrt(2.0);
    const DensityMatrix steady = DensityMatrix::pure(l.space(), psi_plus);
    const auto profile = convergence_profile(l, dec, steady, {0.0, 0.5, 1.0, 2.0});
    for (const auto& [t, dist] : profile) CHECK(dist < 1e-10);
}

TEST_CASE("late-time log-distance slope equals the negative dissipation gap") {
    std::mt19937_64 rng(21);

    auto fitted_slope = [&](const Model& m, const std::vector<double>& times) {
        Liouvillian l = build_liouvillian(m);
        AsymptoticDecomposition dec = analyze_asymptotics(l);
        const DensityMatrix rho = random_density(l.space(), rng);
        const auto profile = convergence_profile(l, dec, rho, times);
        // Least-squares line through (t, log d).
        double st = 0, sl = 0, stt = 0, stl = 0;
        for (const auto& [t, d] : profile) {
            REQUIRE(d > 0.0);
            st += t;
            sl += std::log(d);
            stt += t * t;
            stl += t * std::log(d);
        }
        const double n = static_cast<double>(profile.size());
        return std::make_pair((n * stl - st * sl) / (n * stt - st * st), dec.gap);
    };

    const auto [slope_a, gap_a] = fitted_slope(models::dephasing().model, {1.0, 1.5, 2.0, 2.5});
    CHECK(std::abs(slope_a + 4.0) < 0.4);
    CHECK(gap_a == doctest::Approx(4.0).epsilon(1e-9));

    // Non-diagonalizable sectors decay as t^k exp(-gap t); the pure
    // exponential slope emerges once gap*t is well past the polynomial range.
    Liouvillian l2 = build_liouvillian(models::d_photon(2, 30).model);
    AsymptoticDecomposition dec2 = analyze_asymptotics(l2);
    const double t0 = 12.0 / dec2.gap;
    const double h = 2.0 / dec2.gap;
    const DensityMatrix rho2 = random_density(l2.space(), rng);
    const auto profile2 = convergence_profile(l2, dec2, rho2, {t0, t0 + h, t0 + 2 * h, t0 + 3 * h});
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (const auto& [t, d] : profile2) {
        REQUIRE(d > 0.0);
        st += t;
        sl += std::log(d);
        stt += t * t;
        stl += t * std::log(d);
    }
    const double n = 4.0;
    const double slope = (n * stl - st * sl) / (n * stt - st * st);
    CHECK(std::abs(slope + dec2.gap) < 0.1 * dec2.gap);
}

TEST_CASE("distances to the limit set are non-increasing after the transient") {
    Liouvillian l = build_liouvillian(models::driven_two_qubit(1.0).model);
    AsymptoticDecomposition dec = analyze_asymptotics(l);
    std::mt19937_64 rng(25);
    const DensityMatrix rho = random_density(l.space(), rng);
    const auto profile =
        convergence_profile(l, dec, rho, {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0});
    for (std::size_t k = 1; k < profile.size(); ++k) {
        CHECK(profile[k].second <= profile[k - 1].second + 1e-9);
    }
}

TEST_CASE("trace-distance contraction between propagated pairs") {
    std::mt19937_64 rng(27);
    for (const Model& m : {models::dephasing().model, models::two_qubit().model,
                           models::d_photon(2, 10).model}) {
        Liouvillian l = build_liouvillian(m);
        for (int k = 0; k < 10; ++k) {
            const DensityMatrix a = random_density(m.space, rng);
            const DensityMatrix b = random_density(m.space, rng);
            double last = trace_distance(a.op, b.op);
            for (double t : {0.3, 0.9, 2.0}) {
                const double d =
                    trace_distance(propagate(l, a, t).op, propagate(l, b, t).op);
                CHECK(d <= last + 1e-9);
                last = d;
            }
        }
    }
}

TEST_CASE("complete positivity spot check via the Choi matrix") {
    for (const Model& m : {models::dephasing().model, models::two_qubit().model}) {
        Liouvillian l = build_liouvillian(m);
        const int n = m.space.dim();
        const Propagator p(l, 0.7);
        Matrix choi = Matrix::Zero(n * n, n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Operator moved = p.apply(matrix_unit(m.space, i, j));
                // Choi block (i,j) holds the image of |i><j|.
                choi.block(i * n, j * n, n, n) = moved.mat;
            }
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (choi + choi.adjoint()));
        CHECK(es.eigenvalues().minCoeff() > -1e-8);
    }
}
