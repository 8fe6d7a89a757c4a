#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lindblad/operator_core.hpp"
#include "test_helpers.hpp"

using namespace lindblad;
using testing::random_density;
using testing::random_matrix;
using testing::random_operator;

TEST_CASE("vectorize follows the row-stacking convention") {
    HilbertSpace q = HilbertSpace::qubits(1);
    const Vector vi = vectorize(identity(q)).vec;
    CHECK(vi(0) == Complex(1));
    CHECK(vi(1) == Complex(0));
    CHECK(vi(2) == Complex(0));
    CHECK(vi(3) == Complex(1));

    const Vector v01 = vectorize(matrix_unit(q, 0, 1)).vec;
    CHECK(v01(0) == Complex(0));
    CHECK(v01(1) == Complex(1));
    CHECK(v01(2) == Complex(0));
    CHECK(v01(3) == Complex(0));
}

TEST_CASE("vectorize is a bijection and an isometry") {
    HilbertSpace s({{FactorKind::fock, 5}});
    std::mt19937_64 rng(42);
    for (int k = 0; k < 10; ++k) {
        const Operator a = random_operator(s, rng);
        const Operator back = devectorize(vectorize(a));
        CHECK(max_abs(Matrix(a.mat - back.mat)) == 0.0);  // exact round-trip
        CHECK(std::abs(vectorize(a).vec.squaredNorm() - hs_inner(a, a).real()) < 1e-12);
    }
}

TEST_CASE("conjugation superoperator: (F x F*) vec(rho) = vec(F rho Fdag)") {
    HilbertSpace s({{FactorKind::fock, 3}});
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Matrix f = random_matrix(rng, 3);
        const Matrix rho = random_matrix(rng, 3);
        const Vector lhs = kron_matrix(f, f.conjugate()) * vectorize_matrix(rho);
        const Vector rhs = vectorize_matrix(Matrix(f * rho * f.adjoint()));
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("row-stacking identity vec(AXB) = (A x B^T) vec(X)") {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Matrix a = random_matrix(rng, 4), x = random_matrix(rng, 4), b = random_matrix(rng, 4);
        const Vector lhs = vectorize_matrix(Matrix(a * x * b));
        const Vector rhs = kron_matrix(a, b.transpose()) * vectorize_matrix(x);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("hs_inner basics") {
    HilbertSpace s({{FactorKind::fock, 4}});
    CHECK(hs_inner(identity(s), identity(s)) == Complex(4));
    CHECK(std::abs(hs_inner(pauli_x(), pauli_y())) == 0.0);

    std::mt19937_64 rng(3);
    HilbertSpace s3({{FactorKind::fock, 3}});
    const Operator a = random_operator(s3, rng), b = random_operator(s3, rng);
    Complex direct = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) direct += std::conj(a.mat(i, j)) * b.mat(i, j);
    CHECK(std::abs(hs_inner(a, b) - direct) < 1e-12);
    CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) < 1e-12);

    HilbertSpace s4({{FactorKind::fock, 4}});
    CHECK_THROWS_AS((void)hs_inner(a, identity(s4)), model_error);
}

TEST_CASE("kron: identities, diagonal case, mixed-product property") {
    const Operator i2 = identity(HilbertSpace::qubits(1));
    CHECK(max_abs(Matrix(kron(i2, i2).mat - Matrix::Identity(4, 4))) == 0.0);

    const Operator zi = kron(pauli_z(), i2);
    Matrix diag = Matrix::Zero(4, 4);
    diag.diagonal() << 1, 1, -1, -1;
    CHECK(max_abs(Matrix(zi.mat - diag)) == 0.0);

    std::mt19937_64 rng(5);
    const Matrix a = random_matrix(rng, 2), b = random_matrix(rng, 2);
    const Matrix c = random_matrix(rng, 2), d = random_matrix(rng, 2);
    const Matrix lhs = kron_matrix(a, b) * kron_matrix(c, d);
    const Matrix rhs = kron_matrix(Matrix(a * c), Matrix(b * d));
    CHECK(max_abs(Matrix(lhs - rhs)) < 1e-13);
}

TEST_CASE("embed pads with identities and commutes across sites") {
    HilbertSpace qq = HilbertSpace::qubits(2);
    CHECK(max_abs(Matrix(embed(1, pauli_x(), qq).mat -
                         kron(identity(HilbertSpace::qubits(1)), pauli_x()).mat)) == 0.0);
    CHECK(max_abs(Matrix((embed(0, pauli_z(), qq) * embed(1, pauli_z(), qq)).mat -
                         kron(pauli_z(), pauli_z()).mat)) == 0.0);

    std::mt19937_64 rng(9);
    HilbertSpace qf({{FactorKind::qubit, 2}, {FactorKind::fock, 3}});
    for (int k = 0; k < 5; ++k) {
        const Operator a{HilbertSpace::qubits(1), random_matrix(rng, 2)};
        const Operator b{HilbertSpace::fock(3), random_matrix(rng, 3)};
        const Operator comm = commutator(embed(0, a, qf), embed(1, b, qf));
        CHECK(max_abs(comm) < 1e-13);
    }
    CHECK(max_abs(Matrix(embed(1, identity(HilbertSpace::fock(3)), qf).mat -
                         identity(qf).mat)) == 0.0);

    CHECK_THROWS_AS(embed(2, pauli_x(), qq), model_error);
    CHECK_THROWS_AS(embed(1, identity(HilbertSpace::fock(3)), qq), model_error);
}

TEST_CASE("annihilation operator on the truncated Fock space") {
    const Operator a2 = annihilation(2);
    CHECK(a2.mat(0, 1) == Complex(1));
    CHECK(max_abs(Matrix(a2.mat - (Matrix(2, 2) << 0, 1, 0, 0).finished())) == 0.0);

    const int dim = 7;
    const Operator a = annihilation(dim);
    const Operator n = a.dagger() * a;
    for (int k = 0; k < dim; ++k) CHECK(std::abs(n.mat(k, k) - Complex(k)) < 1e-14);

    // Truncation artifact is localized to the top level.
    const Operator comm = commutator(a, a.dagger());
    Matrix expected = Matrix::Identity(dim, dim);
    expected(dim - 1, dim - 1) = 1.0 - dim;
    CHECK(max_abs(Matrix(comm.mat - expected)) < 1e-13);

    for (int m = 0; m < dim; ++m)
        for (int k = 0; k < dim; ++k) {
            const Complex expect = (m == k - 1) ? Complex(std::sqrt(double(k))) : Complex(0);
            CHECK(a.mat(m, k) == expect);
        }
}

TEST_CASE("partial trace") {
    std::mt19937_64 rng(13);
    HilbertSpace q = HilbertSpace::qubits(1);
    HilbertSpace f3 = HilbertSpace::fock(3);
    const Operator rho = random_operator(q, rng);
    const Operator sigma = random_operator(f3, rng);
    const Operator joint = kron(rho, sigma);

    const Operator kept = partial_trace(joint, {0});
    CHECK(max_abs(Matrix(kept.mat - sigma.trace() * rho.mat)) < 1e-12);

    // Tracing the identity redistributes the full trace onto the kept factor.
    const Operator id_trace = partial_trace(identity(joint.space), {1});
    CHECK(max_abs(Matrix(id_trace.mat - 2.0 * Matrix::Identity(3, 3))) < 1e-13);

    HilbertSpace qq = HilbertSpace::qubits(2);
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const DensityMatrix phi = DensityMatrix::pure(qq, bell);
    const Operator reduced = partial_trace(phi.op, {0});
    CHECK(max_abs(Matrix(reduced.mat - 0.5 * Matrix::Identity(2, 2))) < 1e-12);

    CHECK(std::abs(partial_trace(joint, {1}).trace() - joint.trace()) < 1e-12);
    CHECK_THROWS_AS(partial_trace(joint, {}), model_error);
}

TEST_CASE("density matrix validation") {
    HilbertSpace q = HilbertSpace::qubits(1);
    CHECK_NOTHROW(DensityMatrix::from_operator(0.5 * identity(q)));

    Matrix bad(2, 2);
    bad << 0.5, 0.3, 0.1, 0.5;  // not Hermitian
    CHECK_THROWS_AS(DensityMatrix::from_operator(Operator{q, bad}), numerical_error);

    CHECK_THROWS_AS(DensityMatrix::from_operator(identity(q)), numerical_error);  // trace 2

    Matrix neg(2, 2);
    neg << 1.5, 0, 0, -0.5;  // negative eigenvalue
    CHECK_THROWS_AS(DensityMatrix::from_operator(Operator{q, neg}), numerical_error);
}

TEST_CASE("trace distance") {
    HilbertSpace q = HilbertSpace::qubits(1);
    const Operator z = pauli_z();
    const DensityMatrix up = DensityMatrix::from_operator(0.5 * (identity(q) + z));
    const DensityMatrix dn = DensityMatrix::from_operator(0.5 * (identity(q) - z));
    CHECK(trace_distance(up.op, dn.op) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_distance(up.op, up.op) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("space validation") {
    CHECK_THROWS_AS(HilbertSpace({{FactorKind::qubit, 3}}), model_error);
    CHECK_THROWS_AS(HilbertSpace({{FactorKind::fock, 1}}), model_error);
    CHECK_THROWS_AS(HilbertSpace(std::vector<Factor>{}), model_error);
    CHECK_THROWS_AS(annihilation(1), model_error);
    CHECK_THROWS_AS(pow(pauli_x(), -1), model_error);
}
