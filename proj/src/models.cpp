// models.cpp — Worked-example catalog

#include "lindblad/models.hpp"

#include <cmath>
#include <limits>

namespace lindblad::models {

namespace {

constexpr Complex kImag{0.0, 1.0};

void check_nonnegative(int m, const char* what) {
    if (m < 0) throw model_error(std::string(what) + ": negative argument");
}

}  // namespace

std::int64_t double_factorial(int m) {
    check_nonnegative(m, "double_factorial");
    std::int64_t r = 1;
    for (int k = m; k > 1; k -= 2) {
        if (__builtin_mul_overflow(r, static_cast<std::int64_t>(k), &r)) {
            throw model_error("double_factorial: overflow at " + std::to_string(m));
        }
    }
    return r;
}

std::int64_t falling_factorial(std::int64_t x, int n) {
    check_nonnegative(n, "falling_factorial");
    std::int64_t r = 1;
    for (int k = 0; k < n; ++k) {
        if (__builtin_mul_overflow(r, x - k, &r)) {
            throw model_error("falling_factorial: overflow");
        }
    }
    return r;
}

double falling_factorial_real(double x, int n) {
    check_nonnegative(n, "falling_factorial_real");
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x - k;
    return r;
}

CatalogEntry dephasing() {
    HilbertSpace space = HilbertSpace::qubits(1);
    Model model("dephasing", space, zero(space), {pauli_z()});
    CatalogEntry entry{std::move(model), {}, {}, {"pointer basis: the Z eigenstates"}};
    for (int mu = 0; mu < 2; ++mu) {
        entry.analytic_steady.push_back(matrix_unit(space, mu, mu));
        entry.analytic_conserved.push_back(matrix_unit(space, mu, mu));
    }
    return entry;
}

namespace {

struct TwoQubitOps {
    HilbertSpace space = HilbertSpace::qubits(2);
    Operator id = identity(space);
    Operator x1 = embed(0, pauli_x(), space);
    Operator y1 = embed(0, pauli_y(), space);
    Operator z1 = embed(0, pauli_z(), space);
    Operator x2 = embed(1, pauli_x(), space);
    Operator y2 = embed(1, pauli_y(), space);
    Operator z2 = embed(1, pauli_z(), space);

    Operator jump() const { return (0.5 * (id - z1 * z2)) * x2; }

    std::vector<Operator> steady() const {
        const Operator m00 = 0.25 * ((id + z1) * (id - z2));
        const Operator m11 = 0.25 * ((id - z1) * (id + z2));
        const Operator m01 = 0.25 * ((x1 + kImag * y1) * (x2 - kImag * y2));
        return {m00, m01, m01.dagger(), m11};
    }

    std::vector<Operator> conserved() const {
        const Operator j00 = 0.5 * (id + z1);
        const Operator j01 = (0.5 * (x1 + kImag * y1)) * x2;
        return {j00, j01, j01.dagger(), id - j00};
    }
};

}  // namespace

CatalogEntry two_qubit() {
    TwoQubitOps ops;
    Model model("two_qubit", ops.space, zero(ops.space), {ops.jump()});
    return CatalogEntry{std::move(model), ops.steady(), ops.conserved(),
                        {"DFS spanned by the odd-parity Bell states",
                         "diagonal conserved quantities are the Z1 parity projectors"}};
}

CatalogEntry driven_two_qubit(double omega) {
    TwoQubitOps ops;
    Model model("driven_two_qubit", ops.space, omega * ops.x2, {ops.jump()});

    const double zeta = std::sqrt(2 * std::pow(omega, 4) + 4 * omega * omega + 1);
    const std::vector<Operator> m = ops.steady();
    const Operator m00 =
        (1.0 / zeta) * (m[0] + (0.5 * omega) * ((ops.id + ops.z1) * (omega * ops.id + ops.y2)));
    const Operator m11 =
        (1.0 / zeta) * (m[3] + (0.5 * omega) * ((ops.id - ops.z1) * (omega * ops.id - ops.y2)));
    const Operator m01 = (1.0 / zeta) * (m[1] + (0.5 * omega) * ((ops.x1 + kImag * ops.y1) *
                                                                 (omega * ops.x2 - kImag * ops.z2)));

    std::vector<Operator> conserved = ops.conserved();
    const double scale = zeta / (2 * omega * omega + 1);
    for (Operator& j : conserved) j = scale * j;

    return CatalogEntry{std::move(model),
                        {m00, m01, m01.dagger(), m11},
                        std::move(conserved),
                        {"noiseless subsystem: the drive spreads the DFS over both Bell sectors"}};
}

Operator driven_two_qubit_factorizer() {
    TwoQubitOps ops;
    return 0.5 * (ops.id + ops.z1 * (ops.x2 - ops.id) + ops.x2);
}

Matrix driven_two_qubit_factor(double omega) {
    const double zeta = std::sqrt(2 * std::pow(omega, 4) + 4 * omega * omega + 1);
    Matrix t(2, 2);
    t(0, 0) = 1 + omega * omega;
    t(0, 1) = kImag * omega;
    t(1, 0) = -kImag * omega;
    t(1, 1) = omega * omega;
    return t / zeta;
}

Operator photon_sector_projector(int d, int mu, int dim) {
    if (d < 1 || mu < 0 || mu >= d) throw model_error("photon_sector_projector: bad sector");
    Matrix p = Matrix::Zero(dim, dim);
    for (int q = mu; q < dim; q += d) p(q, q) = 1.0;
    return {HilbertSpace::fock(dim), std::move(p)};
}

double d_photon_j(int d, int mu, int nu, int q) {
    if (mu > nu) throw model_error("d_photon_j: requires mu <= nu");
    if (q < mu || (q - mu) % d != 0) throw model_error("d_photon_j: level not in sector");
    const int s = nu - mu;
    double j = 1.0;
    for (int p = 0; p < (q - mu) / d; ++p) {
        const double lo = falling_factorial_real(static_cast<double>(d) * p + nu, s);
        const double hi = falling_factorial_real(static_cast<double>(d) * p + nu + d, s);
        j *= 2.0 * lo / (lo + hi);
    }
    return j;
}

CatalogEntry d_photon(int d, int dim) {
    if (d < 1) throw model_error("d_photon: d must be positive");
    if (dim <= d * d + d) {
        throw model_error("d_photon: truncation " + std::to_string(dim) +
                          " too small, need dim > d^2 + d = " + std::to_string(d * d + d));
    }
    HilbertSpace space = HilbertSpace::fock(dim);
    const Operator a = annihilation(dim);
    Model model("d_photon", space, zero(space), {pow(a, d)});

    CatalogEntry entry{std::move(model), {}, {}, {"steady sector: the lowest d Fock levels"}};
    for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) {
            entry.analytic_steady.push_back(matrix_unit(space, mu, nu));
            if (mu > nu) {
                // J_νμ = J_μν† keeps the list dagger-closed.
                const std::size_t mirror = static_cast<std::size_t>(nu) * d + mu;
                entry.analytic_conserved.push_back(entry.analytic_conserved[mirror].dagger());
                continue;
            }
            const int s = nu - mu;
            const double norm = std::sqrt(falling_factorial_real(nu, s));
            Matrix j = Matrix::Zero(dim, dim);
            for (int q = mu; q + s < dim; q += d) {
                j(q, q + s) =
                    d_photon_j(d, mu, nu, q) *
                    std::sqrt(falling_factorial_real(static_cast<double>(q) + s, s)) / norm;
            }
            entry.analytic_conserved.push_back(Operator{space, std::move(j)});
        }
    }
    return entry;
}

Operator interior_project(const Operator& a, int margin) {
    if (margin < 0) throw model_error("interior_project: negative margin");
    const int n = a.dim();
    const int keep = std::max(0, n - margin);
    Matrix m = Matrix::Zero(n, n);
    m.topLeftCorner(keep, keep) = a.mat.topLeftCorner(keep, keep);
    return {a.space, std::move(m)};
}

Matrix coherent_steady(int d, Complex alpha) {
    if (d < 1) throw model_error("coherent_steady: d must be positive");
    const double x = std::norm(alpha);
    Matrix rho(d, d);
    for (int mu = 0; mu < d; ++mu) {
        for (int nu = mu; nu < d; ++nu) {
            const int s = nu - mu;
            // term_n = j_μν(dn+μ)·x^{dn+μ}/(dn+μ)!, accumulated with running
            // ratios so neither the factorial nor j is ever formed raw.
            double term = std::pow(x, mu);
            for (int k = 2; k <= mu; ++k) term /= k;
            double sum = 0.0;
            int n = 0;
            while (true) {
                sum += term;
                if (n > 10000) {
                    throw numerical_error("coherent_steady: series did not converge");
                }
                const int q = d * n + mu;
                if (q > x && std::abs(term) < 1e-14 * std::abs(sum)) break;
                double ratio = 1.0;
                const double lo = falling_factorial_real(static_cast<double>(d) * n + nu, s);
                const double hi = falling_factorial_real(static_cast<double>(d) * n + nu + d, s);
                ratio *= 2.0 * lo / (lo + hi);
                for (int k = q + 1; k <= q + d; ++k) ratio *= x / k;
                term *= ratio;
                ++n;
            }
            const Complex phase = s == 0 ? Complex(1.0) : std::pow(std::conj(alpha), s);
            const Complex value =
                phase * std::exp(-x) * sum / std::sqrt(falling_factorial_real(nu, s));
            rho(mu, nu) = value;
            rho(nu, mu) = std::conj(value);
        }
    }
    return rho;
}

double coherent_steady_diagonal_dft(int d, Complex alpha, int mu) {
    if (d < 1 || mu < 0 || mu >= d) throw model_error("coherent_steady_diagonal_dft: bad sector");
    const double x = std::norm(alpha);
    Complex sum = 0.0;
    for (int nu = 0; nu < d; ++nu) {
        const Complex w = std::exp(kImag * (2.0 * M_PI * nu / d));
        sum += std::exp(-kImag * (2.0 * M_PI * mu * nu / d)) * std::exp(x * (w - 1.0));
    }
    return (sum / static_cast<double>(d)).real();
}

DensityMatrix coherent_state(int dim, Complex alpha, double* tail_mass) {
    if (dim < 2) throw model_error("coherent_state: dim must be >= 2");
    Vector ket(dim);
    const double x = std::norm(alpha);
    Complex c = std::exp(Complex(-0.5 * x));
    double kept = 0.0;
    for (int n = 0; n < dim; ++n) {
        ket(n) = c;
        kept += std::norm(c);
        c *= alpha / std::sqrt(static_cast<double>(n) + 1.0);
    }
    if (tail_mass != nullptr) *tail_mass = std::max(0.0, 1.0 - kept);
    return DensityMatrix::pure(HilbertSpace::fock(dim), ket);
}

}  // namespace lindblad::models
