// cli.cpp — Subcommand implementations and report formatting

#include "lindblad/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lindblad/asymptotics.hpp"
#include "lindblad/evolve.hpp"
#include "lindblad/liouvillian.hpp"
#include "lindblad/models.hpp"
#include "lindblad/modelspec.hpp"
#include "lindblad/operator_core.hpp"
#include "lindblad/structure.hpp"

namespace lindblad::cli {

namespace {

std::string human(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string machine(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void print_matrix(std::ostream& out, const Matrix& m, const std::string& indent,
                  bool machine_precision = false) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << indent;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const Complex v = m(i, j);
            out << (j ? " " : "") << "("
                << (machine_precision ? machine(v.real()) : human(v.real())) << ","
                << (machine_precision ? machine(v.imag()) : human(v.imag())) << ")";
        }
        out << "\n";
    }
}

struct LoadedModel {
    Model model;
    std::string hash;
};

LoadedModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw model_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return {parse_model_text(text, path), fnv1a_hash(text)};
}

DensityMatrix parse_state(const Model& model, const std::string& spec) {
    const HilbertSpace& space = model.space;
    if (spec.rfind("ket(", 0) == 0 && spec.back() == ')') {
        const std::string digits = spec.substr(4, spec.size() - 5);
        if (static_cast<int>(digits.size()) != space.factor_count()) {
            throw model_error("state '" + spec + "': expected one digit per factor (" +
                              std::to_string(space.factor_count()) + ")");
        }
        int index = 0;
        for (int s = 0; s < space.factor_count(); ++s) {
            if (!std::isdigit(static_cast<unsigned char>(digits[s]))) {
                throw model_error("state '" + spec + "': non-digit label");
            }
            const int level = digits[s] - '0';
            if (level >= space.factor(s).dim) {
                throw model_error("state '" + spec + "': level " + std::to_string(level) +
                                  " out of range for factor " + std::to_string(s));
            }
            index = index * space.factor(s).dim + level;
        }
        Vector ket = Vector::Zero(space.dim());
        ket(index) = 1.0;
        return DensityMatrix::pure(space, ket);
    }
    if (spec.rfind("coherent(", 0) == 0 && spec.back() == ')') {
        if (space.factor_count() != 1 || space.factor(0).kind != FactorKind::fock) {
            throw model_error("coherent states require a single-fock-mode model");
        }
        const std::string body = spec.substr(9, spec.size() - 10);
        double re = 0.0, im = 0.0;
        if (std::sscanf(body.c_str(), "%lf,%lf", &re, &im) != 2) {
            throw model_error("state '" + spec + "': expected coherent(re,im)");
        }
        double tail = 0.0;
        DensityMatrix rho = models::coherent_state(space.dim(), Complex(re, im), &tail);
        if (tail >= 1e-12) {
            throw numerical_error("coherent state tail mass " + std::to_string(tail) +
                                  " exceeds 1e-12; increase the Fock truncation");
        }
        return rho;
    }
    // Otherwise a JSON matrix file: array of rows, entries either numbers or
    // [re, im] pairs.
    std::ifstream in(spec, std::ios::binary);
    if (!in) throw model_error("state '" + spec + "': not a recognized spec or readable file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw model_error("state file '" + spec + "': " + e.what());
    }
    const int n = space.dim();
    if (!doc.is_array() || static_cast<int>(doc.size()) != n) {
        throw model_error("state file '" + spec + "': expected " + std::to_string(n) + " rows");
    }
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        if (!doc[i].is_array() || static_cast<int>(doc[i].size()) != n) {
            throw model_error("state file '" + spec + "': row " + std::to_string(i) +
                              " must have " + std::to_string(n) + " entries");
        }
        for (int j = 0; j < n; ++j) {
            const auto& e = doc[i][j];
            if (e.is_number()) {
                m(i, j) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw model_error("state file '" + spec + "': entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") must be a number or [re, im]");
            }
        }
    }
    return DensityMatrix::from_operator(Operator{space, std::move(m)},
                                        DensityTolerances{1e-9, 1e-9, -1e-9});
}

struct AnalyzeOptions {
    double tol = 1e-9;
    unsigned seed = 0x1db7ad;
    int interior_margin = 0;
};

std::string analyze_one(const std::string& path, const AnalyzeOptions& opts) {
    std::ostringstream out;
    LoadedModel lm = load(path);
    Liouvillian liouvillian = build_liouvillian(lm.model);
    const Spectrum spec = spectrum(liouvillian);
    AsymptoticsOptions aopts;
    aopts.svd_rtol = opts.tol;
    aopts.seed = opts.seed;
    AsymptoticDecomposition dec;
    dec.steady_basis = steady_basis(liouvillian, aopts.svd_rtol);
    dec.conserved = biorthogonalize(dec.steady_basis,
                                    conserved_quantities(liouvillian, aopts.svd_rtol));
    dec.rotating = rotating_from_spectrum(spec, aopts.cluster_rtol);
    dec.gap = spec.gap;

    BlockOptions bopts;
    bopts.seed = opts.seed;
    BlockStructure blocks = block_structure(dec, liouvillian, bopts);
    if (!dec.rotating.empty()) extract_rotation_hamiltonian(dec.rotating, blocks);

    double steady_resid = 0.0, conserved_resid = 0.0, biorth_resid = 0.0;
    for (const Operator& m : dec.steady_basis) {
        steady_resid = std::max(steady_resid, hs_norm(apply(liouvillian, m)));
    }
    for (std::size_t mu = 0; mu < dec.conserved.size(); ++mu) {
        const Operator resid = models::interior_project(
            heisenberg_apply_direct(lm.model, dec.conserved[mu]), opts.interior_margin);
        conserved_resid = std::max(conserved_resid, hs_norm(resid));
        for (std::size_t nu = 0; nu < dec.steady_basis.size(); ++nu) {
            const Complex g = hs_inner(dec.conserved[mu], dec.steady_basis[nu]);
            biorth_resid = std::max(biorth_resid, std::abs(g - (mu == nu ? 1.0 : 0.0)));
        }
    }

    out << "model: " << lm.model.name << "\n";
    out << "hash: " << lm.hash << "\n";
    out << "hilbert dim: " << lm.model.space.dim() << "\n";
    out << "liouville dim: " << liouvillian.liouville_dim() << "\n";
    out << "steady dimension D: " << dec.steady_dimension() << "\n";
    out << "rotating pairs: " << dec.rotating.size() << "\n";
    out << "dissipation gap: " << human(dec.gap) << "\n";
    out << "blocks (kappa: n m | energies):\n";
    for (std::size_t k = 0; k < blocks.blocks.size(); ++k) {
        const Block& b = blocks.blocks[k];
        out << "  " << k << ": n=" << b.n << " m=" << b.m << " | energies:";
        for (double e : b.energies) out << " " << human(e);
        out << "\n";
    }
    for (std::size_t k = 0; k < blocks.blocks.size(); ++k) {
        out << "factor state T(" << k << "):\n";
        print_matrix(out, blocks.blocks[k].factor_state, "  ");
    }
    out << "eigenvalues (re im):\n";
    for (const Complex& ev : spec.eigenvalues) {
        out << "  " << human(ev.real()) << " " << human(ev.imag()) << "\n";
    }
    out << "residuals:\n";
    out << "  steady max ||L(M)||: " << human(steady_resid) << " (tol "
        << human(spec.zero_tolerance) << ")\n";
    out << "  conserved max ||Ldag(J)||: " << human(conserved_resid) << " (tol "
        << human(spec.zero_tolerance) << ", interior margin " << opts.interior_margin << ")\n";
    out << "  biorthogonality: " << human(biorth_resid) << " (tol 1e-09)\n";
    out << "  block reconstruction: " << human(blocks.reconstruction_residual)
        << " (tol 1e-08)\n";
    return out.str();
}

int cmd_analyze(const std::vector<std::string>& paths, const AnalyzeOptions& opts,
                const std::string& out_path, std::ostream& out) {
    std::vector<std::future<std::string>> jobs;
    jobs.reserve(paths.size());
    for (const std::string& p : paths) {
        jobs.push_back(std::async(paths.size() > 1 ? std::launch::async : std::launch::deferred,
                                  [&opts, p] { return analyze_one(p, opts); }));
    }
    std::ostringstream all;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (i) all << "\n";
        all << jobs[i].get();
    }
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw model_error("cannot write '" + out_path + "'");
        f << all.str();
    } else {
        out << all.str();
    }
    return 0;
}

int cmd_spectrum(const std::string& path, const std::string& csv_path, std::ostream& out) {
    LoadedModel lm = load(path);
    Liouvillian liouvillian = build_liouvillian(lm.model);
    const Spectrum spec = spectrum(liouvillian);

    std::ostringstream csv;
    csv << "re,im\n";
    for (const Complex& ev : spec.eigenvalues) {
        csv << machine(ev.real()) << "," << machine(ev.imag()) << "\n";
    }
    if (!csv_path.empty() && csv_path != "-") {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw model_error("cannot write '" + csv_path + "'");
        f << csv.str();
        out << "model: " << lm.model.name << "\n";
        out << "eigenvalues: " << spec.eigenvalues.size() << "\n";
        out << "dissipation gap: " << human(spec.gap) << "\n";
        out << "csv: " << csv_path << "\n";
    } else {
        out << csv.str();
    }
    return 0;
}

int cmd_predict(const std::string& path, const std::string& state_spec, double time,
                bool has_time, double tol, std::ostream& out) {
    LoadedModel lm = load(path);
    Liouvillian liouvillian = build_liouvillian(lm.model);
    AsymptoticsOptions aopts;
    aopts.svd_rtol = tol;
    AsymptoticDecomposition dec = analyze_asymptotics(liouvillian, aopts);
    const DensityMatrix rho_in = parse_state(lm.model, state_spec);
    const DensityMatrix rho =
        has_time ? infinite_time_state(dec, rho_in, time) : asymptotic_project(dec, rho_in);

    out << "model: " << lm.model.name << "\n";
    out << "state: " << state_spec << "\n";
    out << "steady dimension D: " << dec.steady_dimension() << "\n";
    out << "rotating pairs: " << dec.rotating.size() << "\n";
    if (has_time) out << "time: " << machine(time) << "\n";
    out << "coefficients Tr{Jdag rho_in} (mu re im):\n";
    for (std::size_t mu = 0; mu < dec.conserved.size(); ++mu) {
        const Complex c = hs_inner(dec.conserved[mu], rho_in.op);
        out << "  " << mu << " " << machine(c.real()) << " " << machine(c.imag()) << "\n";
    }
    if (has_time) {
        out << "rotating coefficients (frequency re im):\n";
        for (const RotatingPair& r : dec.rotating) {
            const Complex c = hs_inner(r.dual, rho_in.op);
            out << "  " << machine(r.frequency) << " " << machine(c.real()) << " "
                << machine(c.imag()) << "\n";
        }
    }
    out << (has_time ? "rho_infinity(t):\n" : "rho_ss:\n");
    print_matrix(out, rho.op.mat, "  ", true);
    return 0;
}

int cmd_verify(const std::string& path, const std::string& state_spec, double t_final,
               bool has_t_final, double eps, std::ostream& out) {
    LoadedModel lm = load(path);
    Liouvillian liouvillian = build_liouvillian(lm.model);
    AsymptoticDecomposition dec = analyze_asymptotics(liouvillian);
    const DensityMatrix rho_in = parse_state(lm.model, state_spec);

    double t = t_final;
    if (!has_t_final) {
        if (!std::isfinite(dec.gap)) {
            out << "model: " << lm.model.name << "\n";
            out << "no decaying eigenvalues (gap = inf); propagation check skipped\n";
            return 0;
        }
        t = 30.0 / dec.gap;
    }
    if (!dec.rotating.empty()) {
        out << "note: " << dec.rotating.size()
            << " oscillating coherences present; comparing the time-averaged projection\n";
    }
    const DensityMatrix projected = asymptotic_project(dec, rho_in);
    const DensityMatrix propagated = propagate(liouvillian, rho_in, t);
    const double resid = max_abs(Matrix(projected.op.mat - propagated.op.mat));

    out << "model: " << lm.model.name << "\n";
    out << "t final: " << machine(t) << "\n";
    out << "asymptotic projection:\n";
    print_matrix(out, projected.op.mat, "  ");
    out << "propagated state:\n";
    print_matrix(out, propagated.op.mat, "  ");
    out << "residual (max entry): " << machine(resid) << "\n";
    out << "tolerance: " << machine(eps) << "\n";
    if (resid < eps) {
        out << "verdict: PASS\n";
        return 0;
    }
    out << "verdict: MISMATCH\n";
    return 1;
}

int cmd_structure(const std::string& path, unsigned seed, double tol, std::ostream& out) {
    LoadedModel lm = load(path);
    Liouvillian liouvillian = build_liouvillian(lm.model);
    AsymptoticsOptions aopts;
    aopts.svd_rtol = tol;
    aopts.seed = seed;
    AsymptoticDecomposition dec = analyze_asymptotics(liouvillian, aopts);
    BlockOptions bopts;
    bopts.seed = seed;
    BlockStructure blocks = block_structure(dec, liouvillian, bopts);
    if (!dec.rotating.empty()) extract_rotation_hamiltonian(dec.rotating, blocks);

    out << "model: " << lm.model.name << "\n";
    out << "steady dimension D: " << dec.steady_dimension() << "\n";
    out << "rotating pairs: " << dec.rotating.size() << "\n";
    out << "support dimension: " << blocks.support_dim << "\n";
    out << "blocks (kappa: n m | energies):\n";
    for (std::size_t k = 0; k < blocks.blocks.size(); ++k) {
        const Block& b = blocks.blocks[k];
        out << "  " << k << ": n=" << b.n << " m=" << b.m << " | energies:";
        for (double e : b.energies) out << " " << human(e);
        out << "\n";
    }
    for (std::size_t k = 0; k < blocks.blocks.size(); ++k) {
        out << "factor state T(" << k << "):\n";
        print_matrix(out, blocks.blocks[k].factor_state, "  ");
    }
    out << "reconstruction residual: " << human(blocks.reconstruction_residual) << " (tol 1e-08)\n";
    return 0;
}

int cmd_symmetries(const std::string& path, std::ostream& out) {
    LoadedModel lm = load(path);
    Liouvillian liouvillian = build_liouvillian(lm.model);
    const std::vector<Operator> generators = find_symmetry_generators(liouvillian);

    out << "model: " << lm.model.name << "\n";
    out << "weak symmetry generators: " << generators.size() << "\n";
    for (std::size_t k = 0; k < generators.size(); ++k) {
        const SymmetryReport r = classify_symmetry(generators[k], liouvillian);
        out << "generator " << k << ": strong=" << (r.strong ? "yes" : "no")
            << " weak=" << (r.weak ? "yes" : "no")
            << " conserved=" << (r.conserved ? "yes" : "no") << "\n";
        print_matrix(out, generators[k].mat, "  ");
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lindblad infinite-time analysis toolkit"};
    app.require_subcommand(1);

    std::vector<std::string> analyze_paths;
    AnalyzeOptions aopts;
    std::string out_path;
    auto* analyze = app.add_subcommand("analyze", "Full pipeline: spectrum, asymptotics, blocks");
    analyze->add_option("models", analyze_paths, "model file(s)")->required()->expected(-1);
    analyze->add_option("--tol", aopts.tol, "nullspace threshold scale (default 1e-9)");
    analyze->add_option("--seed", aopts.seed, "block-discovery probe seed (default 0x1db7ad)");
    analyze->add_option("--interior-margin", aopts.interior_margin,
                        "rows/cols near the Fock cutoff excluded from the conservation residual "
                        "(default 0)");
    analyze->add_option("--out", out_path, "write the report to a file");

    std::string spectrum_path, csv_path;
    auto* spec_cmd = app.add_subcommand("spectrum", "Eigenvalues of the Liouvillian");
    spec_cmd->add_option("model", spectrum_path, "model file")->required();
    spec_cmd->add_option("--csv", csv_path, "CSV output path ('-' for stdout)");

    std::string predict_path, predict_state;
    double predict_time = 0.0, predict_tol = 1e-9;
    auto* predict = app.add_subcommand("predict", "Infinite-time state for an initial state");
    predict->add_option("model", predict_path, "model file")->required();
    predict->add_option("--state", predict_state,
                        "ket(labels) | coherent(re,im) | matrix file")->required();
    auto* time_opt = predict->add_option("--time", predict_time,
                                         "evaluate rho_infinity(t) at this time");
    predict->add_option("--tol", predict_tol, "nullspace threshold scale (default 1e-9)");

    std::string verify_path, verify_state;
    double verify_t = 0.0, verify_eps = 1e-6;
    auto* verify = app.add_subcommand("verify", "Cross-check projection against propagation");
    verify->add_option("model", verify_path, "model file")->required();
    verify->add_option("--state", verify_state,
                       "ket(labels) | coherent(re,im) | matrix file")->required();
    auto* tfin_opt = verify->add_option("--t-final", verify_t, "propagation horizon (default 30/gap)");
    verify->add_option("--tol", verify_eps, "max-entry tolerance (default 1e-6)");

    std::string structure_path;
    unsigned structure_seed = 0x1db7ad;
    double structure_tol = 1e-9;
    auto* structure = app.add_subcommand("structure", "Block decomposition of the limit set");
    structure->add_option("model", structure_path, "model file")->required();
    structure->add_option("--seed", structure_seed, "probe seed (default 0x1db7ad)");
    structure->add_option("--tol", structure_tol, "nullspace threshold scale (default 1e-9)");

    std::string symmetries_path;
    auto* symmetries = app.add_subcommand("symmetries", "Weak-symmetry generator basis (N <= 16)");
    symmetries->add_option("model", symmetries_path, "model file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_paths, aopts, out_path, out);
        if (spec_cmd->parsed()) return cmd_spectrum(spectrum_path, csv_path, out);
        if (predict->parsed()) {
            return cmd_predict(predict_path, predict_state, predict_time, time_opt->count() > 0,
                               predict_tol, out);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_path, verify_state, verify_t, tfin_opt->count() > 0,
                              verify_eps, out);
        }
        if (structure->parsed()) {
            return cmd_structure(structure_path, structure_seed, structure_tol, out);
        }
        if (symmetries->parsed()) return cmd_symmetries(symmetries_path, out);
    } catch (const model_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace lindblad::cli
