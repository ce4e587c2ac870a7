// cli.cpp: subcommands validate, dilate, assemble, simulate and check

#include "qsc/cli.hpp"

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsc/dilation.hpp"
#include "qsc/io.hpp"
#include "qsc/ito_algebra.hpp"
#include "qsc/qsde_sim.hpp"

namespace qsc {

using nlohmann::json;

namespace {

json to_json(const Matrix& A)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < A.cols(); ++k) row.push_back({A(i, k).real(), A(i, k).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

json to_json(const RealVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

// Random piecewise-constant coherent function, entries uniform in the disc.
CoherentFunction random_coherent(int d, double T, int steps, Rng& rng, double amplitude)
{
    CoherentFunction f(d, T, steps);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    for (int k = 0; k < steps; ++k) {
        for (int m = 0; m < d; ++m) f.set(k, m, cplx(u(rng), u(rng)));
    }
    return f;
}

struct ValidateArgs {
    std::string path;
    double tol = 1e-9;
    double symmetry_tol = 1e-10;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err)
{
    const FormGenerator gen = load_generator(a.path);
    const double sym = gen.flat_symmetry_residual();
    json rep;
    rep["flat_symmetry_residual"] = sym;
    rep["classification"] = to_string(classify_drift(gen.D));
    if (sym > a.symmetry_tol) {
        rep["verdict"] = "rejected";
        out << rep.dump(1) << "\n";
        err << json{{"reason", "flat symmetry violated"}, {"residual", sym}}.dump(1) << "\n";
        return exit_rejected;
    }
    const CcpVerdict v = check_conditionally_cp(gen, a.tol);
    rep["min_eig"] = v.min_eig;
    rep["threshold"] = v.threshold;
    rep["verdict"] = v.accepted ? "accepted" : "rejected";
    out << rep.dump(1) << "\n";
    if (v.accepted) return exit_ok;

    json witness = json::array();
    for (const auto& w : v.witness) witness.push_back({{"X", to_json(w.X)}, {"eta", to_json(w.eta)}});
    err << json{{"min_eig", v.min_eig}, {"witness", std::move(witness)}}.dump(1) << "\n";
    return exit_rejected;
}

struct DilateArgs {
    std::string path;
    std::string output;
    double tol = 1e-9;
    double residual_tol = 1e-8;
};

int cmd_dilate(const DilateArgs& a, std::ostream& out, std::ostream& err)
{
    const FormGenerator gen = load_generator(a.path);
    if (gen.flat_symmetry_residual() > 1e-10) {
        err << "dilate: generator violates the flat symmetry\n";
        return exit_rejected;
    }
    const CcpVerdict v = check_conditionally_cp(gen, a.tol);
    if (!v.accepted) {
        err << json{{"error", "not conditionally completely positive"}, {"min_eig", v.min_eig}}.dump()
            << "\n";
        return exit_rejected;
    }
    const Extraction ex = extract_hp_params(gen, a.tol, a.residual_tol);
    const PreHilbertDilation pre = build_pre_hilbert(ex.params, gen.D);
    const PreHilbertReport pre_rep = pre.verify();
    if (pre_rep.max() > a.residual_tol) {
        throw ResidualTooLarge("pre-Hilbert identities fail", pre_rep.max(), "pre-Hilbert dilation");
    }
    const auto pseudo = build_pseudo_dilation(pre, gen, a.residual_tol);
    save_params(a.output, ex.params);

    json rep;
    rep["rank"] = ex.rank;
    rep["block_residual"] = ex.block_residual;
    rep["pre_hilbert"] = {{"j_multiplicative", pre_rep.j_multiplicative},
                          {"j_unital", pre_rep.j_unital},
                          {"k_derivation", pre_rep.k_derivation},
                          {"kstar_derivation", pre_rep.kstar_derivation},
                          {"l_identity", pre_rep.l_identity},
                          {"l_adjoint", pre_rep.l_adjoint}};
    rep["pseudo"] = {{"multiplicativity", pseudo.report.multiplicativity},
                     {"unital", pseudo.report.unital},
                     {"lflat_consistency", pseudo.report.lflat_consistency},
                     {"reconstruction", pseudo.report.reconstruction}};
    out << rep.dump(1) << "\n";
    return exit_ok;
}

struct AssembleArgs {
    std::string path;
    std::string output;
};

int cmd_assemble(const AssembleArgs& a, std::ostream& out)
{
    const HPParams params = load_params(a.path);
    params.validate();
    const FormGenerator gen = assemble_from_hp(params);
    save_generator(a.output, gen);
    out << json{{"n", gen.n},
                {"d", gen.d},
                {"flat_symmetry_residual", gen.flat_symmetry_residual()},
                {"classification", to_string(classify_drift(gen.D))}}
               .dump(1)
        << "\n";
    return exit_ok;
}

struct SimulateArgs {
    std::string path;
    double T = 1.0;
    int steps = 256;
    std::string solver = "transfer";
    std::string observable;
    std::string f_path;
    std::string h_path;
    std::string output;
    std::string reference;
    int iters = 25;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err)
{
    const HPParams params = load_params(a.path);
    params.validate();
    const Eigen::Index n = params.n;
    const Matrix X = a.observable.empty() ? Matrix(Matrix::Identity(n, n)) : load_observable(a.observable);
    if (X.rows() != n) throw ParseError("observable dimension does not match the parameters");
    if (!(a.T >= 0.0) || a.steps < 1) throw GridMismatch("need T >= 0 and steps >= 1");

    const bool vacuum = a.f_path.empty() && a.h_path.empty();
    const bool want_ref = a.reference == "expm";
    if (!a.reference.empty() && !want_ref) throw ParseError("unknown reference " + a.reference);
    if ((a.solver == "expm" || want_ref) && !vacuum) {
        throw GridMismatch("the expm semigroup covers the vacuum expectation only");
    }

    TraceTable table;
    const FormGenerator gen = assemble_from_hp(params);
    if (a.solver == "expm") {
        for (int k = 0; k <= a.steps; ++k) {
            const double t = a.T * k / a.steps;
            table.trace.times.push_back(t);
            table.trace.values.push_back(semigroup_expm(gen, t, X));
        }
    } else {
        if (!(a.T > 0.0)) throw GridMismatch("simulation horizon must be positive");
        auto load_or_vacuum = [&](const std::string& p) {
            if (p.empty()) return CoherentFunction::vacuum(params.d, a.T, a.steps);
            CoherentFunction f = load_coherent(p);
            if (f.steps() != a.steps || std::abs(f.horizon() - a.T) > 1e-12 * std::max(1.0, a.T)) {
                throw GridMismatch("coherent function " + p + " is not on the simulation grid");
            }
            if (f.d() != params.d) throw GridMismatch("coherent function " + p + " has the wrong d");
            return f;
        };
        const CoherentFunction f = load_or_vacuum(a.f_path);
        const CoherentFunction h = load_or_vacuum(a.h_path);
        if (a.solver == "transfer") {
            table.trace = simulate_transfer(make_toy_fock(params, a.T, a.steps), X, f, h);
        } else if (a.solver == "ode") {
            table.trace = coherent_form_ode(gen, X, f, h);
        } else if (a.solver == "picard") {
            PicardResult res = picard_solve(params, X, f, h, a.iters);
            if (res.non_contraction) {
                err << json{{"error", "Picard iteration is not contracting"},
                            {"last_increment", res.increments.back()}}
                           .dump()
                    << "\n";
                return exit_non_contraction;
            }
            table.trace = std::move(res.trace);
        } else {
            throw ParseError("unknown solver " + a.solver);
        }
    }
    if (want_ref) {
        table.extra_names.push_back("err_expm");
        std::vector<double> col;
        for (std::size_t k = 0; k < table.trace.times.size(); ++k) {
            const Matrix ref = semigroup_expm(gen, table.trace.times[k], X);
            col.push_back(max_abs(table.trace.values[k] - ref));
        }
        table.extra.push_back(std::move(col));
    }
    if (a.output.empty()) {
        out << trace_to_csv(table);
    } else {
        save_trace(a.output, table);
        json rep{{"solver", a.solver}, {"steps", a.steps}, {"rows", table.trace.times.size()}};
        if (want_ref) rep["final_error"] = table.extra.back().back();
        out << rep.dump(1) << "\n";
    }
    return exit_ok;
}

struct CheckArgs {
    std::string subject;
    std::string params_path;
    std::string generator_path;
    std::string f_path;
    std::string h_path;
    std::string solver;
    int d = 3;
    std::vector<int> fault;
    double T = 1.0;
    int steps = 64;
    int split = -1;
    int shift_fault = 0;
    std::uint64_t seed = 7;
    double tol = -1.0;
    int blocks = 3;
    int rank = 1;
    int functions = 2;
    double amplitude = 1.0;
    int iters = 25;
};

int finish(const json& rep, bool pass, std::ostream& out)
{
    json full = rep;
    full["pass"] = pass;
    out << full.dump(1) << "\n";
    return pass ? exit_ok : exit_rejected;
}

int check_ito(const CheckArgs& a, std::ostream& out)
{
    std::optional<IndexQuadruple> fault;
    if (!a.fault.empty()) {
        if (a.fault.size() != 4) throw ParseError("--fault takes mu beta gamma nu");
        fault = IndexQuadruple{a.fault[0], a.fault[1], a.fault[2], a.fault[3]};
    }
    const ItoTableReport rep = verify_ito_table(a.d, fault);
    json viol = json::array();
    for (const auto& q : rep.violations) viol.push_back({q.mu, q.beta, q.gamma, q.nu});
    return finish({{"subject", "ito-table"}, {"d", a.d}, {"checked", rep.checked}, {"violations", viol}},
                  rep.passed(), out);
}

int check_cocycle(const CheckArgs& a, std::ostream& out)
{
    if (a.params_path.empty()) throw ParseError("cocycle check needs --params");
    const HPParams params = load_params(a.params_path);
    const ToyFockModel model = make_toy_fock(params, a.T, a.steps);
    Rng rng(a.seed);
    const CoherentFunction f = a.f_path.empty()
                                   ? random_coherent(params.d, a.T, a.steps, rng, 1.0)
                                   : load_coherent(a.f_path);
    const CoherentFunction h = a.h_path.empty()
                                   ? random_coherent(params.d, a.T, a.steps, rng, 1.0)
                                   : load_coherent(a.h_path);
    if (!f.same_grid(h) || f.steps() != a.steps) throw GridMismatch("coherent functions off the grid");
    const int s = a.split < 0 ? a.steps / 2 : a.split;
    const double tol = a.tol < 0 ? 1e-13 : a.tol;
    const double res = cocycle_residual(model, f, h, s, a.steps - s, a.shift_fault);
    const double scale = std::max(1.0, max_abs(transfer_map(model, f, h, 0, a.steps).action));
    return finish({{"subject", "cocycle"},
                   {"s", s},
                   {"r", a.steps - s},
                   {"shift_fault", a.shift_fault},
                   {"residual", res},
                   {"scale", scale},
                   {"tol", tol}},
                  res <= tol * scale, out);
}

FormGenerator generator_for(const CheckArgs& a)
{
    if (!a.generator_path.empty()) return load_generator(a.generator_path);
    if (!a.params_path.empty()) return assemble_from_hp(load_params(a.params_path));
    throw ParseError("need --generator or --params");
}

int check_martingale(const CheckArgs& a, std::ostream& out)
{
    const FormGenerator gen = generator_for(a);
    const double tol = a.tol < 0 ? 1e-10 : a.tol;
    const MartingaleReport rep = martingale_check(gen, a.T, a.steps, tol);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(gen.D), Eigen::EigenvaluesOnly);
    json final_eigs = to_json(RealVector(rep.eigenvalues.back()));
    return finish({{"subject", "martingale"},
                   {"classification", to_string(rep.classification)},
                   {"drift_eigenvalues", to_json(RealVector(es.eigenvalues()))},
                   {"final_eigenvalues", final_eigs}},
                  rep.classification != Normalization::neither, out);
}

int check_gram(const CheckArgs& a, std::ostream& out)
{
    GramConfig cfg;
    cfg.blocks = a.blocks;
    cfg.psd_rank = a.rank;
    cfg.functions = a.functions;
    cfg.amplitude = a.amplitude;
    cfg.T = a.T;
    cfg.steps = a.steps;
    std::string solver = a.solver;
    MatrixElementSolver run;
    if (!a.params_path.empty()) {
        const HPParams params = load_params(a.params_path);
        cfg.n = static_cast<int>(params.n);
        cfg.d = params.d;
        if (solver.empty()) solver = "transfer";
        if (solver == "transfer") run = transfer_solver(params);
        else if (solver == "picard") run = picard_solver(params, a.iters);
        else if (solver == "ode") run = ode_solver(assemble_from_hp(params));
        else throw ParseError("unknown solver " + solver);
    } else {
        const FormGenerator gen = generator_for(a);
        cfg.n = static_cast<int>(gen.n);
        cfg.d = gen.d;
        if (solver.empty()) solver = "ode";
        if (solver != "ode") throw ParseError("a bare generator supports only --solver ode");
        run = ode_solver(gen);
    }
    const double tol = a.tol < 0 ? 1e-6 : a.tol;
    const GramReport rep = gram_positivity_check(run, cfg, a.seed);
    return finish({{"subject", "gram"},
                   {"solver", solver},
                   {"seed", a.seed},
                   {"min_eig", rep.min_eig},
                   {"tol", tol}},
                  rep.min_eig >= -tol, out);
}

int cmd_check(const CheckArgs& a, std::ostream& out)
{
    if (a.subject == "ito-table") return check_ito(a, out);
    if (a.subject == "cocycle") return check_cocycle(a, out);
    if (a.subject == "martingale") return check_martingale(a, out);
    if (a.subject == "gram") return check_gram(a, out);
    throw ParseError("unknown check subject " + a.subject);
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stochastic form-generators: validation, dilation and cocycle simulation", "qsc"};
    app.require_subcommand(1);
    // --h names the ket coherent function, so help has no short alias
    app.set_help_flag("--help", "Print this help message and exit");

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Test a generator file for conditional complete positivity");
    validate->add_option("path", va.path, "Generator JSON file")->required();
    validate->add_option("--tol", va.tol, "Relative eigenvalue tolerance")->capture_default_str();
    validate->add_option("--symmetry-tol", va.symmetry_tol, "Flat-symmetry tolerance")->capture_default_str();

    DilateArgs da;
    auto* dilate = app.add_subcommand("dilate", "Extract Hudson-Parthasarathy parameters from a generator");
    dilate->add_option("path", da.path, "Generator JSON file")->required();
    dilate->add_option("-o,--output", da.output, "Parameter JSON output")->required();
    dilate->add_option("--tol", da.tol, "Relative eigenvalue tolerance")->capture_default_str();
    dilate->add_option("--residual-tol", da.residual_tol, "Reassembly tolerance")->capture_default_str();

    AssembleArgs aa;
    auto* assemble = app.add_subcommand("assemble", "Build the generator of a parameter file");
    assemble->add_option("path", aa.path, "Parameter JSON file")->required();
    assemble->add_option("-o,--output", aa.output, "Generator JSON output")->required();

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Trace coherent matrix elements of the cocycle");
    simulate->add_option("path", sa.path, "Parameter JSON file")->required();
    simulate->add_option("--T", sa.T, "Time horizon")->capture_default_str();
    simulate->add_option("--steps", sa.steps, "Grid steps")->capture_default_str();
    simulate->add_option("--solver", sa.solver, "transfer | ode | picard | expm")
        ->check(CLI::IsMember({"transfer", "ode", "picard", "expm"}))
        ->capture_default_str();
    simulate->add_option("--observable", sa.observable, "Observable JSON (default identity)");
    simulate->add_option("--f", sa.f_path, "Bra coherent function JSON (default vacuum)");
    simulate->add_option("--h", sa.h_path, "Ket coherent function JSON (default vacuum)");
    simulate->add_option("--reference", sa.reference, "Add an error column against this reference")
        ->check(CLI::IsMember({"expm"}));
    simulate->add_option("--iters", sa.iters, "Picard iterations")->capture_default_str();
    simulate->add_option("-o,--output", sa.output, "CSV output (default stdout)");

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "Run a structural check and print a JSON summary");
    check->add_option("subject", ca.subject, "cocycle | martingale | gram | ito-table")
        ->required()
        ->check(CLI::IsMember({"cocycle", "martingale", "gram", "ito-table"}));
    check->add_option("--params", ca.params_path, "Parameter JSON file");
    check->add_option("--generator", ca.generator_path, "Generator JSON file");
    check->add_option("--f", ca.f_path, "Bra coherent function (cocycle; default seeded random)");
    check->add_option("--h", ca.h_path, "Ket coherent function (cocycle; default seeded random)");
    check->add_option("--solver", ca.solver, "Gram solver: transfer | ode | picard");
    check->add_option("--d", ca.d, "Noise dimension (ito-table)")->capture_default_str();
    check->add_option("--fault", ca.fault, "Flip one Ito product: mu beta gamma nu (ito-table)")->expected(4);
    check->add_option("--T", ca.T, "Time horizon")->capture_default_str();
    check->add_option("--steps", ca.steps, "Grid steps")->capture_default_str();
    check->add_option("--split", ca.split, "Cocycle split point s (default steps/2)");
    check->add_option("--shift-fault", ca.shift_fault, "Misalign the shifted noise by this many slices")
        ->capture_default_str();
    check->add_option("--seed", ca.seed, "Random seed")->capture_default_str();
    check->add_option("--tol", ca.tol, "Pass tolerance (subject default when omitted)");
    check->add_option("--blocks", ca.blocks, "Gram: number of operator blocks")->capture_default_str();
    check->add_option("--rank", ca.rank, "Gram: rank of the PSD block matrix")->capture_default_str();
    check->add_option("--functions", ca.functions, "Gram: coherent functions")->capture_default_str();
    check->add_option("--amplitude", ca.amplitude, "Gram: coherent amplitude")->capture_default_str();
    check->add_option("--iters", ca.iters, "Picard iterations")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_parse;
    }

    try {
        if (*validate) return cmd_validate(va, out, err);
        if (*dilate) return cmd_dilate(da, out, err);
        if (*assemble) return cmd_assemble(aa, out);
        if (*simulate) return cmd_simulate(sa, out, err);
        return cmd_check(ca, out);
    } catch (const NotCompletelyPositive& e) {
        err << json{{"error", e.what()}, {"eigenvalue", e.eigenvalue}}.dump() << "\n";
        return exit_rejected;
    } catch (const ResidualTooLarge& e) {
        err << json{{"error", e.what()}, {"residual", e.residual}, {"location", e.location}}.dump()
            << "\n";
        return exit_residual;
    } catch (const std::exception& e) {
        // parse failures, grid mismatches and malformed inputs
        err << "qsc: " << e.what() << "\n";
        return exit_parse;
    }
}

int run_cli(int argc, const char* const* argv)
{
    return run_cli(argc, argv, std::cout, std::cerr);
}

} // namespace qsc
