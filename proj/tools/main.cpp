// Batch front door: problem JSON in, CSV/JSON artifacts out. Outputs are
// deterministic in (flags, input files, seed); the exit status is nonzero
// iff a requested check fails its tolerance.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pantostar/forward.hpp"
#include "pantostar/io.hpp"
#include "pantostar/verifier.hpp"

namespace fs = std::filesystem;
using namespace pantostar;

namespace {

struct CommonOpts {
    std::string problem_path;
    double h = 0.05;
    double tol = -1.0;  // <0: report only
    unsigned seed = 42;
    std::string out_dir = ".";
    bool check_weights = false;
};

void add_common(CLI::App* cmd, CommonOpts& opt, bool needs_h = true) {
    cmd->add_option("--problem", opt.problem_path, "problem JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    if (needs_h) cmd->add_option("--h", opt.h, "mesh spacing / marching step");
    cmd->add_option("--tol", opt.tol, "tolerance for residual checks (default: report only)");
    cmd->add_option("--seed", opt.seed, "seed for optimality probes");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_flag("--check-weights", opt.check_weights,
                  "require alpha_1 = 1 and the outgoing weights to sum to 1");
}

ValidatedProblem load(const CommonOpts& opt) {
    const ValidatedProblem vp = validate(load_problem(opt.problem_path));
    if (opt.check_weights) {
        double sum = 0.0;
        for (int j = 2; j <= vp.edge_count(); ++j) sum += vp.edge(j).alpha;
        if (std::abs(vp.edge(1).alpha - 1.0) > 1e-12 || std::abs(sum - 1.0) > 1e-12) {
            std::cerr << "weight check failed: alpha_1 = " << vp.edge(1).alpha
                      << ", sum of outgoing alphas = " << sum << "\n";
            std::exit(3);
        }
    }
    return vp;
}

fs::path out_file(const CommonOpts& opt, const char* name) {
    fs::create_directories(opt.out_dir);
    return fs::path(opt.out_dir) / name;
}

int run_simulate(const CommonOpts& opt, const std::string& control_path) {
    const ValidatedProblem vp = load(opt);
    const ControlProfile u = load_control(vp, control_path);
    const GraphGridFunction y = solve_cauchy(vp, u, opt.h);
    write_trajectory_csv(out_file(opt, "trajectory.csv").string(), y);
    std::cout << "trajectory written; y at vertex = " << y(1, vp.horizon(1)) << "\n";
    return 0;
}

int run_damp(const CommonOpts& opt) {
    const ValidatedProblem vp = load(opt);
    auto mesh = std::make_shared<const GraphMesh>(build_mesh(vp, opt.h));
    const DampSolution sol = solve_damping(vp, mesh);
    const ControlProfile u = extract_control(vp, sol.y);
    const VerificationReport rep = verify(vp, sol.y, opt.h, opt.seed, 20);

    write_trajectory_csv(out_file(opt, "trajectory.csv").string(), sol.y);
    write_control_csv(out_file(opt, "control.csv").string(), u);
    write_text(out_file(opt, "report.json").string(), damp_report_to_json(sol, rep));

    std::printf("J = %.12g, vertex value = %.12g, dofs = %d\n", sol.J, sol.vertex_value,
                sol.n_dofs);
    const double rhs_scale = std::sqrt(sol.J) + std::abs(vp.y0());
    if (sol.linear_residual > 1e-10 * (1.0 + rhs_scale)) {
        std::cerr << "linear solve residual too large: " << sol.linear_residual << "\n";
        return 1;
    }
    if (opt.tol >= 0.0 &&
        (rep.kirchhoff_residual > opt.tol || rep.flux_residual > opt.tol ||
         rep.rest_violation > opt.tol)) {
        std::cerr << "residuals exceed --tol\n";
        return 1;
    }
    return 0;
}

int run_verify(const CommonOpts& opt, const std::string& trajectory_path, bool h_set) {
    const ValidatedProblem vp = load(opt);
    const GraphGridFunction y = load_trajectory(vp, trajectory_path);
    const double h = h_set ? opt.h : y.mesh().max_spacing();
    const VerificationReport rep = verify(vp, y, h, opt.seed, 100);
    const std::string text = report_to_json(rep);
    write_text(out_file(opt, "report.json").string(), text);
    std::cout << text;

    int status = 0;
    const double identity_gap = std::abs(rep.kirchhoff_residual - rep.flux_residual);
    if (identity_gap > 1e-10 * (1.0 + rep.kirchhoff_residual)) {
        std::cerr << "kirchhoff/flux identity violated by " << identity_gap << "\n";
        status = 1;
    }
    if (rep.optimality_margin < -1e-8) {
        std::cerr << "optimality margin negative: " << rep.optimality_margin << "\n";
        status = 1;
    }
    if (opt.tol >= 0.0) {
        const double worst =
            std::max({rep.kirchhoff_residual, rep.flux_residual, rep.rest_violation,
                      rep.roundtrip_max_error, rep.weak_residual});
        if (worst > opt.tol) {
            std::cerr << "residual " << worst << " exceeds --tol " << opt.tol << "\n";
            status = 1;
        }
    }
    return status;
}

int run_converge(const CommonOpts& opt, int levels) {
    const ValidatedProblem vp = load(opt);
    std::vector<double> hs;
    double h = opt.h;
    for (int i = 0; i < levels; ++i, h /= 2.0) hs.push_back(h);
    const auto rows = convergence_study(vp, hs);
    const std::string csv = study_to_csv(rows);
    write_text(out_file(opt, "study.csv").string(), csv);
    std::cout << csv;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].J > rows[i - 1].J + 1e-12 * (1.0 + std::abs(rows[i].J))) {
            std::cerr << "energy increased under nested refinement\n";
            return 1;
        }
    }
    return 0;
}

int run_reduce(const CommonOpts& opt) {
    const ValidatedProblem vp = load(opt);
    const EdgeSpec e1 = vp.edge(1);
    if (vp.edge_count() != 2 || std::abs(e1.b - vp.edge(2).b) > 1e-14 ||
        std::abs(e1.c - vp.edge(2).c) > 1e-14 || std::abs(e1.alpha - 1.0) > 1e-14 ||
        std::abs(vp.edge(2).alpha - 1.0) > 1e-14) {
        std::cerr << "reduce needs m = 2 with matching b, c and alpha = [1, 1]\n";
        return 2;
    }
    const double matched = interval_reduction_check(vp.q(), vp.horizon(1), vp.horizon(2), e1.b,
                                                    e1.c, vp.y0(), opt.h, true);
    const double unmatched = interval_reduction_check(vp.q(), vp.horizon(1), vp.horizon(2), e1.b,
                                                      e1.c, vp.y0(), opt.h, false);
    std::printf("interval mismatch: matched meshes %.3e, independent meshes %.3e\n", matched,
                unmatched);
    write_text(out_file(opt, "report.json").string(),
               "{\n  \"interval_mismatch_matched\": " + std::to_string(matched) +
                   ",\n  \"interval_mismatch_independent\": " + std::to_string(unmatched) +
                   "\n}\n");
    const double tol = opt.tol >= 0.0 ? opt.tol : 1e-10;
    return matched <= tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimal-energy damping for pantograph-delay systems on temporal star graphs"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string control_path, trajectory_path;
    int levels = 4;

    CLI::App* simulate = app.add_subcommand("simulate", "forward-solve given controls");
    add_common(simulate, opt);
    simulate->add_option("--control", control_path, "control CSV path")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* damp = app.add_subcommand("damp", "solve the minimal-energy damping problem");
    add_common(damp, opt);

    CLI::App* verify_cmd = app.add_subcommand("verify", "check a trajectory against the theory");
    add_common(verify_cmd, opt);
    verify_cmd->add_option("--trajectory", trajectory_path, "trajectory CSV path")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* converge = app.add_subcommand("converge", "mesh-refinement study");
    add_common(converge, opt);
    converge->add_option("--levels", levels, "number of halvings of --h");

    CLI::App* reduce = app.add_subcommand("reduce", "compare against the single-interval solver");
    add_common(reduce, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(opt, control_path);
        if (damp->parsed()) return run_damp(opt);
        if (verify_cmd->parsed())
            return run_verify(opt, trajectory_path, verify_cmd->count("--h") > 0);
        if (converge->parsed()) return run_converge(opt, levels);
        if (reduce->parsed()) return run_reduce(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
