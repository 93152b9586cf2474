#include "pantostar/verifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pantostar/forward.hpp"

namespace pantostar {

namespace {

constexpr double kGauss = 0.28867513459481288;  // 1/(2*sqrt(3))

double piece_tol(double horizon) { return 1e-12 * (1.0 + horizon); }

GraphGridFunction sum_of(const GraphGridFunction& a, const GraphGridFunction& b) {
    GraphGridFunction out = a;
    out += b;
    return out;
}

// The transformed operators ell~_j: compressed-argument terms of B moved
// onto the test slot by substitution, leaving expanded-argument reads of y.
double ell_tilde(const ValidatedProblem& problem, const GraphGridFunction& y, int j, double t) {
    const double q = problem.q();
    if (j == 1) {
        if (t < problem.t1_over_q()) {
            const EdgeSpec& e1 = problem.edge(1);
            return q * e1.alpha * e1.c * apply_ell(problem, y, 1, q * t);
        }
        double sum = 0.0;
        for (int k = 2; k <= problem.edge_count(); ++k) {
            const EdgeSpec& ek = problem.edge(k);
            if (ek.c != 0.0) {
                sum += q * ek.alpha * ek.c * apply_ell(problem, y, k, q * t - problem.horizon(1));
            }
        }
        return sum;
    }
    if (t >= problem.rest_onset(j)) return 0.0;
    const EdgeSpec& ej = problem.edge(j);
    if (ej.c == 0.0) return 0.0;
    return q * ej.alpha * ej.c * apply_ell(problem, y, j, q * t + problem.handover());
}

// Breakpoints of the transformed integrand on edge j: kinks of ell_j y, the
// branch point of ell~_j, and preimages of every kink of the expanded reads.
std::vector<double> tilde_breakpoints(const ValidatedProblem& problem, const GraphGridFunction& y,
                                      int j, const std::vector<double>& test_nodes) {
    const double q = problem.q();
    const double T1 = problem.horizon(1);
    const double Tj = problem.horizon(j);
    std::vector<double> pts = kink_points(problem, y.mesh(), j);
    pts.insert(pts.end(), test_nodes.begin(), test_nodes.end());
    if (j == 1) {
        pts.push_back(problem.t1_over_q());
        for (double k : kink_points(problem, y.mesh(), 1)) pts.push_back(k / q);
        for (int k = 2; k <= problem.edge_count(); ++k) {
            for (double kk : kink_points(problem, y.mesh(), k)) {
                if (kk <= problem.handover() + piece_tol(Tj)) pts.push_back((kk + T1) / q);
            }
        }
    } else {
        pts.push_back(problem.rest_onset(j));
        for (double kk : kink_points(problem, y.mesh(), j)) {
            if (kk >= problem.handover() - piece_tol(Tj)) {
                pts.push_back((kk - problem.handover()) / q);
            }
        }
    }
    for (auto& p : pts) p = std::fmin(std::fmax(p, 0.0), Tj);
    return merge_breakpoints(std::move(pts), piece_tol(Tj));
}

// Integrand factors at one point: r1 multiplies w', r0 multiplies w.
void tilde_factors(const ValidatedProblem& problem, const GraphGridFunction& y, int j, double t,
                   double& r1, double& r0) {
    const EdgeSpec& e = problem.edge(j);
    const double ell = apply_ell(problem, y, j, t);
    r1 = e.alpha * ell;
    r0 = e.alpha * e.b * ell + ell_tilde(problem, y, j, t);
}

struct IntervalSolution {
    std::vector<double> nodes;
    std::vector<double> values;
    double J = 0.0;

    double eval(double t) const {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        size_t i = static_cast<size_t>(std::clamp<std::ptrdiff_t>(
            it - nodes.begin() - 1, 0, static_cast<std::ptrdiff_t>(nodes.size()) - 2));
        const double w = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
        return values[i] * (1.0 - w) + values[i + 1] * w;
    }
};

// Independent single-interval minimizer of int (y' + b y + c y(t/q))^2 over
// [0, T] with y(0) = y0 and y = 0 on [T/q, T]. Own DOF layout (no vertex),
// same kink-exact Gauss-2 quadrature idea as the graph assembler.
IntervalSolution solve_interval(double q, double T, double b, double c, double y0,
                                std::vector<double> nodes) {
    const double tol = piece_tol(T);
    const double rest = T / q;
    size_t rest_ix = nodes.size();
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (std::abs(nodes[i] - rest) <= tol) {
            rest_ix = i;
            break;
        }
    }
    if (rest_ix == nodes.size()) {
        fail(Errc::MissingMandatoryNode, "interval mesh needs a node at T/q");
    }
    const double kink = nodes[rest_ix];

    // DOFs strictly between 0 and the rest onset.
    std::vector<int> dof(nodes.size(), -1);
    int n = 0;
    for (size_t i = 1; i < rest_ix; ++i) dof[i] = n++;

    std::vector<double> lift(nodes.size(), 0.0);
    for (size_t i = 0; i < rest_ix; ++i) lift[i] = y0 * (1.0 - nodes[i] / kink);

    std::vector<double> pieces = nodes;
    for (double s : nodes) {
        const double p = q * s;
        if (p <= T + tol) pieces.push_back(std::fmin(p, T));
    }
    pieces = merge_breakpoints(std::move(pieces), tol);

    auto cell_of = [&](double t) {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        return static_cast<size_t>(std::clamp<std::ptrdiff_t>(
            it - nodes.begin() - 1, 0, static_cast<std::ptrdiff_t>(nodes.size()) - 2));
    };
    // ell applied to a nodal vector at a quadrature point (never on a kink).
    auto ell_value = [&](const std::vector<double>& vals, double t) {
        const size_t i = cell_of(t);
        const double dt = nodes[i + 1] - nodes[i];
        const double w = (t - nodes[i]) / dt;
        double r = (vals[i + 1] - vals[i]) / dt + b * (vals[i] * (1.0 - w) + vals[i + 1] * w);
        const double s = t / q;
        const size_t k = cell_of(s);
        const double wd = (s - nodes[k]) / (nodes[k + 1] - nodes[k]);
        r += c * (vals[k] * (1.0 - wd) + vals[k + 1] * wd);
        return r;
    };
    auto ell_coeffs = [&](double t, std::vector<std::pair<int, double>>& out) {
        out.clear();
        auto add = [&](size_t node, double wgt) {
            if (dof[node] < 0 || wgt == 0.0) return;
            for (auto& [d, v] : out) {
                if (d == dof[node]) {
                    v += wgt;
                    return;
                }
            }
            out.emplace_back(dof[node], wgt);
        };
        const size_t i = cell_of(t);
        const double dt = nodes[i + 1] - nodes[i];
        const double w = (t - nodes[i]) / dt;
        add(i, -1.0 / dt + b * (1.0 - w));
        add(i + 1, 1.0 / dt + b * w);
        const double s = t / q;
        const size_t k = cell_of(s);
        const double wd = (s - nodes[k]) / (nodes[k + 1] - nodes[k]);
        add(k, c * (1.0 - wd));
        add(k + 1, c * wd);
    };

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    std::vector<std::pair<int, double>> entries;
    for (size_t p = 0; p + 1 < pieces.size(); ++p) {
        const double dt = pieces[p + 1] - pieces[p];
        if (dt <= tol) continue;
        const double mid = 0.5 * (pieces[p] + pieces[p + 1]);
        const double off = kGauss * dt;
        for (const double tg : {mid - off, mid + off}) {
            ell_coeffs(tg, entries);
            const double wg = 0.5 * dt;
            const double lift_val = ell_value(lift, tg);
            for (const auto& [di, vi] : entries) {
                rhs[di] -= wg * lift_val * vi;
                for (const auto& [dk, vk] : entries) A(di, dk) += wg * vi * vk;
            }
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        fail(Errc::NotPositiveDefinite, "interval energy form factorization failed");
    }
    const Eigen::VectorXd x = llt.solve(rhs);

    IntervalSolution sol;
    sol.nodes = nodes;
    sol.values = lift;
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (dof[i] >= 0) sol.values[i] += x[dof[i]];
    }
    const auto f = [&](double t) {
        const double v = ell_value(sol.values, t);
        return v * v;
    };
    sol.J = integrate_pw(f, pieces);
    return sol;
}

std::vector<double> uniform_interval_mesh(double q, double T, double h) {
    const std::vector<double> marks{0.0, T / q, T};
    std::vector<double> ns;
    for (size_t s = 0; s + 1 < marks.size(); ++s) {
        const double a = marks[s], bnd = marks[s + 1];
        const int parts = std::max(1, static_cast<int>(std::ceil((bnd - a) / h - 1e-12)));
        ns.push_back(a);
        for (int k = 1; k < parts; ++k) ns.push_back(a + (bnd - a) * static_cast<double>(k) / parts);
    }
    ns.push_back(T);
    return ns;
}

std::vector<double> concat_nodes(const GraphMesh& mesh) {
    std::vector<double> out = mesh.nodes(1);
    const double T1 = mesh.horizon(1);
    const auto& n2 = mesh.nodes(2);
    for (size_t i = 1; i < n2.size(); ++i) out.push_back(T1 + n2[i]);
    return out;
}

double graph_as_interval_eval(const GraphGridFunction& y, double t) {
    const double T1 = y.mesh().horizon(1);
    return t <= T1 ? y(1, t) : y(2, t - T1);
}

double mismatch_against_interval(const GraphGridFunction& y, const IntervalSolution& isol) {
    std::vector<double> pts = isol.nodes;
    const std::vector<double> gpts = concat_nodes(y.mesh());
    pts.insert(pts.end(), gpts.begin(), gpts.end());
    const double T = isol.nodes.back();
    pts = merge_breakpoints(std::move(pts), piece_tol(T));
    double worst = 0.0;
    for (double t : pts) {
        worst = std::max(worst, std::abs(graph_as_interval_eval(y, t) - isol.eval(t)));
    }
    return worst;
}

bool matched_two_edge(const ValidatedProblem& problem) {
    if (problem.edge_count() != 2) return false;
    const EdgeSpec& e1 = problem.edge(1);
    const EdgeSpec& e2 = problem.edge(2);
    const auto near = [](double a, double b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a)); };
    return near(e1.b, e2.b) && near(e1.c, e2.c) && near(e1.alpha, 1.0) && near(e2.alpha, 1.0);
}

}  // namespace

double kirchhoff_residual(const ValidatedProblem& problem, const GraphGridFunction& y) {
    const double T1 = problem.horizon(1);
    double r = problem.edge(1).alpha * y.slope(1, T1, Side::Left);
    for (int j = 2; j <= problem.edge_count(); ++j) {
        r -= problem.edge(j).alpha * y.slope(j, 0.0, Side::Right);
    }
    r += problem.beta() * y(1, T1) + problem.gamma() * y(1, problem.t1_over_q());
    return std::abs(r);
}

double flux_balance_residual(const ValidatedProblem& problem, const GraphGridFunction& y) {
    double r = problem.edge(1).alpha * apply_ell(problem, y, 1, problem.horizon(1), Side::Left);
    for (int j = 2; j <= problem.edge_count(); ++j) {
        r -= problem.edge(j).alpha * apply_ell(problem, y, j, 0.0, Side::Right);
    }
    return std::abs(r);
}

RoundTrip roundtrip_check(const ValidatedProblem& problem, const GraphGridFunction& y,
                          const ControlProfile& u, double h) {
    const GraphGridFunction sim = solve_cauchy(problem, u, h);
    RoundTrip out;
    for (int j = 1; j <= problem.edge_count(); ++j) {
        for (double t : y.mesh().nodes(j)) {
            out.max_error = std::max(out.max_error, std::abs(sim(j, t) - y(j, t)));
        }
    }
    for (int j = 2; j <= problem.edge_count(); ++j) {
        const double lj = problem.rest_onset(j);
        const double tol = piece_tol(problem.horizon(j));
        out.rest_violation = std::max(out.rest_violation, std::abs(sim(j, lj)));
        for (double t : sim.mesh().nodes(j)) {
            if (t >= lj - tol) {
                out.rest_violation = std::max(out.rest_violation, std::abs(sim(j, t)));
            }
        }
    }
    return out;
}

double transformed_form(const ValidatedProblem& problem, const GraphGridFunction& y,
                        const GraphGridFunction& w) {
    double total = 0.0;
    for (int j = 1; j <= problem.edge_count(); ++j) {
        const std::vector<double> pieces =
            tilde_breakpoints(problem, y, j, w.mesh().nodes(j));
        const auto f = [&](double t) {
            double r1 = 0.0, r0 = 0.0;
            tilde_factors(problem, y, j, t, r1, r0);
            return r1 * w.slope(j, t) + r0 * w(j, t);
        };
        total += integrate_pw(f, pieces);
    }
    return total;
}

double weak_residual_tilde(const ValidatedProblem& problem, const GraphGridFunction& y,
                           std::shared_ptr<const GraphMesh> mesh_fine) {
    const SpaceW space(problem, mesh_fine);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(space.size());

    for (int j = 1; j <= problem.edge_count(); ++j) {
        const auto& ns = mesh_fine->nodes(j);
        const std::vector<double> pieces = tilde_breakpoints(problem, y, j, ns);
        const double tol = piece_tol(problem.horizon(j));
        for (size_t p = 0; p + 1 < pieces.size(); ++p) {
            const double dt = pieces[p + 1] - pieces[p];
            if (dt <= tol) continue;
            const double mid = 0.5 * (pieces[p] + pieces[p + 1]);
            const double off = kGauss * dt;
            for (const double tg : {mid - off, mid + off}) {
                double r1 = 0.0, r0 = 0.0;
                tilde_factors(problem, y, j, tg, r1, r0);
                const double wg = 0.5 * dt;
                const int i = mesh_fine->cell_of(j, tg);
                const double cw = ns[i + 1] - ns[i];
                const double theta = (tg - ns[i]) / cw;
                const int d0 = space.dof(j, i);
                const int d1 = space.dof(j, i + 1);
                if (d0 >= 0) r[d0] += wg * (-r1 / cw + r0 * (1.0 - theta));
                if (d1 >= 0) r[d1] += wg * (r1 / cw + r0 * theta);
            }
        }
    }
    return space.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
}

double interval_reduction_check(double q, double T1, double T2, double b, double c, double y0,
                                double h, bool matched) {
    StarProblem sp;
    sp.q = q;
    sp.y0 = y0;
    sp.edges = {{T1, b, c, 1.0}, {T2, b, c, 1.0}};
    const ValidatedProblem vp = validate(sp);
    auto mesh = std::make_shared<const GraphMesh>(build_mesh(vp, h));
    const DampSolution sol = solve_damping(vp, mesh);

    const double T = T1 + T2;
    std::vector<double> inodes =
        matched ? concat_nodes(*mesh) : uniform_interval_mesh(q, T, h);
    const IntervalSolution isol = solve_interval(q, T, b, c, y0, std::move(inodes));
    return mismatch_against_interval(sol.y, isol);
}

std::vector<ConvergenceRow> convergence_study(const ValidatedProblem& problem,
                                              const std::vector<double>& h_list) {
    std::vector<ConvergenceRow> rows;
    std::shared_ptr<const GraphMesh> mesh;
    double h_prev = 0.0;
    for (double h : h_list) {
        if (mesh && std::abs(h_prev / 2.0 - h) <= 1e-9 * h) {
            mesh = std::make_shared<const GraphMesh>(mesh->bisect());
        } else {
            mesh = std::make_shared<const GraphMesh>(build_mesh(problem, h));
        }
        h_prev = h;

        const DampSolution sol = solve_damping(problem, mesh);
        const ControlProfile u = extract_control(problem, sol.y);
        const RoundTrip rt = roundtrip_check(problem, sol.y, u, h);
        auto fine = std::make_shared<const GraphMesh>(mesh->bisect());

        ConvergenceRow row;
        row.h = h;
        row.J = sol.J;
        row.kirchhoff = kirchhoff_residual(problem, sol.y);
        row.flux = flux_balance_residual(problem, sol.y);
        row.roundtrip_max_error = rt.max_error;
        row.rest_violation = rt.rest_violation;
        row.weak_residual = weak_residual_tilde(problem, sol.y, fine);
        rows.push_back(row);
    }
    return rows;
}

VerificationReport verify(const ValidatedProblem& problem, const GraphGridFunction& y, double h,
                          unsigned seed, int n_probes) {
    VerificationReport rep;
    rep.kirchhoff_residual = kirchhoff_residual(problem, y);
    rep.flux_residual = flux_balance_residual(problem, y);

    const ControlProfile u = extract_control(problem, y);
    const RoundTrip rt = roundtrip_check(problem, y, u, h);
    rep.roundtrip_max_error = rt.max_error;
    rep.rest_violation = rt.rest_violation;

    auto fine = std::make_shared<const GraphMesh>(y.mesh().bisect());
    rep.weak_residual = weak_residual_tilde(problem, y, fine);

    const SpaceW space(problem, y.mesh_ptr());
    const double J_y = energy(problem, y);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double margin = std::numeric_limits<double>::infinity();
    double galerkin = 0.0;
    for (int p = 0; p < n_probes; ++p) {
        Eigen::VectorXd coeffs(space.size());
        for (int i = 0; i < space.size(); ++i) coeffs[i] = dist(rng);
        const GraphGridFunction w = space.function_from(coeffs);
        const double norm_w = std::sqrt(w.w12_norm_sq());
        if (norm_w == 0.0) continue;
        galerkin = std::max(galerkin, std::abs(bilinear_form(problem, y, w)) / norm_w);
        margin = std::min(margin, energy(problem, sum_of(y, w)) - J_y);
    }
    rep.optimality_margin = std::isfinite(margin) ? margin : 0.0;
    rep.galerkin_max = galerkin;

    if (matched_two_edge(problem)) {
        const EdgeSpec& e1 = problem.edge(1);
        const IntervalSolution isol =
            solve_interval(problem.q(), problem.horizon(1) + problem.horizon(2), e1.b, e1.c,
                           problem.y0(), concat_nodes(y.mesh()));
        rep.interval_mismatch = mismatch_against_interval(y, isol);
    }
    return rep;
}

}  // namespace pantostar
