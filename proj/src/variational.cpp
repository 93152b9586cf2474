#include "pantostar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pantostar/forward.hpp"

namespace pantostar {

namespace {

constexpr double kGauss = 0.28867513459481288;  // 1/(2*sqrt(3))

struct NodeCoeff {
    int edge;
    int node;
    double w;
};

// Coefficients of v |-> v_edge(t) over the two bracketing nodes.
void value_coeffs(const GraphMesh& mesh, int edge, double t, double scale,
                  std::vector<NodeCoeff>& out) {
    const auto& ns = mesh.nodes(edge);
    const int i = mesh.cell_of(edge, t);
    const double w = (t - ns[i]) / (ns[i + 1] - ns[i]);
    out.push_back({edge, i, scale * (1.0 - w)});
    out.push_back({edge, i + 1, scale * w});
}

// Coefficients of v |-> v_edge'(t) for t strictly inside a cell.
void slope_coeffs(const GraphMesh& mesh, int edge, double t, double scale,
                  std::vector<NodeCoeff>& out) {
    const auto& ns = mesh.nodes(edge);
    const int i = mesh.cell_of(edge, t);
    const double inv = 1.0 / (ns[i + 1] - ns[i]);
    out.push_back({edge, i, -scale * inv});
    out.push_back({edge, i + 1, scale * inv});
}

// Coefficients of v |-> ell_j v(t); the delayed argument is resolved first,
// so every entry refers to a concrete (edge, node).
void ell_coeffs(const ValidatedProblem& problem, const GraphMesh& mesh, int j, double t,
                std::vector<NodeCoeff>& out) {
    const EdgeSpec& e = problem.edge(j);
    slope_coeffs(mesh, j, t, 1.0, out);
    if (e.b != 0.0) value_coeffs(mesh, j, t, e.b, out);
    if (e.c != 0.0) {
        const DelayTarget d = problem.delay_argument(j, t);
        value_coeffs(mesh, d.edge, d.time, e.c, out);
    }
}

// (dof, coeff) pairs with duplicates merged and constrained nodes dropped.
void to_dofs(const SpaceW& space, const std::vector<NodeCoeff>& raw,
             std::vector<std::pair<int, double>>& out) {
    out.clear();
    for (const NodeCoeff& nc : raw) {
        const int d = space.dof(nc.edge, nc.node);
        if (d < 0) continue;
        bool found = false;
        for (auto& [dof, w] : out) {
            if (dof == d) {
                w += nc.w;
                found = true;
                break;
            }
        }
        if (!found) out.emplace_back(d, nc.w);
    }
}

double piece_tol(double horizon) { return 1e-12 * (1.0 + horizon); }

}  // namespace

SpaceW::SpaceW(const ValidatedProblem& problem, std::shared_ptr<const GraphMesh> mesh)
    : mesh_(std::move(mesh)) {
    const int m = mesh_->edge_count();
    dofs_.resize(static_cast<size_t>(m));

    const auto& n1 = mesh_->nodes(1);
    auto& d1 = dofs_[0];
    d1.assign(n1.size(), -1);
    for (size_t i = 1; i + 1 < n1.size(); ++i) d1[i] = size_++;
    vertex_dof_ = size_++;
    d1.back() = vertex_dof_;

    for (int j = 2; j <= m; ++j) {
        const auto& ns = mesh_->nodes(j);
        const double lj = problem.rest_onset(j);
        const double tol = piece_tol(ns.back());
        auto& dj = dofs_[static_cast<size_t>(j - 1)];
        dj.assign(ns.size(), -1);
        dj[0] = vertex_dof_;
        for (size_t i = 1; i < ns.size(); ++i) {
            if (ns[i] < lj - tol) dj[i] = size_++;
        }
    }
}

GraphGridFunction SpaceW::function_from(const Eigen::VectorXd& coeffs) const {
    GraphGridFunction f(mesh_);
    for (int j = 1; j <= mesh_->edge_count(); ++j) {
        auto& vs = f.values(j);
        for (size_t i = 0; i < vs.size(); ++i) {
            const int d = dof(j, static_cast<int>(i));
            if (d >= 0) vs[i] = coeffs[d];
        }
    }
    return f;
}

GraphGridFunction SpaceW::function_from(const Eigen::VectorXd& coeffs,
                                        const GraphGridFunction& lift) const {
    GraphGridFunction f = function_from(coeffs);
    f += lift;
    return f;
}

EnergyForm assemble(const ValidatedProblem& problem, std::shared_ptr<const GraphMesh> mesh) {
    auto space = std::make_shared<SpaceW>(problem, mesh);
    const int n = space->size();
    EnergyForm form{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), space};

    const GraphGridFunction phi = lift_phi(problem, mesh);
    std::vector<NodeCoeff> raw;
    std::vector<std::pair<int, double>> entries;

    for (int j = 1; j <= problem.edge_count(); ++j) {
        const double alpha = problem.edge(j).alpha;
        const std::vector<double> pieces = kink_points(problem, *mesh, j);
        const double tol = piece_tol(mesh->horizon(j));
        for (size_t p = 0; p + 1 < pieces.size(); ++p) {
            const double dt = pieces[p + 1] - pieces[p];
            if (dt <= tol) continue;
            const double mid = 0.5 * (pieces[p] + pieces[p + 1]);
            const double off = kGauss * dt;
            for (const double tg : {mid - off, mid + off}) {
                raw.clear();
                ell_coeffs(problem, *mesh, j, tg, raw);
                to_dofs(*space, raw, entries);
                const double wg = 0.5 * dt * alpha;
                const double phi_val = apply_ell(problem, phi, j, tg);
                for (const auto& [di, vi] : entries) {
                    form.rhs[di] -= wg * phi_val * vi;
                    for (const auto& [dk, vk] : entries) {
                        form.matrix(di, dk) += wg * vi * vk;
                    }
                }
            }
        }
    }
    return form;
}

DampSolution solve_damping(const ValidatedProblem& problem,
                           std::shared_ptr<const GraphMesh> mesh) {
    EnergyForm form = assemble(problem, mesh);
    Eigen::LLT<Eigen::MatrixXd> llt(form.matrix);
    if (llt.info() != Eigen::Success) {
        fail(Errc::NotPositiveDefinite,
             "energy form factorization failed (assembly bug or degenerate input)");
    }
    const Eigen::VectorXd x = llt.solve(form.rhs);
    const GraphGridFunction phi = lift_phi(problem, mesh);
    GraphGridFunction y = form.space->function_from(x, phi);

    DampSolution out{std::move(y), 0.0, 0.0, 0.0, form.space->size()};
    out.J = energy(problem, out.y);
    out.vertex_value = out.y(1, mesh->T1());
    out.linear_residual = (form.matrix * x - form.rhs).norm();
    return out;
}

double energy(const ValidatedProblem& problem, const GraphGridFunction& y) {
    double total = 0.0;
    for (int j = 1; j <= problem.edge_count(); ++j) {
        const double alpha = problem.edge(j).alpha;
        const auto f = [&](double t) {
            const double v = apply_ell(problem, y, j, t);
            return v * v;
        };
        total += alpha * integrate_pw(f, kink_points(problem, y.mesh(), j));
    }
    return total;
}

double bilinear_form(const ValidatedProblem& problem, const GraphGridFunction& y,
                     const GraphGridFunction& w) {
    double total = 0.0;
    for (int j = 1; j <= problem.edge_count(); ++j) {
        const double alpha = problem.edge(j).alpha;
        std::vector<double> pieces = kink_points(problem, y.mesh(), j);
        if (&y.mesh() != &w.mesh()) {
            const std::vector<double> other = kink_points(problem, w.mesh(), j);
            pieces.insert(pieces.end(), other.begin(), other.end());
            pieces = merge_breakpoints(std::move(pieces), piece_tol(y.mesh().horizon(j)));
        }
        const auto f = [&](double t) {
            return apply_ell(problem, y, j, t) * apply_ell(problem, w, j, t);
        };
        total += alpha * integrate_pw(f, pieces);
    }
    return total;
}

ControlProfile extract_control(const ValidatedProblem& problem, const GraphGridFunction& y) {
    ControlProfile cp;
    for (int j = 1; j <= problem.edge_count(); ++j) {
        const std::vector<double> knots = kink_points(problem, y.mesh(), j);
        std::vector<double> left(knots.size()), right(knots.size());
        for (size_t i = 0; i < knots.size(); ++i) {
            const bool first = (i == 0), last = (i + 1 == knots.size());
            if (!last) right[i] = apply_ell(problem, y, j, knots[i], Side::Right);
            if (!first) left[i] = apply_ell(problem, y, j, knots[i], Side::Left);
            if (first) left[i] = right[i];
            if (last) right[i] = left[i];
        }
        cp.edges.push_back(
            EdgeControl::from_segments(knots, std::move(left), std::move(right)));
    }
    return cp;
}

}  // namespace pantostar
