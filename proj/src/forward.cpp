#include "pantostar/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pantostar {

SeriesResult pantograph_series(double y0, double c, double q, double t, int n_terms) {
    if (n_terms < 1) fail(Errc::InvalidInput, "n_terms must be >= 1");
    if (!(q > 1.0)) fail(Errc::CompressionNotGreaterThanOne, "series requires q > 1");
    double term = y0;  // n = 0
    double sum = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        sum += term;
        // a_{n+1} = a_n * (-c) * q^{-n} * t / (n+1)
        term *= -c * t / (std::pow(q, n) * (n + 1));
    }
    return {sum, std::abs(term)};
}

double apply_ell(const ValidatedProblem& problem, const GraphGridFunction& y, int edge, double t,
                 Side side) {
    const EdgeSpec& e = problem.edge(edge);
    const DelayTarget d = problem.delay_argument(edge, t);
    return y.slope(edge, t, side) + e.b * y(edge, t) + e.c * y(d.edge, d.time);
}

namespace {

// March one edge over its grid. The right-hand side at time t is
// u(t) - b y(t) - c y(delayed(t)); `history` resolves delayed arguments that
// fall before the current cell, while in-cell arguments interpolate between
// the cell endpoints (predictor-corrector iterate).
void march_edge(const ValidatedProblem& problem, int edge, const EdgeControl& u,
                const std::vector<double>& grid, double y_start,
                const GraphGridFunction* edge1_history, std::vector<double>& out) {
    const EdgeSpec& spec = problem.edge(edge);
    out.assign(grid.size(), 0.0);
    out[0] = y_start;

    auto delayed_value = [&](double t, size_t cell, double y_lo, double y_hi) {
        const DelayTarget d = problem.delay_argument(edge, t);
        if (d.edge != edge) {
            return (*edge1_history)(d.edge, d.time);
        }
        const double t0 = grid[cell], t1 = grid[cell + 1];
        if (d.time <= t0) {
            // Already-computed prefix of this edge: piecewise linear in `out`.
            auto it = std::upper_bound(grid.begin(), grid.begin() + cell + 1, d.time);
            size_t i = static_cast<size_t>(std::max<std::ptrdiff_t>(it - grid.begin() - 1, 0));
            const double w = (d.time - grid[i]) / (grid[i + 1] - grid[i]);
            return out[i] * (1.0 - w) + out[i + 1] * w;
        }
        const double w = (d.time - t0) / (t1 - t0);
        return y_lo * (1.0 - w) + y_hi * w;
    };

    for (size_t n = 0; n + 1 < grid.size(); ++n) {
        const double t0 = grid[n], t1 = grid[n + 1];
        const double dt = t1 - t0;
        const double y0v = out[n];
        const double f0 = u.eval(t0, Side::Right) - spec.b * y0v -
                          spec.c * delayed_value(t0, n, y0v, y0v);
        double z = y0v + dt * f0;  // Euler predictor
        const double u1v = u.eval(t1, Side::Left);
        for (int it = 0; it < 50; ++it) {
            const double f1 = u1v - spec.b * z - spec.c * delayed_value(t1, n, y0v, z);
            const double z_new = y0v + 0.5 * dt * (f0 + f1);
            if (std::abs(z_new - z) <= 1e-15 * (1.0 + std::abs(z_new))) {
                z = z_new;
                break;
            }
            z = z_new;
        }
        out[n + 1] = z;
    }
}

}  // namespace

GraphGridFunction solve_cauchy(const ValidatedProblem& problem, const ControlProfile& controls,
                               double h) {
    if (!(h > 0.0)) fail(Errc::StepTooLarge, "step h must be positive");
    double min_T = problem.horizon(1);
    for (int j = 2; j <= problem.edge_count(); ++j) min_T = std::min(min_T, problem.horizon(j));
    if (h > min_T) {
        fail(Errc::StepTooLarge,
             "h = " + std::to_string(h) + " exceeds the shortest edge " + std::to_string(min_T));
    }
    if (controls.edge_count() != problem.edge_count()) {
        fail(Errc::UndefinedControl, "controls must cover every edge");
    }
    for (int j = 1; j <= problem.edge_count(); ++j) {
        const auto& u = controls.edge(j);
        const double tol = 1e-12 * (1.0 + problem.horizon(j));
        if (u.span_begin() > tol || u.span_end() < problem.horizon(j) - tol) {
            fail(Errc::UndefinedControl,
                 "edge " + std::to_string(j) + ": control does not cover [0, T]");
        }
    }

    auto mesh = std::make_shared<const GraphMesh>(build_mesh(problem, h));
    GraphGridFunction y(mesh);

    march_edge(problem, 1, controls.edge(1), mesh->nodes(1), problem.y0(), nullptr, y.values(1));
    const double vertex = y.values(1).back();
    for (int j = 2; j <= problem.edge_count(); ++j) {
        march_edge(problem, j, controls.edge(j), mesh->nodes(j), vertex, &y, y.values(j));
    }
    return y;
}

double volterra_residual(const ValidatedProblem& problem, const GraphGridFunction& y,
                         const ControlProfile& controls) {
    const EdgeSpec& e1 = problem.edge(1);
    const auto& ns = y.mesh().nodes(1);
    const auto& vs = y.values(1);

    // Exact running integral of the piecewise-linear y_1 up to each node.
    std::vector<double> cum(ns.size(), 0.0);
    for (size_t i = 0; i + 1 < ns.size(); ++i) {
        cum[i + 1] = cum[i] + 0.5 * (vs[i] + vs[i + 1]) * (ns[i + 1] - ns[i]);
    }
    auto int_y1 = [&](double t) {
        const int i = y.mesh().cell_of(1, t);
        const double t0 = ns[i];
        const double v0 = vs[i];
        const double vt = y(1, t);
        return cum[i] + 0.5 * (v0 + vt) * (t - t0);
    };

    double worst = 0.0;
    for (size_t i = 0; i < ns.size(); ++i) {
        const double t = ns[i];
        const double r = vs[i] - problem.y0() - controls.edge(1).integral(0.0, t) +
                         e1.b * int_y1(t) + problem.q() * e1.c * int_y1(t / problem.q());
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace pantostar
