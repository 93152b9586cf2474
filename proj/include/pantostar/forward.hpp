#pragma once

// Forward (Cauchy) solver for given controls, the analytic pantograph
// series used as its oracle, and pointwise application of the edge
// operators ell_j y = y' + b y + c y(delayed).

#include <memory>

#include "pantostar/grid_function.hpp"

namespace pantostar {

struct SeriesResult {
    double value = 0.0;
    double truncation_bound = 0.0;  // magnitude of the first omitted term
};

/// Partial sum of the series solving y'(t) = -c y(t/q), y(0) = y0:
/// y(t) = y0 * sum_n (-c)^n q^{-n(n-1)/2} t^n / n!. Terms decay
/// superexponentially for q > 1.
SeriesResult pantograph_series(double y0, double c, double q, double t, int n_terms);

/// ell_j y at local time t; the delayed argument is routed through the
/// vertex automatically. Side selects the one-sided derivative at kinks.
double apply_ell(const ValidatedProblem& problem, const GraphGridFunction& y, int edge, double t,
                 Side side = Side::Auto);

/// Marches the Cauchy problem on the build_mesh(problem, h) grid: edge 1
/// first, then the outgoing edges against its history. Explicit trapezoidal
/// predictor-corrector (corrector iterated to tolerance), second-order in h.
/// The delayed argument always points into already-computed history except
/// possibly within the current step, where the corrector iterate is used.
GraphGridFunction solve_cauchy(const ValidatedProblem& problem, const ControlProfile& controls,
                               double h);

/// A-posteriori consistency of a computed y_1 with the Volterra second-kind
/// form y1(t) = y0 + int_0^t u1 - b1 int_0^t y1 - q c1 int_0^{t/q} y1.
/// Returns the max residual over edge-1 mesh nodes (integrals exact for the
/// piecewise-linear data).
double volterra_residual(const ValidatedProblem& problem, const GraphGridFunction& y,
                         const ControlProfile& controls);

}  // namespace pantostar
