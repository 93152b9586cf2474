#pragma once

// Executable checks of the structural theorems: Kirchhoff/flux balance at
// the vertex, the transformed weak form evaluated against refined test
// hats, the forward/variational round trip, optimality probes and the
// single-interval reduction for matched two-edge problems.

#include <optional>
#include <vector>

#include "pantostar/variational.hpp"

namespace pantostar {

/// |alpha_1 y_1'(T1-) - sum alpha_j y_j'(0+) + beta y_1(T1) + gamma y_1(T1/q)|,
/// one-sided derivatives taken from the adjacent mesh cells.
double kirchhoff_residual(const ValidatedProblem& problem, const GraphGridFunction& y);

/// |alpha_1 ell_1 y(T1-) - sum alpha_j ell_j y(0+)|. Algebraically identical
/// to the Kirchhoff form for every trajectory continuous at the vertex.
double flux_balance_residual(const ValidatedProblem& problem, const GraphGridFunction& y);

struct RoundTrip {
    double max_error = 0.0;       // max over y's nodes of |y_sim - y|
    double rest_violation = 0.0;  // max_j max over [l_j, T_j] of |y_sim|
};

/// Re-simulates the extracted control through the forward solver at step h
/// and compares against the trajectory it came from.
RoundTrip roundtrip_check(const ValidatedProblem& problem, const GraphGridFunction& y,
                          const ControlProfile& u, double h);

/// Max over test hats of the refined space of the transformed weak form
/// (the second-order route): sum_j [ alpha_j int ell_j y w' +
/// int (alpha_j b_j ell_j y + ell~_j y) w ]. Independent of the assembly
/// path, which uses the symmetric first-order form.
double weak_residual_tilde(const ValidatedProblem& problem, const GraphGridFunction& y,
                           std::shared_ptr<const GraphMesh> mesh_fine);

/// Scalar transformed form for arbitrary y, w (equivalence and orthogonality
/// tests).
double transformed_form(const ValidatedProblem& problem, const GraphGridFunction& y,
                        const GraphGridFunction& w);

/// Solves the matched two-edge graph problem (b1 = b2, c1 = c2,
/// alpha = [1, 1]) and, independently, the single-interval problem on
/// [0, T1 + T2] it concatenates to; returns the max pointwise mismatch.
/// With matched = true the interval mesh is the concatenation of the edge
/// meshes (identical discrete systems up to roundoff).
double interval_reduction_check(double q, double T1, double T2, double b, double c, double y0,
                                double h, bool matched = true);

struct ConvergenceRow {
    double h = 0.0;
    double J = 0.0;
    double kirchhoff = 0.0;
    double flux = 0.0;
    double roundtrip_max_error = 0.0;
    double rest_violation = 0.0;
    double weak_residual = 0.0;
};

/// One row per step size. Consecutive halvings reuse the previous mesh by
/// bisection, so the hat spaces nest and J is nonincreasing.
std::vector<ConvergenceRow> convergence_study(const ValidatedProblem& problem,
                                              const std::vector<double>& h_list);

struct VerificationReport {
    double kirchhoff_residual = 0.0;
    double flux_residual = 0.0;
    double roundtrip_max_error = 0.0;
    double rest_violation = 0.0;
    double weak_residual = 0.0;
    double optimality_margin = 0.0;  // min over probes of J(y+w) - J(y)
    double galerkin_max = 0.0;       // max over probes of |B(y,w)| / ||w||
    std::optional<double> interval_mismatch;
};

/// Runs every check against a trajectory. h is the forward-simulation step
/// for the round trip; probes are seeded random members of W on y's mesh.
VerificationReport verify(const ValidatedProblem& problem, const GraphGridFunction& y, double h,
                          unsigned seed = 42, int n_probes = 100);

}  // namespace pantostar
