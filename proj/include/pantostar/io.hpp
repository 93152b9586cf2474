#pragma once

#include <string>

#include "pantostar/verifier.hpp"

namespace pantostar {

/// Problem document: {"q": .., "y0": .., "edges": [{"T","b","c","alpha"}, ..]}
/// with edges[0] the incoming edge. "alpha" defaults to 1, "b"/"c" to 0.
StarProblem problem_from_json(const std::string& text);
StarProblem load_problem(const std::string& path);

/// Trajectory CSV: header "edge,t,y", rows per edge with t ascending.
std::string trajectory_to_csv(const GraphGridFunction& y);
void write_trajectory_csv(const std::string& path, const GraphGridFunction& y);
/// Rebuilds the grid function (and its mesh) from CSV rows; q and T1 come
/// from the problem.
GraphGridFunction trajectory_from_csv(const ValidatedProblem& problem, const std::string& text);
GraphGridFunction load_trajectory(const ValidatedProblem& problem, const std::string& path);

/// Control CSV: header "edge,t,u"; a knot written twice (left limit first)
/// encodes a jump.
std::string control_to_csv(const ControlProfile& u);
void write_control_csv(const std::string& path, const ControlProfile& u);
ControlProfile control_from_csv(const ValidatedProblem& problem, const std::string& text);
ControlProfile load_control(const ValidatedProblem& problem, const std::string& path);

std::string report_to_json(const VerificationReport& report);
std::string damp_report_to_json(const DampSolution& sol, const VerificationReport& report);
std::string study_to_csv(const std::vector<ConvergenceRow>& rows);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace pantostar
