#pragma once

// Per-edge 1-D node grids. Mandatory breakpoints (T1/q and T1 on edge 1;
// l_j and (q-1)T1 on outgoing edges) are always present so that the lifting
// is representable and all energy integrands stay piecewise quadratic over
// the kink splitting.

#include <functional>
#include <memory>
#include <vector>

#include "pantostar/problem.hpp"

namespace pantostar {

class GraphMesh {
public:
    GraphMesh(double q, double T1, std::vector<std::vector<double>> nodes);

    int edge_count() const noexcept { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes(int edge) const {
        return nodes_[static_cast<size_t>(edge - 1)];
    }
    double horizon(int edge) const { return nodes(edge).back(); }
    double q() const noexcept { return q_; }
    double T1() const noexcept { return T1_; }

    /// Index i such that t lies in [nodes[i], nodes[i+1]] (clamped at the ends).
    int cell_of(int edge, double t) const;

    bool contains_node(int edge, double t, double tol) const;

    double max_spacing() const;
    double max_spacing(int edge) const;

    /// Every cell split in half: nested refinement (hat spaces nest too).
    GraphMesh bisect() const;

private:
    double q_;
    double T1_;
    std::vector<std::vector<double>> nodes_;
};

/// Uniform-ish grid per edge with spacing <= h, refined from the mandatory
/// breakpoints outward. Deterministic in (problem, h).
GraphMesh build_mesh(const ValidatedProblem& problem, double h);

/// All points where ell_j of a piecewise-linear function on this mesh can
/// break: the edge's own nodes, the handover point (j >= 2), and the
/// preimages of mesh nodes under the delay argument.
std::vector<double> kink_points(const ValidatedProblem& problem, const GraphMesh& mesh, int edge);

/// Two-point Gauss rule per piece: exact for piecewise-quadratic f.
double integrate_pw(const std::function<double(double)>& f, const std::vector<double>& pieces);

/// Merges extra breakpoints into a sorted piece list (deduplicated).
std::vector<double> merge_breakpoints(std::vector<double> pts, double tol);

}  // namespace pantostar
