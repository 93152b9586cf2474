#pragma once

#include <memory>
#include <vector>

#include "pantostar/mesh.hpp"

namespace pantostar {

/// Piecewise-linear trajectory on all edges. Evaluation of an outgoing edge
/// at negative local time routes through the vertex into edge-1 history
/// (the global-delay extension), so delayed reads never need special cases
/// at call sites.
class GraphGridFunction {
public:
    explicit GraphGridFunction(std::shared_ptr<const GraphMesh> mesh);
    GraphGridFunction(std::shared_ptr<const GraphMesh> mesh,
                      std::vector<std::vector<double>> values);

    const GraphMesh& mesh() const noexcept { return *mesh_; }
    std::shared_ptr<const GraphMesh> mesh_ptr() const noexcept { return mesh_; }

    std::vector<double>& values(int edge) { return values_[static_cast<size_t>(edge - 1)]; }
    const std::vector<double>& values(int edge) const {
        return values_[static_cast<size_t>(edge - 1)];
    }

    /// Value at local time t on the given edge; t in [(1/q - 1)T1, 0) is
    /// allowed on outgoing edges and reads y_1(t + T1).
    double operator()(int edge, double t) const;

    /// One-sided derivative. Side::Auto picks the cell slope away from nodes
    /// and throws at interior nodes where the two slopes genuinely differ.
    double slope(int edge, double t, Side side = Side::Auto) const;

    /// Exact broken W^1_2 norm squared: sum_j int (y^2 + y'^2) over [0, T_j].
    double w12_norm_sq() const;

    GraphGridFunction& operator+=(const GraphGridFunction& other);
    GraphGridFunction& operator*=(double s);

private:
    std::shared_ptr<const GraphMesh> mesh_;
    std::vector<std::vector<double>> values_;
};

/// Control on one edge: piecewise-linear over strictly increasing knots,
/// with independent one-sided values at each interior knot so that jump
/// discontinuities (slopes of hat-function minimizers) are representable.
class EdgeControl {
public:
    /// Continuous samples.
    static EdgeControl from_samples(std::vector<double> knots, std::vector<double> values);
    /// Per-piece segments; left[i]/right[i] are the limits at knots[i].
    static EdgeControl from_segments(std::vector<double> knots, std::vector<double> left,
                                     std::vector<double> right);

    const std::vector<double>& knots() const noexcept { return knots_; }
    double left_value(size_t i) const { return left_[i]; }
    double right_value(size_t i) const { return right_[i]; }
    bool has_jump(size_t i) const;

    double eval(double t, Side side = Side::Auto) const;

    /// Exact integral of u over [a, b] within the knot span.
    double integral(double a, double b) const;
    /// Exact integral of u^2 over the whole span.
    double square_integral() const;

    double span_begin() const { return knots_.front(); }
    double span_end() const { return knots_.back(); }

private:
    EdgeControl() = default;
    std::vector<double> knots_;
    std::vector<double> left_;   // limit from below at knots_[i]
    std::vector<double> right_;  // limit from above at knots_[i]
};

/// Controls for every edge of a problem, edge 1 first.
struct ControlProfile {
    std::vector<EdgeControl> edges;

    const EdgeControl& edge(int j) const { return edges[static_cast<size_t>(j - 1)]; }
    int edge_count() const noexcept { return static_cast<int>(edges.size()); }

    /// All-zero control covering each edge's horizon.
    static ControlProfile zero(const ValidatedProblem& problem);
};

/// The lifting that absorbs the initial condition: on edge 1 it falls
/// linearly from y0 at t = 0 to zero at T1/q and stays zero; it vanishes on
/// all outgoing edges. Exact on any mesh containing the node T1/q
/// (MissingMandatoryNode otherwise). Its broken W^1_2 norm squared is
/// (T1^2 + 3q^2) / (3 q T1) * y0^2.
GraphGridFunction lift_phi(const ValidatedProblem& problem,
                           std::shared_ptr<const GraphMesh> mesh);

}  // namespace pantostar
