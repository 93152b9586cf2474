#pragma once

// Star-graph damping problem with time-proportional delay. Edge 1 is the
// incoming edge [0, T1]; at its far end the process branches into edges
// 2..m, each parameterized from 0. The delay argument on edge 1 is t/q;
// on outgoing edges it is (t - (q-1)T1)/q and, while negative, is resolved
// through the vertex into edge-1 history.

#include <vector>

#include "pantostar/error.hpp"

namespace pantostar {

/// One edge: horizon T, drift b, delay coefficient c, energy weight alpha.
struct EdgeSpec {
    double T = 1.0;
    double b = 0.0;
    double c = 0.0;
    double alpha = 1.0;
};

/// Raw problem data as read from input; validate() before use.
struct StarProblem {
    double q = 2.0;
    double y0 = 0.0;
    std::vector<EdgeSpec> edges;  // edges[0] is the incoming edge
};

/// Resolution of a delayed argument: edge index (1-based) and local time on it.
struct DelayTarget {
    int edge = 1;
    double time = 0.0;
};

enum class Side { Auto, Left, Right };

/// Problem with invariants checked and the derived constants cached:
/// rest-onset lengths l_j, the vertex constants beta/gamma, the handover
/// time (q-1)T1 and the edge-1 compression fixed image T1/q.
class ValidatedProblem {
public:
    double q() const noexcept { return data_.q; }
    double y0() const noexcept { return data_.y0; }
    int edge_count() const noexcept { return static_cast<int>(data_.edges.size()); }

    /// 1-based access, edge 1 = incoming.
    const EdgeSpec& edge(int j) const { return data_.edges[static_cast<size_t>(j - 1)]; }
    double horizon(int j) const { return edge(j).T; }

    /// l_1 = T1, l_j = (T_j - (q-1)T1)/q: time after which edge j must rest.
    double rest_onset(int j) const { return lengths_[static_cast<size_t>(j - 1)]; }
    /// (q-1)T1: where the outgoing delay argument crosses from history to the edge itself.
    double handover() const noexcept { return handover_; }
    /// T1/q: kink of the lifting and branch point of the transformed operators on edge 1.
    double t1_over_q() const noexcept { return t1_over_q_; }

    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }

    const StarProblem& data() const noexcept { return data_; }

    /// Resolves the delayed argument of edge j at local time t (Eq.-style
    /// routing: negative outgoing arguments read edge-1 history).
    DelayTarget delay_argument(int j, double t) const;

    /// A copy with y0 replaced (coefficients untouched, no revalidation needed).
    ValidatedProblem with_y0(double y0) const;

private:
    friend ValidatedProblem validate(const StarProblem& problem);
    ValidatedProblem() = default;

    StarProblem data_;
    std::vector<double> lengths_;
    double handover_ = 0.0;
    double t1_over_q_ = 0.0;
    double beta_ = 0.0;
    double gamma_ = 0.0;
};

/// Checks q > 1, m >= 2, T_j > 0, alpha_j > 0 and T_j > (q-1)T1 for j >= 2
/// (equality rejected: the rest interval would cover the whole edge).
/// Caches l_j, beta = a1 b1 - sum a_j b_j and gamma = a1 c1 - sum a_j c_j.
ValidatedProblem validate(const StarProblem& problem);

/// (beta, gamma) of a validated problem.
std::pair<double, double> beta_gamma(const ValidatedProblem& problem);

}  // namespace pantostar
