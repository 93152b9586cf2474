#include "pantostar/problem.hpp"

#include <cmath>
#include <string>

namespace pantostar {

ValidatedProblem validate(const StarProblem& problem) {
    if (!(problem.q > 1.0)) {
        fail(Errc::CompressionNotGreaterThanOne,
             "q = " + std::to_string(problem.q) + ", need q > 1");
    }
    if (problem.edges.size() < 2) {
        fail(Errc::TooFewEdges, "need an incoming edge and at least one outgoing edge");
    }
    const double q = problem.q;
    const double T1 = problem.edges.front().T;
    if (!(T1 > 0.0)) {
        fail(Errc::HorizonTooShort, "edge 1: T = " + std::to_string(T1) + ", need T > 0");
    }

    ValidatedProblem out;
    out.data_ = problem;
    out.handover_ = (q - 1.0) * T1;
    out.t1_over_q_ = T1 / q;
    out.lengths_.resize(problem.edges.size());
    out.lengths_[0] = T1;

    for (size_t i = 0; i < problem.edges.size(); ++i) {
        const EdgeSpec& e = problem.edges[i];
        const int j = static_cast<int>(i) + 1;
        if (!(e.alpha > 0.0)) {
            fail(Errc::NonPositiveWeight,
                 "edge " + std::to_string(j) + ": alpha = " + std::to_string(e.alpha));
        }
        if (!(e.T > 0.0)) {
            fail(Errc::HorizonTooShort,
                 "edge " + std::to_string(j) + ": T = " + std::to_string(e.T));
        }
        if (i > 0) {
            if (!(e.T > out.handover_)) {
                fail(Errc::HorizonTooShort,
                     "edge " + std::to_string(j) + ": T = " + std::to_string(e.T) +
                         " must exceed (q-1)T1 = " + std::to_string(out.handover_));
            }
            out.lengths_[i] = (e.T - out.handover_) / q;
        }
    }

    const EdgeSpec& e1 = problem.edges.front();
    double beta = e1.alpha * e1.b;
    double gamma = e1.alpha * e1.c;
    for (size_t i = 1; i < problem.edges.size(); ++i) {
        beta -= problem.edges[i].alpha * problem.edges[i].b;
        gamma -= problem.edges[i].alpha * problem.edges[i].c;
    }
    out.beta_ = beta;
    out.gamma_ = gamma;
    return out;
}

std::pair<double, double> beta_gamma(const ValidatedProblem& problem) {
    return {problem.beta(), problem.gamma()};
}

DelayTarget ValidatedProblem::delay_argument(int j, double t) const {
    const double Tj = horizon(j);
    const double tol = 1e-12 * (1.0 + Tj);
    if (t < -tol || t > Tj + tol) {
        fail(Errc::TimeOutOfRange, "edge " + std::to_string(j) + ": t = " + std::to_string(t));
    }
    t = std::fmin(std::fmax(t, 0.0), Tj);
    if (j == 1) {
        return {1, t / q()};
    }
    const double tau = (t - handover_) / q();
    if (tau >= 0.0) {
        return {j, tau};
    }
    return {1, tau + horizon(1)};
}

ValidatedProblem ValidatedProblem::with_y0(double y0) const {
    ValidatedProblem out = *this;
    out.data_.y0 = y0;
    return out;
}

}  // namespace pantostar
