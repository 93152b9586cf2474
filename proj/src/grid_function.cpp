#include "pantostar/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pantostar {

namespace {

double eval_tol(double horizon) { return 1e-12 * (1.0 + horizon); }

}  // namespace

GraphGridFunction::GraphGridFunction(std::shared_ptr<const GraphMesh> mesh)
    : mesh_(std::move(mesh)) {
    values_.resize(static_cast<size_t>(mesh_->edge_count()));
    for (int j = 1; j <= mesh_->edge_count(); ++j) {
        values_[static_cast<size_t>(j - 1)].assign(mesh_->nodes(j).size(), 0.0);
    }
}

GraphGridFunction::GraphGridFunction(std::shared_ptr<const GraphMesh> mesh,
                                     std::vector<std::vector<double>> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    for (int j = 1; j <= mesh_->edge_count(); ++j) {
        if (values_[static_cast<size_t>(j - 1)].size() != mesh_->nodes(j).size()) {
            fail(Errc::InvalidInput,
                 "edge " + std::to_string(j) + ": value count does not match mesh");
        }
    }
}

double GraphGridFunction::operator()(int edge, double t) const {
    const double Tj = mesh_->horizon(edge);
    const double tol = eval_tol(Tj);
    if (t < 0.0) {
        // Global-delay extension: y_j(t) = y_1(t + T1) on ((1/q - 1)T1, 0).
        if (edge == 1) {
            fail(Errc::TimeOutOfRange, "edge 1: t = " + std::to_string(t));
        }
        const double T1 = mesh_->T1();
        const double lo = (1.0 / mesh_->q() - 1.0) * T1;
        if (t < lo - eval_tol(T1)) {
            fail(Errc::TimeOutOfRange, "edge " + std::to_string(edge) + ": t = " + std::to_string(t));
        }
        return (*this)(1, std::fmax(t + T1, 0.0));
    }
    if (t > Tj + tol) {
        fail(Errc::TimeOutOfRange, "edge " + std::to_string(edge) + ": t = " + std::to_string(t));
    }
    t = std::fmin(t, Tj);
    const auto& ns = mesh_->nodes(edge);
    const auto& vs = values_[static_cast<size_t>(edge - 1)];
    const int i = mesh_->cell_of(edge, t);
    const double w = (t - ns[i]) / (ns[i + 1] - ns[i]);
    return vs[i] * (1.0 - w) + vs[i + 1] * w;
}

double GraphGridFunction::slope(int edge, double t, Side side) const {
    const auto& ns = mesh_->nodes(edge);
    const auto& vs = values_[static_cast<size_t>(edge - 1)];
    const double Tj = ns.back();
    const double tol = eval_tol(Tj);
    if (t < -tol || t > Tj + tol) {
        fail(Errc::TimeOutOfRange, "edge " + std::to_string(edge) + ": t = " + std::to_string(t));
    }
    t = std::fmin(std::fmax(t, 0.0), Tj);

    const auto cell_slope = [&](int i) {
        return (vs[i + 1] - vs[i]) / (ns[i + 1] - ns[i]);
    };

    int i = mesh_->cell_of(edge, t);
    // Detect whether t sits (numerically) on a node.
    int node = -1;
    if (std::abs(t - ns[i]) <= tol) node = i;
    else if (std::abs(t - ns[i + 1]) <= tol) node = i + 1;

    if (node < 0) return cell_slope(i);

    const bool has_left = node > 0;
    const bool has_right = node + 1 < static_cast<int>(ns.size());
    switch (side) {
        case Side::Left:
            if (!has_left) fail(Errc::TimeOutOfRange, "no cell to the left of t = 0");
            return cell_slope(node - 1);
        case Side::Right:
            if (!has_right) fail(Errc::TimeOutOfRange, "no cell to the right of t = T");
            return cell_slope(node);
        case Side::Auto: {
            if (!has_left) return cell_slope(0);
            if (!has_right) return cell_slope(node - 1);
            const double sl = cell_slope(node - 1), sr = cell_slope(node);
            if (std::abs(sl - sr) > 1e-9 * (1.0 + std::abs(sl) + std::abs(sr))) {
                fail(Errc::EvaluationAtKinkWithoutSideSelector,
                     "edge " + std::to_string(edge) + ", t = " + std::to_string(t));
            }
            return 0.5 * (sl + sr);
        }
    }
    return 0.0;
}

double GraphGridFunction::w12_norm_sq() const {
    double total = 0.0;
    for (int j = 1; j <= mesh_->edge_count(); ++j) {
        const auto& ns = mesh_->nodes(j);
        const auto& vs = values_[static_cast<size_t>(j - 1)];
        for (size_t i = 0; i + 1 < ns.size(); ++i) {
            const double dt = ns[i + 1] - ns[i];
            const double a = vs[i], b = vs[i + 1];
            total += dt * (a * a + a * b + b * b) / 3.0;          // int y^2
            total += (b - a) * (b - a) / dt;                      // int y'^2
        }
    }
    return total;
}

GraphGridFunction& GraphGridFunction::operator+=(const GraphGridFunction& other) {
    for (size_t e = 0; e < values_.size(); ++e) {
        if (values_[e].size() != other.values_[e].size()) {
            fail(Errc::InvalidInput, "mesh mismatch in grid-function sum");
        }
        for (size_t i = 0; i < values_[e].size(); ++i) values_[e][i] += other.values_[e][i];
    }
    return *this;
}

GraphGridFunction& GraphGridFunction::operator*=(double s) {
    for (auto& edge : values_)
        for (double& v : edge) v *= s;
    return *this;
}

EdgeControl EdgeControl::from_samples(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size()) {
        fail(Errc::UndefinedControl, "control needs matching knots/values, at least two");
    }
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i] < knots[i + 1])) {
            fail(Errc::UndefinedControl, "control knots must be strictly increasing");
        }
    }
    EdgeControl c;
    c.knots_ = std::move(knots);
    c.left_ = values;
    c.right_ = std::move(values);
    return c;
}

EdgeControl EdgeControl::from_segments(std::vector<double> knots, std::vector<double> left,
                                       std::vector<double> right) {
    if (knots.size() < 2 || left.size() != knots.size() || right.size() != knots.size()) {
        fail(Errc::UndefinedControl, "segment control needs knots/left/right of equal size");
    }
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i] < knots[i + 1])) {
            fail(Errc::UndefinedControl, "control knots must be strictly increasing");
        }
    }
    EdgeControl c;
    c.knots_ = std::move(knots);
    c.left_ = std::move(left);
    c.right_ = std::move(right);
    return c;
}

bool EdgeControl::has_jump(size_t i) const {
    return std::abs(left_[i] - right_[i]) >
           1e-13 * (1.0 + std::abs(left_[i]) + std::abs(right_[i]));
}

double EdgeControl::eval(double t, Side side) const {
    const double tol = eval_tol(knots_.back() - knots_.front());
    if (t < knots_.front() - tol || t > knots_.back() + tol) {
        fail(Errc::UndefinedControl, "control undefined at t = " + std::to_string(t));
    }
    t = std::fmin(std::fmax(t, knots_.front()), knots_.back());

    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    size_t i = static_cast<size_t>(std::clamp<std::ptrdiff_t>(it - knots_.begin() - 1, 0,
                                                              static_cast<std::ptrdiff_t>(knots_.size()) - 2));
    // Snap to a knot if within tolerance, honoring the side selector.
    size_t k = knots_.size();
    if (std::abs(t - knots_[i]) <= tol) k = i;
    else if (std::abs(t - knots_[i + 1]) <= tol) k = i + 1;

    if (k < knots_.size()) {
        if (side == Side::Left) {
            if (k == 0) fail(Errc::UndefinedControl, "no left limit at span start");
            return left_[k];
        }
        if (side == Side::Right) {
            if (k + 1 == knots_.size()) fail(Errc::UndefinedControl, "no right limit at span end");
            return right_[k];
        }
        if (k > 0 && k + 1 < knots_.size() && has_jump(k)) {
            fail(Errc::EvaluationAtKinkWithoutSideSelector,
                 "control has a jump at t = " + std::to_string(knots_[k]));
        }
        return k == 0 ? right_[k] : left_[k];
    }
    const double w = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return right_[i] * (1.0 - w) + left_[i + 1] * w;
}

double EdgeControl::integral(double a, double b) const {
    double total = 0.0;
    for (size_t i = 0; i + 1 < knots_.size(); ++i) {
        const double lo = std::max(a, knots_[i]);
        const double hi = std::min(b, knots_[i + 1]);
        if (hi <= lo) continue;
        const double dt = knots_[i + 1] - knots_[i];
        const double u_lo = right_[i] + (left_[i + 1] - right_[i]) * (lo - knots_[i]) / dt;
        const double u_hi = right_[i] + (left_[i + 1] - right_[i]) * (hi - knots_[i]) / dt;
        total += 0.5 * (u_lo + u_hi) * (hi - lo);
    }
    return total;
}

double EdgeControl::square_integral() const {
    double total = 0.0;
    for (size_t i = 0; i + 1 < knots_.size(); ++i) {
        const double dt = knots_[i + 1] - knots_[i];
        const double a = right_[i], b = left_[i + 1];
        total += dt * (a * a + a * b + b * b) / 3.0;
    }
    return total;
}

ControlProfile ControlProfile::zero(const ValidatedProblem& problem) {
    ControlProfile cp;
    for (int j = 1; j <= problem.edge_count(); ++j) {
        cp.edges.push_back(EdgeControl::from_samples({0.0, problem.horizon(j)}, {0.0, 0.0}));
    }
    return cp;
}

GraphGridFunction lift_phi(const ValidatedProblem& problem,
                           std::shared_ptr<const GraphMesh> mesh) {
    const double kink = problem.t1_over_q();
    if (!mesh->contains_node(1, kink, eval_tol(mesh->T1()))) {
        fail(Errc::MissingMandatoryNode, "edge 1 needs a node at T1/q for the lifting");
    }
    GraphGridFunction phi(std::move(mesh));
    const auto& ns = phi.mesh().nodes(1);
    auto& vs = phi.values(1);
    for (size_t i = 0; i < ns.size(); ++i) {
        vs[i] = ns[i] < kink ? problem.y0() * (1.0 - ns[i] / kink) : 0.0;
    }
    return phi;
}

}  // namespace pantostar
