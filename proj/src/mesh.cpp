#include "pantostar/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pantostar {

namespace {

constexpr double kGauss = 0.28867513459481288;  // 1/(2*sqrt(3))

double spacing_tol(double horizon) { return 1e-12 * (1.0 + horizon); }

}  // namespace

GraphMesh::GraphMesh(double q, double T1, std::vector<std::vector<double>> nodes)
    : q_(q), T1_(T1), nodes_(std::move(nodes)) {
    for (size_t e = 0; e < nodes_.size(); ++e) {
        const auto& ns = nodes_[e];
        if (ns.size() < 2 || ns.front() != 0.0) {
            fail(Errc::InvalidInput, "edge " + std::to_string(e + 1) + ": bad node list");
        }
        for (size_t i = 0; i + 1 < ns.size(); ++i) {
            if (!(ns[i] < ns[i + 1])) {
                fail(Errc::InvalidInput,
                     "edge " + std::to_string(e + 1) + ": nodes not strictly increasing");
            }
        }
    }
}

int GraphMesh::cell_of(int edge, double t) const {
    const auto& ns = nodes(edge);
    auto it = std::upper_bound(ns.begin(), ns.end(), t);
    int i = static_cast<int>(it - ns.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(ns.size()) - 2);
}

bool GraphMesh::contains_node(int edge, double t, double tol) const {
    const auto& ns = nodes(edge);
    auto it = std::lower_bound(ns.begin(), ns.end(), t - tol);
    return it != ns.end() && std::abs(*it - t) <= tol;
}

double GraphMesh::max_spacing(int edge) const {
    const auto& ns = nodes(edge);
    double m = 0.0;
    for (size_t i = 0; i + 1 < ns.size(); ++i) m = std::max(m, ns[i + 1] - ns[i]);
    return m;
}

double GraphMesh::max_spacing() const {
    double m = 0.0;
    for (int j = 1; j <= edge_count(); ++j) m = std::max(m, max_spacing(j));
    return m;
}

GraphMesh GraphMesh::bisect() const {
    std::vector<std::vector<double>> out(nodes_.size());
    for (size_t e = 0; e < nodes_.size(); ++e) {
        const auto& ns = nodes_[e];
        auto& r = out[e];
        r.reserve(2 * ns.size());
        for (size_t i = 0; i + 1 < ns.size(); ++i) {
            r.push_back(ns[i]);
            r.push_back(0.5 * (ns[i] + ns[i + 1]));
        }
        r.push_back(ns.back());
    }
    return GraphMesh(q_, T1_, std::move(out));
}

std::vector<double> merge_breakpoints(std::vector<double> pts, double tol) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    out.reserve(pts.size());
    for (double p : pts) {
        if (out.empty() || p - out.back() > tol) {
            out.push_back(p);
        }
    }
    return out;
}

GraphMesh build_mesh(const ValidatedProblem& problem, double h) {
    if (!(h > 0.0)) {
        fail(Errc::InvalidInput, "mesh spacing h must be positive");
    }
    const int m = problem.edge_count();
    std::vector<std::vector<double>> nodes(static_cast<size_t>(m));
    for (int j = 1; j <= m; ++j) {
        const double Tj = problem.horizon(j);
        std::vector<double> marks{0.0, Tj};
        if (j == 1) {
            marks.push_back(problem.t1_over_q());
        } else {
            marks.push_back(problem.rest_onset(j));
            if (problem.handover() < Tj) marks.push_back(problem.handover());
        }
        marks = merge_breakpoints(std::move(marks), spacing_tol(Tj));

        auto& ns = nodes[static_cast<size_t>(j - 1)];
        for (size_t s = 0; s + 1 < marks.size(); ++s) {
            const double a = marks[s], b = marks[s + 1];
            const int parts = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
            ns.push_back(a);
            for (int k = 1; k < parts; ++k) {
                ns.push_back(a + (b - a) * static_cast<double>(k) / parts);
            }
        }
        ns.push_back(Tj);
    }
    return GraphMesh(problem.q(), problem.horizon(1), std::move(nodes));
}

std::vector<double> kink_points(const ValidatedProblem& problem, const GraphMesh& mesh, int edge) {
    const double q = problem.q();
    const double T1 = mesh.T1();
    const double Tj = mesh.horizon(edge);
    const double tol = spacing_tol(Tj);

    std::vector<double> pts = mesh.nodes(edge);
    if (edge == 1) {
        for (double s : mesh.nodes(1)) {
            const double p = q * s;
            if (p <= Tj + tol) pts.push_back(std::fmin(p, Tj));
        }
    } else {
        pts.push_back(problem.handover());
        for (double s : mesh.nodes(edge)) {
            const double p = q * s + problem.handover();
            if (p <= Tj + tol) pts.push_back(std::fmin(p, Tj));
        }
        // Preimages of edge-1 history nodes: delay lands at s = (t + T1)/q.
        for (double s : mesh.nodes(1)) {
            const double p = q * s - T1;
            if (p >= -tol && p <= Tj + tol) pts.push_back(std::fmin(std::fmax(p, 0.0), Tj));
        }
    }
    return merge_breakpoints(std::move(pts), tol);
}

double integrate_pw(const std::function<double(double)>& f, const std::vector<double>& pieces) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < pieces.size(); ++i) {
        const double a = pieces[i], b = pieces[i + 1];
        const double dt = b - a;
        if (dt <= 0.0) continue;
        const double mid = 0.5 * (a + b);
        const double off = kGauss * dt;
        total += 0.5 * dt * (f(mid - off) + f(mid + off));
    }
    return total;
}

}  // namespace pantostar
