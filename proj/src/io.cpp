#include "pantostar/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pantostar {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double require_number(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        fail(Errc::InvalidInput, std::string("missing or non-numeric field \"") + key + "\"");
    }
    return obj[key].get<double>();
}

struct CsvRow {
    int edge;
    double t;
    double v;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (first) {
            first = false;
            if (!line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])) &&
                line[0] != '-') {
                continue;  // header
            }
        }
        CsvRow row{};
        char extra;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf %c", &row.edge, &row.t, &row.v, &extra) < 3) {
            fail(Errc::InvalidInput, "bad CSV line: " + line);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

StarProblem problem_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::InvalidInput, std::string("problem JSON: ") + e.what());
    }
    StarProblem p;
    p.q = require_number(doc, "q");
    p.y0 = require_number(doc, "y0");
    if (!doc.contains("edges") || !doc["edges"].is_array()) {
        fail(Errc::InvalidInput, "missing \"edges\" array");
    }
    for (const auto& e : doc["edges"]) {
        EdgeSpec spec;
        spec.T = require_number(e, "T");
        spec.b = e.value("b", 0.0);
        spec.c = e.value("c", 0.0);
        spec.alpha = e.value("alpha", 1.0);
        p.edges.push_back(spec);
    }
    return p;
}

StarProblem load_problem(const std::string& path) { return problem_from_json(read_text(path)); }

std::string trajectory_to_csv(const GraphGridFunction& y) {
    std::string out = "edge,t,y\n";
    for (int j = 1; j <= y.mesh().edge_count(); ++j) {
        const auto& ns = y.mesh().nodes(j);
        const auto& vs = y.values(j);
        for (size_t i = 0; i < ns.size(); ++i) {
            out += std::to_string(j) + "," + fmt(ns[i]) + "," + fmt(vs[i]) + "\n";
        }
    }
    return out;
}

void write_trajectory_csv(const std::string& path, const GraphGridFunction& y) {
    write_text(path, trajectory_to_csv(y));
}

void write_control_csv(const std::string& path, const ControlProfile& u) {
    write_text(path, control_to_csv(u));
}

GraphGridFunction trajectory_from_csv(const ValidatedProblem& problem, const std::string& text) {
    std::map<int, std::vector<std::pair<double, double>>> per_edge;
    for (const CsvRow& row : parse_csv(text)) per_edge[row.edge].emplace_back(row.t, row.v);

    const int m = problem.edge_count();
    std::vector<std::vector<double>> nodes(static_cast<size_t>(m));
    std::vector<std::vector<double>> values(static_cast<size_t>(m));
    for (int j = 1; j <= m; ++j) {
        auto it = per_edge.find(j);
        if (it == per_edge.end() || it->second.size() < 2) {
            fail(Errc::InvalidInput, "trajectory CSV lacks edge " + std::to_string(j));
        }
        for (const auto& [t, v] : it->second) {
            nodes[static_cast<size_t>(j - 1)].push_back(t);
            values[static_cast<size_t>(j - 1)].push_back(v);
        }
    }
    auto mesh = std::make_shared<const GraphMesh>(problem.q(), problem.horizon(1),
                                                  std::move(nodes));
    return GraphGridFunction(mesh, std::move(values));
}

GraphGridFunction load_trajectory(const ValidatedProblem& problem, const std::string& path) {
    return trajectory_from_csv(problem, read_text(path));
}

std::string control_to_csv(const ControlProfile& u) {
    std::string out = "edge,t,u\n";
    for (int j = 1; j <= u.edge_count(); ++j) {
        const EdgeControl& ec = u.edge(j);
        const auto& ks = ec.knots();
        for (size_t i = 0; i < ks.size(); ++i) {
            if (i > 0 && i + 1 < ks.size() && ec.has_jump(i)) {
                out += std::to_string(j) + "," + fmt(ks[i]) + "," + fmt(ec.left_value(i)) + "\n";
                out += std::to_string(j) + "," + fmt(ks[i]) + "," + fmt(ec.right_value(i)) + "\n";
            } else {
                const double v = i == 0 ? ec.right_value(i) : ec.left_value(i);
                out += std::to_string(j) + "," + fmt(ks[i]) + "," + fmt(v) + "\n";
            }
        }
    }
    return out;
}

ControlProfile control_from_csv(const ValidatedProblem& problem, const std::string& text) {
    std::map<int, std::vector<std::pair<double, double>>> per_edge;
    for (const CsvRow& row : parse_csv(text)) per_edge[row.edge].emplace_back(row.t, row.v);

    ControlProfile cp;
    for (int j = 1; j <= problem.edge_count(); ++j) {
        auto it = per_edge.find(j);
        if (it == per_edge.end() || it->second.size() < 2) {
            fail(Errc::UndefinedControl, "control CSV lacks edge " + std::to_string(j));
        }
        const auto& samples = it->second;
        std::vector<double> knots, left, right;
        const double tol = 1e-12 * (1.0 + problem.horizon(j));
        for (size_t i = 0; i < samples.size(); ++i) {
            const auto& [t, v] = samples[i];
            if (!knots.empty() && t <= knots.back() + tol) {
                if (t < knots.back() - tol) {
                    fail(Errc::UndefinedControl, "control CSV times must be non-decreasing");
                }
                right.back() = v;  // second row at the same knot: right limit
            } else {
                knots.push_back(t);
                left.push_back(v);
                right.push_back(v);
            }
        }
        cp.edges.push_back(EdgeControl::from_segments(std::move(knots), std::move(left),
                                                      std::move(right)));
    }
    return cp;
}

ControlProfile load_control(const ValidatedProblem& problem, const std::string& path) {
    return control_from_csv(problem, read_text(path));
}

std::string report_to_json(const VerificationReport& report) {
    json doc;
    doc["kirchhoff_residual"] = report.kirchhoff_residual;
    doc["flux_residual"] = report.flux_residual;
    doc["roundtrip_max_error"] = report.roundtrip_max_error;
    doc["rest_violation"] = report.rest_violation;
    doc["weak_residual"] = report.weak_residual;
    doc["optimality_margin"] = report.optimality_margin;
    doc["galerkin_max"] = report.galerkin_max;
    if (report.interval_mismatch) doc["interval_mismatch"] = *report.interval_mismatch;
    return doc.dump(2) + "\n";
}

std::string damp_report_to_json(const DampSolution& sol, const VerificationReport& report) {
    json doc;
    doc["J"] = sol.J;
    doc["vertex_value"] = sol.vertex_value;
    doc["n_dofs"] = sol.n_dofs;
    doc["linear_residual"] = sol.linear_residual;
    json res;
    res["kirchhoff"] = report.kirchhoff_residual;
    res["flux"] = report.flux_residual;
    res["roundtrip_max_error"] = report.roundtrip_max_error;
    res["rest_violation"] = report.rest_violation;
    res["weak_residual"] = report.weak_residual;
    doc["residuals"] = res;
    return doc.dump(2) + "\n";
}

std::string study_to_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out = "h,J,kirchhoff,flux,roundtrip_max_error,rest_violation,weak_residual\n";
    for (const auto& r : rows) {
        out += fmt(r.h) + "," + fmt(r.J) + "," + fmt(r.kirchhoff) + "," + fmt(r.flux) + "," +
               fmt(r.roundtrip_max_error) + "," + fmt(r.rest_violation) + "," +
               fmt(r.weak_residual) + "\n";
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::InvalidInput, "cannot open for writing: " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::InvalidInput, "cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pantostar
