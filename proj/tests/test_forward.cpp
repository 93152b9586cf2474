#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pantostar/forward.hpp"
#include "pantostar/variational.hpp"

using namespace pantostar;

namespace {

ValidatedProblem pantograph_problem(double q, double c) {
    StarProblem p;
    p.q = q;
    p.y0 = 1.0;
    // Edge 1 carries the pantograph dynamics on [0, 1]; the outgoing edge is
    // inert and does not feed back.
    p.edges = {{1.0, 0.0, c, 1.0}, {(q - 1.0) + 1.0, 0.0, 0.0, 1.0}};
    return validate(p);
}

double max_error_vs(const GraphGridFunction& y, int edge,
                    const std::function<double(double)>& exact) {
    double worst = 0.0;
    for (double t : y.mesh().nodes(edge)) worst = std::max(worst, std::abs(y(edge, t) - exact(t)));
    return worst;
}

}  // namespace

TEST_CASE("pantograph series") {
    SUBCASE("degenerate cases") {
        CHECK(pantograph_series(3.5, 0.0, 2.0, 0.8, 10).value == doctest::Approx(3.5));
        CHECK(pantograph_series(3.5, 1.2, 2.0, 0.0, 10).value == doctest::Approx(3.5));
    }
    SUBCASE("frozen partial sums") {
        const SeriesResult r = pantograph_series(1.0, 1.0, 2.0, 1.0, 12);
        CHECK(r.value == doctest::Approx(0.22980961260350699).epsilon(1e-14));
        CHECK(r.truncation_bound < 1e-12);
        CHECK(pantograph_series(1.0, 0.5, 3.0, 1.0, 30).value ==
              doctest::Approx(0.5408986295648128).epsilon(1e-14));
    }
    SUBCASE("truncation bound controls the tail") {
        const SeriesResult coarse = pantograph_series(1.0, 1.0, 2.0, 1.0, 6);
        const SeriesResult fine = pantograph_series(1.0, 1.0, 2.0, 1.0, 40);
        CHECK(std::abs(coarse.value - fine.value) <= 2.0 * coarse.truncation_bound);
    }
    SUBCASE("term-by-term derivative satisfies the equation") {
        // y'(t) = -c y(t/q), with y' computed from the series coefficients
        // independently of the summation under test.
        const double c = 0.7, q = 2.5;
        for (double t : {0.2, 0.5, 0.9}) {
            double term = 1.0, dsum = 0.0;
            for (int n = 0; n < 30; ++n) {
                if (n >= 1) dsum += term * n / t;
                term *= -c * t / (std::pow(q, n) * (n + 1));
            }
            const double rhs = -c * pantograph_series(1.0, c, q, t / q, 30).value;
            CHECK(dsum == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("apply_ell") {
    StarProblem p;
    p.q = 2.0;
    p.y0 = 1.0;
    p.edges = {{1.0, 0.4, 1.0, 1.0}, {3.0, -0.2, 0.6, 1.0}};
    const ValidatedProblem vp = validate(p);
    auto mesh = std::make_shared<const GraphMesh>(build_mesh(vp, 0.125));

    SUBCASE("constant trajectory") {
        GraphGridFunction y(mesh);
        for (int j = 1; j <= 2; ++j) {
            for (auto& v : y.values(j)) v = 2.5;
        }
        CHECK(apply_ell(vp, y, 1, 0.3) == doctest::Approx((0.4 + 1.0) * 2.5));
        CHECK(apply_ell(vp, y, 2, 1.7) == doctest::Approx((-0.2 + 0.6) * 2.5));
    }
    SUBCASE("lifting on the flat part of edge 1") {
        const GraphGridFunction phi = lift_phi(vp, mesh);
        for (double t : {0.55, 0.7, 0.95}) {
            // slope and value vanish; only c1 * Phi1(t/q) = c1 y0 (1 - t/T1) is left
            CHECK(apply_ell(vp, phi, 1, t) == doctest::Approx(1.0 * (1.0 - t)).epsilon(1e-13));
        }
    }
    SUBCASE("outgoing edge reads history through the vertex") {
        GraphGridFunction y(mesh);
        for (size_t i = 0; i < mesh->nodes(1).size(); ++i)
            y.values(1)[i] = 0.5 + mesh->nodes(1)[i];
        for (size_t i = 0; i < mesh->nodes(2).size(); ++i)
            y.values(2)[i] = 1.5 - 0.25 * mesh->nodes(2)[i];
        const double t = 0.4;  // below handover (q-1)T1 = 1
        const double delayed = y(1, (t + 1.0) / 2.0);
        const double expect = -0.25 + (-0.2) * y(2, t) + 0.6 * delayed;
        CHECK(apply_ell(vp, y, 2, t) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("forward solver: classical ODE limit") {
    // c = 0: y1 = e^{-b1 t}, y2 = y1(T1) e^{-b2 t}.
    StarProblem p;
    p.q = 2.0;
    p.y0 = 1.0;
    p.edges = {{1.0, 0.8, 0.0, 1.0}, {3.0, -0.5, 0.0, 1.0}};
    const ValidatedProblem vp = validate(p);
    const ControlProfile u = ControlProfile::zero(vp);

    const auto run = [&](double h) {
        const GraphGridFunction y = solve_cauchy(vp, u, h);
        const double e1 = max_error_vs(y, 1, [](double t) { return std::exp(-0.8 * t); });
        const double v = std::exp(-0.8);
        const double e2 = max_error_vs(y, 2, [&](double t) { return v * std::exp(0.5 * t); });
        return std::max(e1, e2);
    };
    const double err_h = run(0.02);
    const double err_h2 = run(0.01);
    CHECK(err_h < 5e-4);
    CHECK(err_h / err_h2 > 3.2);
    CHECK(err_h / err_h2 < 4.8);
}

TEST_CASE("forward solver: pantograph oracle convergence") {
    for (const auto& [c, q] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {0.5, 3.0}}) {
        const ValidatedProblem vp = pantograph_problem(q, c);
        const ControlProfile u = ControlProfile::zero(vp);
        const double exact = pantograph_series(1.0, c, q, 1.0, 40).value;
        const double eh = std::abs(solve_cauchy(vp, u, 0.02)(1, 1.0) - exact);
        const double eh2 = std::abs(solve_cauchy(vp, u, 0.01)(1, 1.0) - exact);
        CAPTURE(c);
        CAPTURE(q);
        CHECK(eh / eh2 > 3.2);
        CHECK(eh / eh2 < 4.8);
        CHECK(eh2 < 1e-4);
    }
}

TEST_CASE("forward solver: manufactured piecewise-linear solution") {
    StarProblem p;
    p.q = 2.0;
    p.y0 = 0.7;
    p.edges = {{1.0, 0.5, 1.0, 1.0}, {3.0, -0.3, 0.5, 0.6}, {3.0, 0.2, -0.4, 0.4}};
    const ValidatedProblem vp = validate(p);

    // Manufactured admissible trajectory on a coarse mesh, controls u = ell y*.
    auto coarse = std::make_shared<const GraphMesh>(build_mesh(vp, 0.3));
    const SpaceW space(vp, coarse);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd coeffs(space.size());
    for (int i = 0; i < space.size(); ++i) coeffs[i] = d(rng);
    const GraphGridFunction star = space.function_from(coeffs, lift_phi(vp, coarse));
    const ControlProfile u = extract_control(vp, star);

    const auto err = [&](double h) {
        const GraphGridFunction sim = solve_cauchy(vp, u, h);
        double worst = 0.0;
        for (int j = 1; j <= vp.edge_count(); ++j) {
            for (double t : sim.mesh().nodes(j)) {
                worst = std::max(worst, std::abs(sim(j, t) - star(j, t)));
            }
        }
        return worst;
    };
    const double e1 = err(0.05), e2 = err(0.025);
    CHECK(e1 < 2e-3);
    CHECK((e1 / e2 > 2.5 || e2 < 1e-12));
}

TEST_CASE("forward solver: causality") {
    StarProblem p;
    p.q = 2.0;
    p.y0 = 1.0;
    p.edges = {{1.0, 0.3, 0.8, 1.0}, {3.0, 0.1, 0.4, 1.0}};
    const ValidatedProblem vp = validate(p);

    const std::vector<double> knots{0.0, 0.75, 1.5, 2.25, 3.0};
    ControlProfile ua;
    ua.edges.push_back(EdgeControl::from_samples({0.0, 0.5, 1.0}, {0.2, -0.4, 0.1}));
    ua.edges.push_back(EdgeControl::from_samples(knots, {0.3, -0.2, 0.5, 0.0, -0.1}));
    ControlProfile ub = ua;
    ub.edges[1] = EdgeControl::from_samples(knots, {0.3, -0.2, 0.5, 9.0, -7.0});  // after t = 1.5

    const GraphGridFunction ya = solve_cauchy(vp, ua, 0.05);
    const GraphGridFunction yb = solve_cauchy(vp, ub, 0.05);
    for (double t : ya.mesh().nodes(1)) CHECK(ya(1, t) == yb(1, t));
    for (double t : ya.mesh().nodes(2)) {
        if (t <= 1.5) CHECK(ya(2, t) == yb(2, t));
    }
    // And the tail genuinely differs (negative control of the test).
    CHECK(std::abs(ya(2, 3.0) - yb(2, 3.0)) > 1e-3);
}

TEST_CASE("forward solver: Volterra consistency on edge 1") {
    StarProblem p;
    p.q = 2.0;
    p.y0 = 1.0;
    p.edges = {{1.0, 0.6, 0.9, 1.0}, {3.0, 0.0, 0.0, 1.0}};
    const ValidatedProblem vp = validate(p);
    ControlProfile u = ControlProfile::zero(vp);
    u.edges[0] = EdgeControl::from_samples({0.0, 0.3, 1.0}, {1.0, -0.5, 0.25});

    // Misaligned steps: honest quadrature-order decay.
    const double r1 = volterra_residual(vp, solve_cauchy(vp, u, 0.08), u);
    const double r2 = volterra_residual(vp, solve_cauchy(vp, u, 0.04), u);
    CHECK(r1 < 1e-2);
    CHECK(r1 / r2 > 2.5);
    // Aligned step: the 0.3 knot divides evenly, the whole grid is uniform
    // and every compressed node lands on a cell midpoint, so the marching
    // telescopes into the Volterra identity exactly.
    CHECK(volterra_residual(vp, solve_cauchy(vp, u, 0.02), u) < 1e-12);
}

TEST_CASE("forward solver: affine in (y0, u)") {
    StarProblem p;
    p.q = 2.0;
    p.y0 = 0.4;
    p.edges = {{1.0, 0.5, 1.0, 1.0}, {3.0, -0.3, 0.5, 1.0}};
    const ValidatedProblem vp = validate(p);

    ControlProfile ua = ControlProfile::zero(vp);
    ua.edges[0] = EdgeControl::from_samples({0.0, 1.0}, {1.0, -1.0});
    ControlProfile ub = ControlProfile::zero(vp);
    ub.edges[1] = EdgeControl::from_samples({0.0, 1.2, 3.0}, {0.0, 2.0, -1.0});
    ControlProfile usum = ControlProfile::zero(vp);
    usum.edges[0] = ua.edges[0];
    usum.edges[1] = ub.edges[1];

    const GraphGridFunction ya = solve_cauchy(vp, ua, 0.05);
    const GraphGridFunction yb = solve_cauchy(vp.with_y0(0.3), ub, 0.05);
    const GraphGridFunction ysum = solve_cauchy(vp.with_y0(0.7), usum, 0.05);
    for (int j = 1; j <= 2; ++j) {
        for (double t : ysum.mesh().nodes(j)) {
            CHECK(ysum(j, t) == doctest::Approx(ya(j, t) + yb(j, t)).epsilon(1e-11));
        }
    }
}

TEST_CASE("forward solver: error paths") {
    const ValidatedProblem vp = pantograph_problem(2.0, 1.0);
    SUBCASE("step too large") {
        try {
            solve_cauchy(vp, ControlProfile::zero(vp), 1.5);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::StepTooLarge);
        }
    }
    SUBCASE("control missing an edge") {
        ControlProfile u;
        u.edges.push_back(EdgeControl::from_samples({0.0, 1.0}, {0.0, 0.0}));
        try {
            solve_cauchy(vp, u, 0.1);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::UndefinedControl);
        }
    }
    SUBCASE("control not covering the horizon") {
        ControlProfile u = ControlProfile::zero(vp);
        u.edges[0] = EdgeControl::from_samples({0.0, 0.5}, {0.0, 0.0});
        try {
            solve_cauchy(vp, u, 0.1);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::UndefinedControl);
        }
    }
}
