#include <doctest.h>

#include <cmath>
#include <random>

#include "pantostar/grid_function.hpp"

using namespace pantostar;

namespace {

StarProblem three_edges() {
    StarProblem p;
    p.q = 2.0;
    p.y0 = 1.0;
    p.edges = {{1.0, 0.5, 1.0, 1.0}, {3.0, -0.3, 0.5, 0.6}, {3.0, 0.2, -0.4, 0.4}};
    return p;
}

}  // namespace

TEST_CASE("validate caches rest onsets") {
    StarProblem p;
    p.q = 2.0;
    p.y0 = 1.0;
    p.edges = {{1.0, 0.1, 0.2, 1.0}, {3.0, 0.0, 0.0, 0.6}, {3.0, 0.0, 0.0, 0.4}};
    const ValidatedProblem vp = validate(p);
    CHECK(vp.rest_onset(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(vp.rest_onset(2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(vp.rest_onset(3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(vp.handover() == doctest::Approx(1.0));
    CHECK(vp.t1_over_q() == doctest::Approx(0.5));
}

TEST_CASE("validate rejects bad data with named errors") {
    StarProblem p = three_edges();

    SUBCASE("horizon too short") {
        p.edges[1].T = 0.9;  // (q-1) T1 = 1
        try {
            validate(p);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::HorizonTooShort);
        }
    }
    SUBCASE("horizon at the boundary is rejected too") {
        p.edges[1].T = 1.0;
        CHECK_THROWS_AS(validate(p), Error);
    }
    SUBCASE("q must exceed 1") {
        p.q = 1.0;
        try {
            validate(p);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::CompressionNotGreaterThanOne);
        }
    }
    SUBCASE("weights positive") {
        p.edges[2].alpha = 0.0;
        try {
            validate(p);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NonPositiveWeight);
        }
    }
    SUBCASE("at least one outgoing edge") {
        p.edges.resize(1);
        try {
            validate(p);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::TooFewEdges);
        }
    }
}

TEST_CASE("beta/gamma") {
    SUBCASE("homogeneous coefficients vanish") {
        StarProblem p = three_edges();
        for (auto& e : p.edges) e.b = e.c = 0.0;
        const auto [beta, gamma] = beta_gamma(validate(p));
        CHECK(beta == 0.0);
        CHECK(gamma == 0.0);
    }
    SUBCASE("matched two-edge case vanishes") {
        StarProblem p;
        p.q = 2.0;
        p.edges = {{1.0, 0.4, -0.2, 1.0}, {3.0, 0.4, -0.2, 1.0}};
        const auto [beta, gamma] = beta_gamma(validate(p));
        CHECK(beta == doctest::Approx(0.0));
        CHECK(gamma == doctest::Approx(0.0));
    }
    SUBCASE("weighted combination") {
        // beta = 0.5 - (0.6*(-0.3) + 0.4*0.2), gamma = 1 - (0.6*0.5 + 0.4*(-0.4))
        const ValidatedProblem vp = validate(three_edges());
        CHECK(vp.beta() == doctest::Approx(0.6).epsilon(1e-14));
        CHECK(vp.gamma() == doctest::Approx(0.86).epsilon(1e-14));
    }
    SUBCASE("linear in (b, c) at fixed weights") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> d(-2.0, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            StarProblem a = three_edges(), b = three_edges(), sum = three_edges();
            const double s = d(rng), t = d(rng);
            for (size_t i = 0; i < a.edges.size(); ++i) {
                a.edges[i].b = d(rng);
                a.edges[i].c = d(rng);
                b.edges[i].b = d(rng);
                b.edges[i].c = d(rng);
                sum.edges[i].b = s * a.edges[i].b + t * b.edges[i].b;
                sum.edges[i].c = s * a.edges[i].c + t * b.edges[i].c;
            }
            const auto [ba, ga] = beta_gamma(validate(a));
            const auto [bb, gb] = beta_gamma(validate(b));
            const auto [bs, gs] = beta_gamma(validate(sum));
            CHECK(bs == doctest::Approx(s * ba + t * bb).epsilon(1e-12));
            CHECK(gs == doctest::Approx(s * ga + t * gb).epsilon(1e-12));
        }
    }
}

TEST_CASE("delay argument routing") {
    const ValidatedProblem vp = validate(three_edges());

    SUBCASE("pinned points") {
        const DelayTarget origin = vp.delay_argument(1, 0.0);
        CHECK(origin.edge == 1);
        CHECK(origin.time == 0.0);

        const DelayTarget hist = vp.delay_argument(2, 0.0);  // tau = -0.5 < 0
        CHECK(hist.edge == 1);
        CHECK(hist.time == doctest::Approx(0.5));

        const DelayTarget handover = vp.delay_argument(2, 1.0);  // tau = 0
        CHECK(handover.edge == 2);
        CHECK(handover.time == doctest::Approx(0.0));
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(vp.delay_argument(2, 3.5), Error);
        CHECK_THROWS_AS(vp.delay_argument(1, -0.2), Error);
    }
    SUBCASE("monotone and strictly in the past") {
        // Global time of an edge-j point is T1 + t; the target must be earlier.
        const auto global_time = [&](const DelayTarget& d) {
            return d.edge == 1 ? d.time : vp.horizon(1) + d.time;
        };
        for (int j = 1; j <= vp.edge_count(); ++j) {
            double prev = -1.0;
            for (int i = 0; i <= 200; ++i) {
                const double t = vp.horizon(j) * i / 200.0;
                const DelayTarget d = vp.delay_argument(j, t);
                const double g = global_time(d);
                CHECK(g >= prev - 1e-14);
                prev = g;
                const double query_global = j == 1 ? t : vp.horizon(1) + t;
                if (t > 0.0) CHECK(g < query_global);
            }
        }
    }
}

TEST_CASE("history target lands inside [T1/q, T1]") {
    const ValidatedProblem vp = validate(three_edges());
    for (int i = 0; i <= 100; ++i) {
        const double t = vp.handover() * i / 100.0;
        const DelayTarget d = vp.delay_argument(2, t);
        if (d.edge == 1) {
            CHECK(d.time >= vp.t1_over_q() - 1e-14);
            CHECK(d.time <= vp.horizon(1) + 1e-14);
        }
    }
}

TEST_CASE("lifting") {
    const ValidatedProblem vp = validate(three_edges());
    auto mesh = std::make_shared<const GraphMesh>(build_mesh(vp, 0.1));
    const GraphGridFunction phi = lift_phi(vp, mesh);

    CHECK(phi(1, 0.0) == doctest::Approx(1.0));
    CHECK(phi(1, vp.t1_over_q()) == doctest::Approx(0.0));
    CHECK(phi(1, 1.0) == doctest::Approx(0.0));
    CHECK(phi(2, 1.5) == 0.0);
    // Vertex continuity and rest hold trivially (everything past T1/q is zero).
    CHECK(phi(2, 0.0) == phi(1, 1.0));

    SUBCASE("norm matches the closed formula over random data") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> uq(1.0 + 1e-3, 5.0);
        std::uniform_real_distribution<double> ut(0.2, 3.0);
        std::uniform_real_distribution<double> uy(-2.0, 2.0);
        for (int trial = 0; trial < 12; ++trial) {
            StarProblem p;
            p.q = uq(rng);
            p.y0 = uy(rng);
            const double T1 = ut(rng);
            p.edges = {{T1, 0.0, 0.0, 1.0}, {(p.q - 1.0) * T1 + ut(rng), 0.0, 0.0, 1.0}};
            const ValidatedProblem v = validate(p);
            auto m = std::make_shared<const GraphMesh>(build_mesh(v, T1 / 7.0));
            const GraphGridFunction f = lift_phi(v, m);
            const double expect =
                (T1 * T1 + 3.0 * p.q * p.q) / (3.0 * p.q * T1) * p.y0 * p.y0;
            CHECK(f.w12_norm_sq() == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("missing mandatory node") {
        auto bad = std::make_shared<const GraphMesh>(
            vp.q(), vp.horizon(1),
            std::vector<std::vector<double>>{{0.0, 0.4, 1.0}, {0.0, 1.0, 3.0}, {0.0, 1.0, 3.0}});
        try {
            lift_phi(vp, bad);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::MissingMandatoryNode);
        }
    }
}
