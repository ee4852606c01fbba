#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "holecov/controller.hpp"
#include "support/oracles.hpp"

using namespace holecov;
using namespace holecov::testing;

namespace {

double cost(const QpProblem& qp, const Vec4& u)
{
    const Vec4 d = u - qp.u_nom;
    return d.dot(qp.weights.cwiseProduct(d));
}

AgentState at(double x, double y, double R)
{
    return {x, y, R, 1.0};
}

Constraint halfspace(const Vec4& a, double b)
{
    Constraint c;
    c.a = a;
    c.b = b;
    return c;
}

}  // namespace

TEST_CASE("class-K function")
{
    const ClassK a{2.0, 3};
    CHECK(a(0.5) == doctest::Approx(0.25));
    CHECK(a(-0.5) == doctest::Approx(-0.25));
    CHECK(a(0.0) == 0.0);
    CHECK_THROWS_AS((ClassK{1.0, 2}.validate()), Error);
    CHECK_THROWS_AS((ClassK{0.0, 3}.validate()), Error);
    CHECK_NOTHROW((ClassK{1.0, 1}.validate()));
}

TEST_CASE("QP examples")
{
    SUBCASE("no constraints returns the nominal input")
    {
        QpProblem qp;
        qp.u_nom = Vec4(1, -2, 3, -4);
        const QpSolution s = solve_qp(qp);
        CHECK(s.u == qp.u_nom);
        CHECK(s.active.empty());
    }
    SUBCASE("single violated constraint is a weighted projection")
    {
        Rng rng(41);
        for (int k = 0; k < 200; ++k) {
            QpProblem qp;
            for (int d = 0; d < 4; ++d)
                qp.u_nom[d] = uniform(rng, -2, 2);
            qp.weights = Vec4(1, 1, 1, k % 2 ? 3e6 : 1.0);
            Vec4 a;
            for (int d = 0; d < 4; ++d)
                a[d] = uniform(rng, -1, 1);
            const double b = a.dot(qp.u_nom) + uniform(rng, 0.01, 1.0);
            qp.constraints.push_back(halfspace(a, b));
            const Vec4 expected = single_constraint_projection(qp.u_nom, qp.weights, a, b);
            const Vec4 u = solve_qp(qp).u;
            CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + expected.norm()));
        }
    }
    SUBCASE("feasible nominal input is returned unchanged")
    {
        QpProblem qp;
        qp.u_nom = Vec4(0.3, 0.1, -0.2, 0.05);
        qp.constraints.push_back(halfspace(Vec4(1, 0, 0, 0), 0.0));
        qp.constraints.push_back(halfspace(Vec4(0, 1, 1, 0), -1.0));
        const QpSolution s = solve_qp(qp);
        CHECK(s.u == qp.u_nom);
        CHECK(s.active.empty());
    }
    SUBCASE("contradictory halfspaces are infeasible")
    {
        QpProblem qp;
        qp.constraints.push_back(halfspace(Vec4(1, 0, 0, 0), 1.0));
        qp.constraints.push_back(halfspace(Vec4(-1, 0, 0, 0), 1.0));
        CHECK_THROWS_AS(solve_qp(qp), Infeasible);
    }
    SUBCASE("zero row with positive right-hand side is infeasible")
    {
        QpProblem qp;
        qp.constraints.push_back(halfspace(Vec4::Zero(), 0.5));
        CHECK_THROWS_AS(solve_qp(qp), Infeasible);
        qp.constraints[0].b = -0.5;
        CHECK_NOTHROW(solve_qp(qp));
    }
}

TEST_CASE("QP solutions on random feasible instances satisfy KKT")
{
    Rng rng(42);
    double worst_violation = 0.0;
    double worst_stationarity = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const QpProblem qp = random_feasible_qp(rng, 12);
        const QpSolution s = solve_qp(qp);
        REQUIRE(s.multipliers.size() == qp.constraints.size());

        double scale = 1.0;
        for (const auto& c : qp.constraints)
            scale = std::max(scale, std::abs(c.b));
        const double violation = max_violation(qp, s.u) / scale;
        worst_violation = std::max(worst_violation, violation);
        CHECK(violation <= 1e-8);

        Vec4 residual = qp.weights.cwiseProduct(s.u - qp.u_nom);
        double mag = std::max(residual.cwiseAbs().maxCoeff(), 1e-9 * qp.weights.maxCoeff() * (1.0 + qp.u_nom.norm()));
        for (std::size_t j = 0; j < qp.constraints.size(); ++j) {
            const double mu = s.multipliers[j];
            CHECK(mu >= 0.0);
            const Vec4 term = mu * qp.constraints[j].a;
            residual -= term;
            mag = std::max(mag, term.cwiseAbs().maxCoeff());
            const double slack = qp.constraints[j].a.dot(s.u) - qp.constraints[j].b;
            CHECK(mu * slack <= 1e-8 * (1.0 + mag) * (1.0 + std::abs(slack)));
        }
        const double stationarity = residual.cwiseAbs().maxCoeff() / std::max(mag, 1e-12);
        worst_stationarity = std::max(worst_stationarity, stationarity);
        CHECK(stationarity < 1e-6);
    }
    MESSAGE("worst scaled violation ", worst_violation, ", worst stationarity ", worst_stationarity);
}

TEST_CASE("QP solution beats random feasible points")
{
    Rng rng(43);
    for (int k = 0; k < 300; ++k) {
        const QpProblem qp = random_feasible_qp(rng, 8);
        const Vec4 u = solve_qp(qp).u;
        const double best = cost(qp, u);
        int tried = 0;
        for (int t = 0; t < 200; ++t) {
            Vec4 v = u;
            const double step = std::pow(10.0, uniform(rng, -4, 0));
            for (int d = 0; d < 4; ++d)
                v[d] += step * uniform(rng, -1, 1);
            if (max_violation(qp, v) > 0.0)
                continue;
            ++tried;
            CHECK(cost(qp, v) >= best * (1.0 - 1e-9) - 1e-12);
        }
        (void)tried;
    }
}

TEST_CASE("constraint construction")
{
    const ControllerParams params;

    SUBCASE("agent outside every trio has no constraints")
    {
        const std::vector<AgentState> s{at(0, 0, 2), at(2, 0, 2), at(1, 2, 2), at(40, 40, 2)};
        const CommGraph g = build_graph(s, 1.0);
        const ConstraintReport r = build_constraints(3, g, params);
        CHECK(r.constraints.empty());
        CHECK(r.min_ncbf == std::numeric_limits<double>::infinity());
        const AgentControl c = agent_control(3, g, Vec4(1, 2, 3, 4), params);
        CHECK(c.u == Vec4(1, 2, 3, 4));
        CHECK_FALSE(c.fallback);
    }
    SUBCASE("well-covered trio yields only the FOV constraint")
    {
        const std::vector<AgentState> s{at(0, 0, 2), at(2, 0, 2), at(1, 2, 2)};
        const CommGraph g = build_graph(s, 1.0);
        REQUIRE(g.trios.size() == 1);
        for (std::size_t i = 0; i < 3; ++i) {
            const ConstraintReport r = build_constraints(i, g, params);
            REQUIRE(r.constraints.size() == 1);
            CHECK(r.constraints[0].component == kComponentFov);
            CHECK(r.argmax == kComponentFov);
            CHECK(r.min_ncbf == doctest::Approx(4.0 - 1.5625));
            CHECK(r.constraints[0].b == doctest::Approx(-params.alpha(r.min_ncbf) / 3.0));
            CHECK(r.constraints[0].a == cbf_gradient(g.trios[0], i, kComponentFov).d);
        }
    }
    SUBCASE("constraints follow the almost-active set on random trios")
    {
        Rng rng(44);
        for (int k = 0; k < 200; ++k) {
            const TrioSample t = random_trio(rng);
            const std::vector<AgentState> s(t.states.begin(), t.states.end());
            const CommGraph g = build_graph(s, t.trio.r);
            if (g.trios.size() != 1)
                continue;
            for (std::size_t i = 0; i < 3; ++i) {
                const CbfComponents comps = cbf_components(g.trios[0], i);
                const NcbfValue h = ncbf_value(comps, params.epsilon);
                const ConstraintReport r = build_constraints(i, g, params);
                CHECK(r.min_ncbf == h.value);
                CHECK(r.constraints.size() + r.suppressed + r.vanished == h.active_set.size());
                for (const auto& c : r.constraints) {
                    CHECK(std::find(h.active_set.begin(), h.active_set.end(), c.component) != h.active_set.end());
                    CHECK(c.b == -params.alpha(h.value) / 3.0);
                    CHECK(c.trio == 0);
                }
            }
        }
    }
    SUBCASE("FOV-only mask keeps a single component")
    {
        ControllerParams fov_only;
        fov_only.mask = kFovComponentOnly;
        Rng rng(45);
        for (int k = 0; k < 50; ++k) {
            const TrioSample t = random_trio(rng);
            const std::vector<AgentState> s(t.states.begin(), t.states.end());
            const CommGraph g = build_graph(s, t.trio.r);
            for (std::size_t i = 0; i < 3; ++i)
                for (const auto& c : build_constraints(i, g, fov_only).constraints)
                    CHECK(c.component == kComponentFov);
        }
    }
}

TEST_CASE("filtered input satisfies every constraint on hole-free trios")
{
    const ControllerParams params;
    Rng rng(46);
    int filtered = 0;
    for (int k = 0; k < 300; ++k) {
        const TrioSample t = random_trio(rng);
        if (hole_exists_exact(t.trio))
            continue;
        const std::vector<AgentState> s(t.states.begin(), t.states.end());
        const CommGraph g = build_graph(s, t.trio.r);
        for (std::size_t i = 0; i < 3; ++i) {
            Vec4 u_nom;
            for (int d = 0; d < 4; ++d)
                u_nom[d] = uniform(rng, -3, 3);
            const AgentControl c = agent_control(i, g, u_nom, params);
            CHECK_FALSE(c.fallback);
            if (c.u != u_nom)
                ++filtered;
            for (const auto& con : c.report.constraints)
                CHECK(con.a.dot(c.u) - con.b >= -1e-8 * (1.0 + std::abs(con.b)));
        }
    }
    CHECK(filtered > 0);
}

TEST_CASE("three almost-active ratio components inside a hole fall back to zero input")
{
    // The ratio components sum to -1, so their gradients cancel and three
    // positive bounds cannot hold at once.
    const std::vector<AgentState> s{{5.39403, 1.32427, 9.00304, 1.96144},
                                    {3.90117, -6.97329, 5.52573, 1.29082},
                                    {-3.72501, -1.22798, 8.13765, 1.41079}};
    const ControllerParams params;
    const CommGraph g = build_graph(s, 1.0);
    REQUIRE(g.trios.size() == 1);
    REQUIRE(hole_exists_exact(g.trios[0]));
    const AgentControl c = agent_control(0, g, Vec4(1, 1, 1, 1), params);
    REQUIRE(c.report.constraints.size() == 3);
    Vec4 sum = Vec4::Zero();
    for (const auto& con : c.report.constraints)
        sum += con.a;
    CHECK(sum.norm() < 1e-12);
    CHECK(c.fallback);
    CHECK(c.u == Vec4::Zero());
    CHECK_FALSE(c.fallback_reason.empty());
}

TEST_CASE("controller parameter validation")
{
    ControllerParams p;
    CHECK(p.epsilon == doctest::Approx(0.2));
    CHECK(p.guard_threshold == doctest::Approx(1e4));
    CHECK_NOTHROW(p.validate());
    p.epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = ControllerParams{};
    p.w_lambda = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}
