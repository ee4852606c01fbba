#include "holecov/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

namespace holecov {

double ClassK::operator()(double h) const
{
    double out = 1.0;
    for (int k = 0; k < power; ++k)
        out *= h;
    return gain * out;
}

void ClassK::validate() const
{
    if (!(gain > 0.0))
        throw Error("alpha gain must be positive");
    if (power < 1 || power % 2 == 0)
        throw Error("alpha power must be an odd positive integer");
}

void ControllerParams::validate() const
{
    if (!(epsilon > 0.0))
        throw Error("epsilon must be positive");
    if (!(guard_threshold > 0.0))
        throw Error("guard threshold must be positive");
    if (!(w_lambda > 0.0))
        throw Error("w_lambda must be positive");
    alpha.validate();
}

namespace {

using Mat4X = Eigen::Matrix<double, 4, Eigen::Dynamic>;

constexpr double kFeasTol = 1e-12;
constexpr double kZeroStep = 1e-14;

// Projection of np onto the null space of the active normals and the dual
// step direction r with N r = np - z.
void directions(const Mat4X& N, const Vec4& np, Vec4& z, Eigen::VectorXd& r)
{
    if (N.cols() == 0) {
        z = np;
        r.resize(0);
        return;
    }
    const Eigen::MatrixXd gram = N.transpose() * N;
    r = gram.ldlt().solve(N.transpose() * np);
    z = np - N * r;
}

}  // namespace

QpSolution solve_qp(const QpProblem& problem)
{
    if (!(problem.weights.array() > 0.0).all())
        throw Error("QP weights must be positive");
    const std::size_t m = problem.constraints.size();
    const Vec4 sqrt_w = problem.weights.cwiseSqrt();

    // v = W^{1/2} u turns the objective into 0.5 |v - v0|^2; rows are normalized.
    std::vector<Vec4> n(m);
    std::vector<double> beta(m);
    std::vector<double> scale(m);
    std::vector<bool> trivial(m, false);
    for (std::size_t j = 0; j < m; ++j) {
        const Vec4 at = problem.constraints[j].a.cwiseQuotient(sqrt_w);
        scale[j] = at.norm();
        if (!(scale[j] > 0.0) || !std::isfinite(scale[j])) {
            if (problem.constraints[j].b > kFeasTol)
                throw Infeasible("zero constraint row with positive bound");
            trivial[j] = true;
            continue;
        }
        n[j] = at / scale[j];
        beta[j] = problem.constraints[j].b / scale[j];
    }

    Vec4 x = problem.u_nom.cwiseProduct(sqrt_w);
    std::vector<std::size_t> active;
    std::vector<double> lambda;
    QpSolution sol;
    const int max_iter = 50 * static_cast<int>(m + 4);

    auto slack = [&](std::size_t j) { return n[j].dot(x) - beta[j]; };

    for (;;) {
        // Most violated constraint.
        std::size_t p = m;
        double worst = -kFeasTol;
        for (std::size_t j = 0; j < m; ++j) {
            if (trivial[j])
                continue;
            const double s = slack(j);
            if (s < worst) {
                worst = s;
                p = j;
            }
        }
        if (p == m)
            break;

        double lambda_p = 0.0;
        for (;;) {
            if (++sol.iterations > max_iter)
                throw NumericalFailure("QP iteration limit exceeded");
            Mat4X N(4, static_cast<Eigen::Index>(active.size()));
            for (std::size_t k = 0; k < active.size(); ++k)
                N.col(static_cast<Eigen::Index>(k)) = n[active[k]];
            Vec4 z;
            Eigen::VectorXd r;
            directions(N, n[p], z, r);

            // Largest dual step keeping active multipliers non-negative.
            double t1 = std::numeric_limits<double>::infinity();
            std::size_t drop = active.size();
            for (std::size_t k = 0; k < active.size(); ++k) {
                const double rk = r[static_cast<Eigen::Index>(k)];
                if (rk > kZeroStep) {
                    const double t = lambda[k] / rk;
                    if (t < t1) {
                        t1 = t;
                        drop = k;
                    }
                }
            }
            const double zz = z.squaredNorm();
            const double t2 = zz > kZeroStep ? -slack(p) / zz : std::numeric_limits<double>::infinity();
            const double t = std::min(t1, t2);
            if (!std::isfinite(t))
                throw Infeasible("constraints are inconsistent");

            if (std::isfinite(t2))
                x += t * z;
            for (std::size_t k = 0; k < active.size(); ++k)
                lambda[k] -= t * r[static_cast<Eigen::Index>(k)];
            lambda_p += t;

            if (t2 <= t1) {
                active.push_back(p);
                lambda.push_back(lambda_p);
                break;
            }
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
            lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(drop));
        }
    }

    sol.u = active.empty() ? problem.u_nom : Vec4(x.cwiseQuotient(sqrt_w));
    sol.multipliers.assign(m, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k)
        sol.multipliers[active[k]] = std::max(0.0, lambda[k]) / scale[active[k]];
    sol.active = active;
    std::sort(sol.active.begin(), sol.active.end());
    return sol;
}

ConstraintReport build_constraints(std::size_t agent, const CommGraph& graph, const ControllerParams& params)
{
    ConstraintReport out;
    out.min_ncbf = std::numeric_limits<double>::infinity();
    if (agent >= graph.agent_trios.size())
        return out;
    for (const std::size_t t : graph.agent_trios[agent]) {
        const TrioContext& trio = graph.trios[t];
        CbfComponents comps;
        try {
            comps = cbf_components(trio, agent);
        } catch (const DegenerateTrio& e) {
            spdlog::warn("agent {}: dropping degenerate trio ({}, {}, {}): {}", agent, trio.ids[0], trio.ids[1],
                         trio.ids[2], e.what());
            continue;
        }
        const NcbfValue h = ncbf_value(comps, params.epsilon, params.mask);
        if (h.value < out.min_ncbf) {
            out.min_ncbf = h.value;
            out.argmax = h.argmax;
        }
        const std::vector<int> guarded = degenerate_guard(comps, params.guard_threshold);
        const double b = -params.alpha(h.value) / 3.0;
        for (const int l : h.active_set) {
            if (std::find(guarded.begin(), guarded.end(), l) != guarded.end()) {
                ++out.suppressed;
                continue;
            }
            CbfGradient g;
            try {
                g = cbf_gradient(trio, agent, l);
            } catch (const DegenerateTrio& e) {
                spdlog::warn("agent {}: no gradient for component {}: {}", agent, l, e.what());
                continue;
            }
            if (!(g.norm() >= kVanishingGradient)) {
                spdlog::debug("agent {}: vanishing gradient of component {} (norm {:.3e})", agent, l, g.norm());
                ++out.vanished;
                continue;
            }
            out.constraints.push_back({g.d, b, static_cast<int>(t), l});
        }
    }
    return out;
}

AgentControl agent_control(std::size_t agent, const CommGraph& graph, const Vec4& u_nom,
                           const ControllerParams& params)
{
    AgentControl out;
    out.report = build_constraints(agent, graph, params);
    if (out.report.constraints.empty()) {
        out.u = u_nom;
        return out;
    }
    QpProblem qp;
    qp.u_nom = u_nom;
    qp.weights = params.weights();
    qp.constraints = out.report.constraints;
    try {
        out.u = solve_qp(qp).u;
    } catch (const Error& e) {
        spdlog::warn("agent {}: QP failed, holding position: {}", agent, e.what());
        out.u = Vec4::Zero();
        out.fallback = true;
        out.fallback_reason = e.what();
    }
    return out;
}

}  // namespace holecov
