#pragma once

#include <span>
#include <string>
#include <vector>

#include "holecov/barrier.hpp"
#include "holecov/geometry.hpp"

namespace holecov {

class Infeasible : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// alpha(h) = gain * h^power with an odd positive power.
struct ClassK {
    double gain = 1.0;
    int power = 3;

    double operator()(double h) const;
    void validate() const;
};

/// a . u >= b
struct Constraint {
    Vec4 a = Vec4::Zero();
    double b = 0.0;
    /// Index into CommGraph::trios, or -1 when not tied to a trio.
    int trio = -1;
    int component = 0;
};

struct QpProblem {
    Vec4 u_nom = Vec4::Zero();
    /// Diagonal of W.
    Vec4 weights = Vec4(1.0, 1.0, 1.0, 1.0);
    std::vector<Constraint> constraints;
};

struct QpSolution {
    Vec4 u = Vec4::Zero();
    /// One multiplier per constraint, zero when inactive.
    std::vector<double> multipliers;
    std::vector<std::size_t> active;
    int iterations = 0;
};

/// Minimizes (u - u_nom)^T W (u - u_nom) subject to the constraints with the
/// Goldfarb-Idnani dual active-set method. Throws Infeasible or NumericalFailure.
QpSolution solve_qp(const QpProblem& problem);

struct ControllerParams {
    double epsilon = kDefaultEpsilon;
    double guard_threshold = kDefaultGuardThreshold;
    double w_lambda = 3.0e6;
    ClassK alpha;
    ComponentMask mask = kAllComponents;

    Vec4 weights() const { return Vec4(1.0, 1.0, 1.0, w_lambda); }
    void validate() const;
};

/// Gradients below this norm are dropped from the constraint list.
inline constexpr double kVanishingGradient = 1e-9;

struct ConstraintReport {
    std::vector<Constraint> constraints;
    /// Minimum NCBF value over the agent's trios (+inf when there are none).
    double min_ncbf = 0.0;
    /// Component attaining the max in the trio with the smallest NCBF value.
    int argmax = 0;
    std::size_t suppressed = 0;
    std::size_t vanished = 0;
};

/// Constraints of one agent over the trios listed in graph.agent_trios[agent].
ConstraintReport build_constraints(std::size_t agent, const CommGraph& graph, const ControllerParams& params);

struct AgentControl {
    Vec4 u = Vec4::Zero();
    ConstraintReport report;
    bool fallback = false;
    std::string fallback_reason;
};

/// Safety-filtered input of one agent. Falls back to zero input when the QP fails.
AgentControl agent_control(std::size_t agent, const CommGraph& graph, const Vec4& u_nom,
                           const ControllerParams& params);

}  // namespace holecov
