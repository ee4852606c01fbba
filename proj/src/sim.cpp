#include "holecov/sim.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <spdlog/spdlog.h>

namespace holecov {

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::Ncbf:
        return "ncbf";
    case Mode::HfOnly:
        return "hf-only";
    case Mode::NominalOnly:
        return "nominal-only";
    }
    return "ncbf";
}

std::string to_string(NominalSource source)
{
    return source == NominalSource::Coverage ? "coverage" : "constant";
}

Mode parse_mode(const std::string& text)
{
    if (text == "ncbf")
        return Mode::Ncbf;
    if (text == "hf-only" || text == "hf_only")
        return Mode::HfOnly;
    if (text == "nominal-only" || text == "nominal_only")
        return Mode::NominalOnly;
    throw ValidationError("unknown mode '" + text + "'");
}

NominalSource parse_nominal_source(const std::string& text)
{
    if (text == "coverage")
        return NominalSource::Coverage;
    if (text == "constant")
        return NominalSource::Constant;
    throw ValidationError("unknown nominal source '" + text + "'");
}

void Scenario::validate() const
{
    auto check = [](bool ok, const char* msg) {
        if (!ok)
            throw ValidationError(msg);
    };
    check(!agents.empty(), "at least one agent is required");
    check(agents.size() <= kMaxAgents, "at most 64 agents are supported");
    for (const auto& a : agents) {
        check(std::isfinite(a.x) && std::isfinite(a.y), "agent position must be finite");
        check(a.z > 0.0, "agent z must be positive");
        check(a.lambda > 0.0, "agent lambda must be positive");
    }
    check(constant_nominal.size() <= agents.size(), "more nominal inputs than agents");
    check(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    check(steps >= 1, "steps must be at least 1");
    check(grid_resolution >= 0.0, "grid resolution must be non-negative");
    check(hole_every >= 1, "hole oracle cadence must be at least 1");
    check(min_z > 0.0, "min_z must be positive");
    check(min_lambda > 0.0, "min_lambda must be positive");
    check(jitter >= 0.0, "jitter must be non-negative");
    try {
        sensing.validate();
        density.validate();
        controller.validate();
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(e.what());
    }
}

double Scenario::resolution() const
{
    return grid_resolution > 0.0 ? grid_resolution : default_hole_resolution(density.mission);
}

Vec4 Scenario::constant_input(std::size_t agent) const
{
    return agent < constant_nominal.size() ? constant_nominal[agent] : Vec4::Zero();
}

World initial_world(const Scenario& scenario)
{
    World world;
    world.states = scenario.agents;
    if (scenario.jitter > 0.0) {
        std::mt19937_64 rng(scenario.seed);
        // Explicit mapping keeps the perturbation identical across standard libraries.
        auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        for (auto& s : world.states) {
            s.x += scenario.jitter * (2.0 * uniform() - 1.0);
            s.y += scenario.jitter * (2.0 * uniform() - 1.0);
        }
    }
    return world;
}

namespace {

Scenario validated(Scenario s)
{
    s.validate();
    return s;
}

}  // namespace

Simulator::Simulator(Scenario scenario)
    : scenario_(validated(std::move(scenario))),
      density_(scenario_.density, Grid::over(scenario_.density.mission, scenario_.resolution()))
{
}

CoverageReport Simulator::coverage(std::span<const AgentState> states) const
{
    return evaluate_coverage(states, scenario_.sensing, density_).report;
}

TraceRecord Simulator::step(World& world) const
{
    const Scenario& sc = scenario_;
    const std::size_t n = world.states.size();
    const double r = sc.sensing.r;

    const CommGraph graph = build_graph(world.states, r);
    std::vector<std::array<std::size_t, 3>> trio_ids;
    trio_ids.reserve(graph.trios.size());
    for (const auto& t : graph.trios)
        trio_ids.push_back(t.ids);

    TraceRecord rec;
    rec.step = world.step;
    rec.time = world.step * sc.dt;
    rec.switched = world.previous_trios && *world.previous_trios != trio_ids;

    const CoverageEvaluation cov = evaluate_coverage(world.states, sc.sensing, density_);
    rec.H = cov.report.H;
    rec.H_M = cov.report.H_M;
    rec.H_O = cov.report.H_O;

    ControllerParams params = sc.controller;
    params.mask = sc.mode == Mode::HfOnly ? kFovComponentOnly : kAllComponents;

    std::vector<Vec4> u(n);
    rec.agents.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec4 u_nom = sc.nominal == NominalSource::Coverage ? cov.nominal[i] : sc.constant_input(i);
        AgentTrace& at = rec.agents[i];
        at.state = world.states[i];
        at.R = fov_radius(world.states[i], r);
        at.trios = graph.agent_trios[i].size();
        if (sc.mode == Mode::NominalOnly) {
            const ConstraintReport report = build_constraints(i, graph, params);
            at.min_ncbf = report.min_ncbf;
            at.argmax = report.argmax;
            u[i] = u_nom;
        } else {
            const AgentControl ctl = agent_control(i, graph, u_nom, params);
            at.min_ncbf = ctl.report.min_ncbf;
            at.argmax = ctl.report.argmax;
            at.constraints = ctl.report.constraints.size();
            at.fallback = ctl.fallback;
            u[i] = ctl.u;
        }
    }

    for (const auto& t : graph.trios)
        if (hole_exists_exact(t))
            ++rec.exact_holes;
    if (world.step % sc.hole_every == 0) {
        std::vector<Fov> fovs;
        fovs.reserve(n);
        for (const auto& s : world.states)
            fovs.push_back(make_fov(s, r));
        std::vector<std::array<Vec2, 3>> triangles;
        triangles.reserve(graph.trios.size());
        for (const auto& t : graph.trios)
            triangles.push_back(t.triangle);
        rec.witnesses = static_cast<int>(
            detect_holes_grid(fovs, triangles, sc.density.mission, sc.resolution()).size());
    }

    for (std::size_t i = 0; i < n; ++i) {
        AgentState& s = world.states[i];
        s = AgentState::from_vector(s.as_vector() + sc.dt * u[i]);
        if (s.z < sc.min_z) {
            s.z = sc.min_z;
            rec.agents[i].clamped = true;
        }
        if (s.lambda < sc.min_lambda) {
            s.lambda = sc.min_lambda;
            rec.agents[i].clamped = true;
        }
        if (rec.agents[i].clamped)
            spdlog::warn("step {}: agent {} state clamped", world.step, i);
    }

    world.previous_trios = std::move(trio_ids);
    ++world.step;
    return rec;
}

namespace {

double record_min_ncbf(const TraceRecord& rec)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : rec.agents)
        m = std::min(m, a.min_ncbf);
    return m;
}

}  // namespace

RunResult run(const Scenario& scenario)
{
    const Simulator sim(scenario);
    RunResult out;
    out.final_world = initial_world(sim.scenario());
    out.trace.reserve(static_cast<std::size_t>(scenario.steps));

    RunSummary& sum = out.summary;
    sum.min_ncbf = std::numeric_limits<double>::infinity();
    double prev_min = std::numeric_limits<double>::infinity();
    int last_switch = std::numeric_limits<int>::min() / 2;
    int hole_start = -1;

    for (int k = 0; k < scenario.steps; ++k) {
        TraceRecord rec = sim.step(out.final_world);
        const double m = record_min_ncbf(rec);
        sum.min_ncbf = std::min(sum.min_ncbf, m);
        if (rec.switched) {
            ++sum.switches;
            last_switch = rec.step;
        } else if (prev_min >= 0.0 && m < 0.0) {
            sum.max_violation = std::max(sum.max_violation, -m);
        }
        prev_min = m;
        if (rec.exact_holes > 0)
            ++sum.exact_hole_steps;
        for (const auto& a : rec.agents) {
            sum.fallbacks += a.fallback ? 1 : 0;
            sum.clamp_events += a.clamped ? 1 : 0;
        }
        if (rec.witnesses >= 0) {
            ++sum.sampled_steps;
            if (rec.witnesses > 0) {
                ++sum.witness_steps;
                if (hole_start < 0) {
                    hole_start = rec.step;
                    if (rec.step - last_switch <= scenario.hole_every)
                        ++sum.switch_induced_holes;
                }
                sum.max_hole_duration = std::max(sum.max_hole_duration, rec.step - hole_start);
            } else if (hole_start >= 0) {
                sum.max_hole_duration = std::max(sum.max_hole_duration, rec.step - hole_start);
                hole_start = -1;
            }
        }
        out.trace.push_back(std::move(rec));
    }
    sum.steps = scenario.steps;
    sum.final_H = sim.coverage(out.final_world.states).H;
    return out;
}

}  // namespace holecov
