#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holecov/controller.hpp"
#include "holecov/coverage.hpp"
#include "holecov/geometry.hpp"

namespace holecov {

enum class Mode { Ncbf, HfOnly, NominalOnly };
enum class NominalSource { Coverage, Constant };

std::string to_string(Mode mode);
std::string to_string(NominalSource source);
Mode parse_mode(const std::string& text);
NominalSource parse_nominal_source(const std::string& text);

class ValidationError : public Error {
public:
    using Error::Error;
};

struct Scenario {
    std::vector<AgentState> agents;
    /// Per-agent nominal input used when nominal == Constant. Missing rows are zero.
    std::vector<Vec4> constant_nominal;
    SensingParams sensing;
    DensityField density;
    ControllerParams controller;
    Mode mode = Mode::Ncbf;
    NominalSource nominal = NominalSource::Coverage;
    double dt = 1e-2;
    int steps = 1000;
    /// Quadrature and hole-oracle grid spacing; 0 selects diagonal / 200.
    double grid_resolution = 0.0;
    /// Grid oracle runs every this many steps.
    int hole_every = 10;
    double min_z = 0.05;
    double min_lambda = 1e-4;
    std::uint64_t seed = 0;
    /// Uniform perturbation half-width applied to initial x, y.
    double jitter = 0.0;
    /// Treat any clamp activation as a failed run.
    bool strict_clamps = false;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
    double resolution() const;
    Vec4 constant_input(std::size_t agent) const;
};

struct AgentTrace {
    AgentState state;
    double R = 0.0;
    /// +inf when the agent belongs to no trio.
    double min_ncbf = 0.0;
    int argmax = 0;
    std::size_t trios = 0;
    std::size_t constraints = 0;
    bool fallback = false;
    bool clamped = false;
};

/// State at the start of a step together with what was computed from it.
struct TraceRecord {
    int step = 0;
    double time = 0.0;
    std::vector<AgentTrace> agents;
    double H = 0.0;
    double H_M = 0.0;
    double H_O = 0.0;
    /// Trios whose radical center is an uncovered point of their triangle.
    int exact_holes = 0;
    /// Grid-oracle witness count, -1 on steps where the oracle did not run.
    int witnesses = -1;
    bool switched = false;
};

struct World {
    std::vector<AgentState> states;
    int step = 0;
    std::optional<std::vector<std::array<std::size_t, 3>>> previous_trios;
};

/// Initial world, with seeded jitter applied.
World initial_world(const Scenario& scenario);

/// Reusable per-scenario data (sampled density).
class Simulator {
public:
    explicit Simulator(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    TraceRecord step(World& world) const;
    CoverageReport coverage(std::span<const AgentState> states) const;

private:
    Scenario scenario_;
    SampledDensity density_;
};

struct RunSummary {
    int steps = 0;
    double final_H = 0.0;
    /// Minimum NCBF over all agents and steps; +inf when no trio ever formed.
    double min_ncbf = 0.0;
    int sampled_steps = 0;
    int witness_steps = 0;
    int exact_hole_steps = 0;
    int switches = 0;
    int fallbacks = 0;
    int clamp_events = 0;
    /// Largest NCBF drop below zero at a non-switch step following a safe step.
    double max_violation = 0.0;
    /// Sampled witness steps that start within one sampling interval of a switch.
    int switch_induced_holes = 0;
    /// Longest run of consecutive steps with witnesses, measured from its first sample.
    int max_hole_duration = 0;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
    World final_world;
};

RunResult run(const Scenario& scenario);

}  // namespace holecov
