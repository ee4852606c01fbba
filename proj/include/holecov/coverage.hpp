#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "holecov/geometry.hpp"

namespace holecov {

/// Camera and objective parameters of the visual coverage model.
struct SensingParams {
    double r = 1.0;      ///< image-plane radius
    double kappa = 4.0;  ///< resolution exponent
    double sigma = 3.0;  ///< width of the preferred-distance band
    double M = 11.0;     ///< preferred capture distance
    double w = 0.4;      ///< overlap penalty weight

    void validate() const;
};

struct GaussianComponent {
    double weight = 1.0;
    Vec2 mean = Vec2::Zero();
    double scale = 1.0;
};

/// Isotropic Gaussian mixture, zero outside the mission rectangle.
struct DensityField {
    std::vector<GaussianComponent> components;
    Rect mission;

    double operator()(const Vec2& q) const;
    void validate() const;
};

/// Density sampled once at every grid midpoint.
struct SampledDensity {
    Grid grid;
    std::vector<double> phi;

    SampledDensity(const DensityField& density, const Grid& grid);
};

/// Perspective quality times resolution loss; zero outside the FOV.
double sensing_quality(const AgentState& s, const Vec2& q, const SensingParams& params);

/// d f / d(x, y, z, lambda). Zero unless q is strictly inside the FOV.
Vec4 sensing_quality_gradient(const AgentState& s, const Vec2& q, const SensingParams& params);

/// Conic Voronoi assignment of grid cells. Ties go to the lowest index.
struct Partition {
    static constexpr int kNone = -1;

    std::vector<int> owner;
    /// Bit i set when agent i's FOV contains the cell.
    std::vector<std::uint64_t> covering;

    bool covers(std::size_t agent, std::size_t cell) const { return (covering[cell] >> agent) & 1u; }
    /// Cell is in the overlap region of `agent` (covered, not owned).
    bool loses(std::size_t agent, std::size_t cell) const
    {
        return covers(agent, cell) && owner[cell] != static_cast<int>(agent);
    }
};

inline constexpr std::size_t kMaxAgents = 64;

Partition partition(std::span<const AgentState> states, const SensingParams& params, const Grid& grid);

struct CoverageReport {
    double H_M = 0.0;
    double H_O = 0.0;
    double H = 0.0;
    /// Same H_M, accumulated as the integral of the pointwise max of f.
    double H_M_max_form = 0.0;
    /// Integral of the density over each agent's cell.
    std::vector<double> cell_mass;
};

struct CoverageEvaluation {
    CoverageReport report;
    /// Gradient-ascent nominal input of every agent.
    std::vector<Vec4> nominal;
};

/// One pass over the grid producing the objective and all nominal inputs.
CoverageEvaluation evaluate_coverage(std::span<const AgentState> states, const SensingParams& params,
                                     const SampledDensity& density);

CoverageReport coverage_objective(std::span<const AgentState> states, const SensingParams& params,
                                  const DensityField& density, const Grid& grid);

Vec4 nominal_input(std::size_t agent, std::span<const AgentState> states, const SensingParams& params,
                   const DensityField& density, const Grid& grid);

}  // namespace holecov
