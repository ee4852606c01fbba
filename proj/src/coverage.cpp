#include "holecov/coverage.hpp"

#include <cmath>

namespace holecov {

void SensingParams::validate() const
{
    if (!(r > 0.0))
        throw Error("r must be positive");
    if (!(kappa > 0.0))
        throw Error("kappa must be positive");
    if (!(sigma > 0.0))
        throw Error("sigma must be positive");
    if (!(M > 0.0))
        throw Error("M must be positive");
    if (!(w >= 0.0))
        throw Error("w must be non-negative");
}

double DensityField::operator()(const Vec2& q) const
{
    if (!mission.contains(q))
        return 0.0;
    double phi = 0.0;
    for (const auto& c : components)
        phi += c.weight * std::exp(-(q - c.mean).squaredNorm() / (2.0 * c.scale * c.scale));
    return phi;
}

void DensityField::validate() const
{
    if (!(mission.width() > 0.0) || !(mission.height() > 0.0))
        throw Error("mission rectangle must have positive extent");
    for (const auto& c : components) {
        if (!(c.weight >= 0.0))
            throw Error("density weights must be non-negative");
        if (!(c.scale > 0.0))
            throw Error("density scale must be positive");
    }
}

SampledDensity::SampledDensity(const DensityField& density, const Grid& g) : grid(g), phi(g.size())
{
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
        phi[idx] = density(grid.point(idx));
}

namespace {

struct Optics {
    double s;  // sqrt(lambda^2 + r^2)
    double A;  // s / (s - lambda)
    double B;  // lambda / s
};

Optics optics(const AgentState& st, const SensingParams& params)
{
    const double s = std::sqrt(st.lambda * st.lambda + params.r * params.r);
    return {s, s / (s - st.lambda), st.lambda / s};
}

double quality_inside(const AgentState& st, double d, const Optics& o, const SensingParams& params)
{
    const double pers = o.A * (st.z / d - o.B);
    const double gauss = std::exp(-(d - params.M) * (d - params.M) / (2.0 * params.sigma * params.sigma));
    return pers * std::pow(o.B, params.kappa) * gauss;
}

Vec4 gradient_inside(const AgentState& st, const Vec2& q, double d, const Optics& o,
                     const SensingParams& params)
{
    const double r2 = params.r * params.r;
    const Vec4 dd(( st.x - q.x()) / d, (st.y - q.y()) / d, st.z / d, 0.0);

    const double pers = o.A * (st.z / d - o.B);
    const double dA = r2 / (o.s * (o.s - st.lambda) * (o.s - st.lambda));
    const double dB = r2 / (o.s * o.s * o.s);
    Vec4 dpers;
    dpers << -o.A * st.z * dd[0] / (d * d), -o.A * st.z * dd[1] / (d * d),
        o.A * (d * d - st.z * st.z) / (d * d * d), dA * (st.z / d - o.B) - o.A * dB;

    const double sig2 = params.sigma * params.sigma;
    const double gauss = std::exp(-(d - params.M) * (d - params.M) / (2.0 * sig2));
    const double Bk = std::pow(o.B, params.kappa);
    const double res = Bk * gauss;
    Vec4 dres = res * (-(d - params.M) / sig2) * dd;
    dres[3] = params.kappa * std::pow(o.B, params.kappa - 1.0) * dB * gauss;

    return dpers * res + pers * dres;
}

}  // namespace

double sensing_quality(const AgentState& st, const Vec2& q, const SensingParams& params)
{
    const double rho2 = (q - st.ground()).squaredNorm();
    const double R = fov_radius(st, params.r);
    if (rho2 > R * R)
        return 0.0;
    return quality_inside(st, std::sqrt(rho2 + st.z * st.z), optics(st, params), params);
}

Vec4 sensing_quality_gradient(const AgentState& st, const Vec2& q, const SensingParams& params)
{
    const double rho2 = (q - st.ground()).squaredNorm();
    const double R = fov_radius(st, params.r);
    if (!(rho2 < R * R))
        return Vec4::Zero();
    return gradient_inside(st, q, std::sqrt(rho2 + st.z * st.z), optics(st, params), params);
}

namespace {

template <typename Fn>
void for_each_cell_in_fov(const Grid& grid, const AgentState& st, double r, Fn&& fn)
{
    const double R = fov_radius(st, r);
    const auto [x0, y0, x1, y1] = grid.clip(st.x - R, st.y - R, st.x + R, st.y + R);
    for (std::size_t iy = y0; iy < y1; ++iy) {
        for (std::size_t ix = x0; ix < x1; ++ix) {
            const Vec2 q = grid.point(ix, iy);
            const double rho2 = (q - st.ground()).squaredNorm();
            if (rho2 <= R * R)
                fn(grid.index(ix, iy), q, rho2, rho2 < R * R);
        }
    }
}

void check_agent_count(std::size_t n)
{
    if (n > kMaxAgents)
        throw Error("at most 64 agents are supported");
}

// Owner and best quality per cell.
void assign(std::span<const AgentState> states, const SensingParams& params, const Grid& grid,
            Partition& part, std::vector<double>& best)
{
    check_agent_count(states.size());
    part.owner.assign(grid.size(), Partition::kNone);
    part.covering.assign(grid.size(), 0);
    best.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const AgentState& st = states[i];
        const Optics o = optics(st, params);
        for_each_cell_in_fov(grid, st, params.r, [&](std::size_t idx, const Vec2&, double rho2, bool) {
            const double f = quality_inside(st, std::sqrt(rho2 + st.z * st.z), o, params);
            part.covering[idx] |= std::uint64_t{1} << i;
            if (part.owner[idx] == Partition::kNone || f > best[idx]) {
                part.owner[idx] = static_cast<int>(i);
                best[idx] = f;
            }
        });
    }
}

}  // namespace

Partition partition(std::span<const AgentState> states, const SensingParams& params, const Grid& grid)
{
    Partition part;
    std::vector<double> best;
    assign(states, params, grid, part, best);
    return part;
}

CoverageEvaluation evaluate_coverage(std::span<const AgentState> states, const SensingParams& params,
                                     const SampledDensity& density)
{
    const Grid& grid = density.grid;
    Partition part;
    std::vector<double> best;
    assign(states, params, grid, part, best);

    const double dA = grid.cell_area();
    CoverageEvaluation out;
    out.report.cell_mass.assign(states.size(), 0.0);
    out.nominal.assign(states.size(), Vec4::Zero());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const AgentState& st = states[i];
        const Optics o = optics(st, params);
        double own = 0.0;
        double lost = 0.0;
        Vec4 grad_own = Vec4::Zero();
        Vec4 grad_lost = Vec4::Zero();
        for_each_cell_in_fov(grid, st, params.r, [&](std::size_t idx, const Vec2& q, double rho2, bool interior) {
            const double phi = density.phi[idx];
            if (phi == 0.0)
                return;
            const double d = std::sqrt(rho2 + st.z * st.z);
            const double f = quality_inside(st, d, o, params);
            const bool owned = part.owner[idx] == static_cast<int>(i);
            if (owned) {
                own += f * phi;
                out.report.cell_mass[i] += phi * dA;
            } else {
                lost += f * phi;
            }
            if (interior) {
                const Vec4 g = gradient_inside(st, q, d, o, params) * phi;
                if (owned)
                    grad_own += g;
                else
                    grad_lost += g;
            }
        });
        out.report.H_M += own * dA;
        out.report.H_O += lost * dA;
        out.nominal[i] = (grad_own - params.w * grad_lost) * dA;
    }
    out.report.H = out.report.H_M - params.w * out.report.H_O;

    double max_form = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
        if (part.owner[idx] != Partition::kNone)
            max_form += best[idx] * density.phi[idx];
    out.report.H_M_max_form = max_form * dA;
    return out;
}

CoverageReport coverage_objective(std::span<const AgentState> states, const SensingParams& params,
                                  const DensityField& density, const Grid& grid)
{
    return evaluate_coverage(states, params, SampledDensity(density, grid)).report;
}

Vec4 nominal_input(std::size_t agent, std::span<const AgentState> states, const SensingParams& params,
                   const DensityField& density, const Grid& grid)
{
    if (agent >= states.size())
        throw Error("agent index out of range");
    return evaluate_coverage(states, params, SampledDensity(density, grid)).nominal[agent];
}

}  // namespace holecov
