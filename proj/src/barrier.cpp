#include "holecov/barrier.hpp"

#include <cmath>

namespace holecov {

CbfComponents cbf_components(const TrioContext& trio, std::size_t agent)
{
    const std::size_t p = trio.slot_of(agent);
    const Vec2& I = trio.triangle[p];
    const Vec2& J = trio.triangle[(p + 1) % 3];
    const Vec2& K = trio.triangle[(p + 2) % 3];
    TriangleTest test;
    try {
        test = point_in_triangle(I, J, K, trio.radical_center);
    } catch (const DegenerateTriangle& e) {
        throw DegenerateTrio(e.what());
    }
    CbfComponents out;
    out.vals = {-test.ratios[0], -test.ratios[1], -test.ratios[2],
                -power_distance(trio.fovs[p], trio.radical_center)};
    return out;
}

NcbfValue ncbf_value(const CbfComponents& comps, double epsilon, ComponentMask mask)
{
    if (!(epsilon > 0.0))
        throw Error("epsilon must be positive");
    if ((mask & kAllComponents) == 0)
        throw Error("empty component mask");
    NcbfValue out;
    bool first = true;
    for (int l = 1; l <= 4; ++l) {
        if (!(mask & (1u << (l - 1))))
            continue;
        if (first || comps.at(l) > out.value) {
            out.value = comps.at(l);
            out.argmax = l;
            first = false;
        }
    }
    for (int l = 1; l <= 4; ++l)
        if ((mask & (1u << (l - 1))) && std::abs(comps.at(l) - out.value) <= epsilon)
            out.active_set.push_back(l);
    return out;
}

NcbfValue ncbf_value(const TrioContext& trio, std::size_t agent, double epsilon, ComponentMask mask)
{
    return ncbf_value(cbf_components(trio, agent), epsilon, mask);
}

namespace {

// Partials with respect to (a, b, S) where (a, b) is I in the J-K frame and
// S = R_i^2. J = (xj, 0), K = (xk, 0), c = xj^2 - R_j^2 = xk^2 - R_k^2 and the
// radical center sits at (0, vy) with vy = (a^2 + b^2 - S - c) / (2 b).
struct FramePartials {
    double da = 0.0;
    double db = 0.0;
    double dS = 0.0;
};

FramePartials fov_partials(double a, double b, double S, double c)
{
    const double vy = (a * a + b * b - S - c) / (2.0 * b);
    return {-2.0 * a * vy / b, (a * a - b * b - S - c) * vy / (b * b), vy / b};
}

FramePartials jki_partials(double a, double b, double S, double c)
{
    return {a / (b * b), -(a * a - S - c) / (b * b * b), -1.0 / (2.0 * b * b)};
}

// h_IJK = [(xj - a)(a^2 - S - c) - b^2 (a + xj)] / (2 b^2 (xk - xj)).
FramePartials ijk_partials(double a, double b, double S, double c, double xj, double xk)
{
    const double D = xk - xj;
    const double b2 = b * b;
    return {(-3.0 * a * a + 2.0 * a * xj - b2 + S + c) / (2.0 * b2 * D),
            -(xj - a) * (a * a - S - c) / (b2 * b * D),
            -(xj - a) / (2.0 * b2 * D)};
}

}  // namespace

CbfGradient cbf_gradient(const TrioContext& trio, std::size_t agent, int component)
{
    if (component < 1 || component > 4)
        throw Error("component index must be in 1..4");
    const std::size_t p = trio.slot_of(agent);
    const std::size_t pj = (p + 1) % 3;
    const std::size_t pk = (p + 2) % 3;
    const SigmaDFrame& frame = trio.frames[p];
    const Vec2 Id = frame.to_frame(trio.triangle[p]);
    const double xj = frame.to_frame(trio.triangle[pj]).x();
    const double xk = frame.to_frame(trio.triangle[pk]).x();
    const double a = Id.x();
    const double b = Id.y();
    if (std::abs(0.5 * (xk - xj) * b) < kDegenerateArea)
        throw DegenerateTrio("agent lies on line JK");

    const AgentState& s = trio.states[p];
    const double S = trio.fovs[p].radius * trio.fovs[p].radius;
    const double Rj = trio.fovs[pj].radius;
    const double c = xj * xj - Rj * Rj;
    const double r2 = trio.r * trio.r;
    const double dS_dz = 2.0 * r2 * s.z / (s.lambda * s.lambda);
    const double dS_dlambda = -2.0 * r2 * s.z * s.z / (s.lambda * s.lambda * s.lambda);

    FramePartials fp;
    double sign = -1.0;
    switch (component) {
    case kComponentIJK:
        fp = ijk_partials(a, b, S, c, xj, xk);
        break;
    case kComponentJKI:
        fp = jki_partials(a, b, S, c);
        break;
    case kComponentKIJ:
        // Mirror image of IJK across the y_d axis with J and K swapped.
        fp = ijk_partials(-a, b, S, c, -xk, -xj);
        fp.da = -fp.da;
        break;
    default:
        fp = fov_partials(a, b, S, c);
        sign = 1.0;
        break;
    }
    const Vec2 world = frame.gradient_to_world(Vec2(fp.da, fp.db));
    CbfGradient g;
    g.d << world.x(), world.y(), fp.dS * dS_dz, fp.dS * dS_dlambda;
    g.d *= sign;
    return g;
}

std::vector<int> degenerate_guard(const CbfComponents& comps, double threshold)
{
    if (!(threshold > 0.0))
        throw Error("guard threshold must be positive");
    std::vector<int> out;
    for (int l = 1; l <= 3; ++l)
        if (std::abs(comps.at(l)) > threshold)
            out.push_back(l);
    return out;
}

}  // namespace holecov
