#include "holecov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

namespace holecov {

double fov_radius(const AgentState& s, double r) { return r * s.z / s.lambda; }

Fov make_fov(const AgentState& s, double r) { return {s.ground(), fov_radius(s, r)}; }

double Line2::distance_to(const Vec2& q) const
{
    const Vec2 d = q - point;
    return std::abs(direction.x() * d.y() - direction.y() * d.x());
}

double Rect::diagonal() const { return std::hypot(width(), height()); }

bool Rect::contains(const Vec2& q) const
{
    return q.x() >= xmin && q.x() <= xmax && q.y() >= ymin && q.y() <= ymax;
}

double power_distance(const Fov& fov, const Vec2& q)
{
    return (q - fov.center).squaredNorm() - fov.radius * fov.radius;
}

Line2 radical_axis(const Fov& a, const Fov& b)
{
    const Vec2 delta = b.center - a.center;
    const double d = delta.norm();
    if (d < kConcentricTol)
        throw DegenerateTrio("radical axis of concentric circles");
    const Vec2 n = delta / d;
    const double t = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    return {a.center + t * n, Vec2(-n.y(), n.x())};
}

double cross2(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

namespace {

bool concentric(const Fov& a, const Fov& b)
{
    return (a.center - b.center).norm() < kConcentricTol && std::abs(a.radius - b.radius) < kConcentricTol;
}

void check_trio(const Fov& a, const Fov& b, const Fov& c)
{
    if (concentric(a, b) || concentric(b, c) || concentric(c, a))
        throw DegenerateTrio("concentric FOV pair");
    if (std::abs(0.5 * cross2(a.center, b.center, c.center)) < kDegenerateArea)
        throw DegenerateTrio("collinear FOV centers");
}

}  // namespace

Vec2 radical_center(const Fov& a, const Fov& b, const Fov& c)
{
    check_trio(a, b, c);
    // 2 (b - a) . q = (|b|^2 - Rb^2) - (|a|^2 - Ra^2), same for c.
    auto weight = [](const Fov& f) { return f.center.squaredNorm() - f.radius * f.radius; };
    Mat2 m;
    m.row(0) = 2.0 * (b.center - a.center).transpose();
    m.row(1) = 2.0 * (c.center - a.center).transpose();
    const Vec2 rhs(weight(b) - weight(a), weight(c) - weight(a));
    return m.partialPivLu().solve(rhs);
}

std::size_t TrioContext::slot_of(std::size_t agent) const
{
    for (std::size_t p = 0; p < 3; ++p)
        if (ids[p] == agent)
            return p;
    throw Error("agent " + std::to_string(agent) + " is not part of the trio");
}

bool TrioContext::contains(std::size_t agent) const
{
    return std::find(ids.begin(), ids.end(), agent) != ids.end();
}

namespace {

SigmaDFrame frame_on(const Fov& j, const Fov& k)
{
    const Line2 axis = radical_axis(j, k);
    Vec2 ex = (k.center - j.center).normalized();
    // The radical axis crosses line JK at axis.point.
    if (ex.dot(k.center - axis.point) < 0.0)
        ex = -ex;
    SigmaDFrame frame;
    frame.origin = axis.point;
    frame.rotation.row(0) = ex.transpose();
    frame.rotation.row(1) = Vec2(-ex.y(), ex.x()).transpose();
    return frame;
}

}  // namespace

TrioContext make_trio(std::span<const AgentState> states, double r, std::array<std::size_t, 3> ids)
{
    TrioContext trio;
    trio.ids = ids;
    trio.r = r;
    for (std::size_t p = 0; p < 3; ++p) {
        if (ids[p] >= states.size())
            throw Error("trio id out of range");
        trio.states[p] = states[ids[p]];
        trio.fovs[p] = make_fov(states[ids[p]], r);
        trio.triangle[p] = trio.fovs[p].center;
    }
    trio.radical_center = radical_center(trio.fovs[0], trio.fovs[1], trio.fovs[2]);
    for (std::size_t p = 0; p < 3; ++p)
        trio.frames[p] = frame_on(trio.fovs[(p + 1) % 3], trio.fovs[(p + 2) % 3]);
    return trio;
}

SigmaDFrame sigma_d_frame(const TrioContext& trio, std::size_t agent)
{
    const std::size_t p = trio.slot_of(agent);
    check_trio(trio.fovs[0], trio.fovs[1], trio.fovs[2]);
    return frame_on(trio.fovs[(p + 1) % 3], trio.fovs[(p + 2) % 3]);
}

TriangleTest point_in_triangle(const Vec2& I, const Vec2& J, const Vec2& K, const Vec2& v)
{
    const double area2 = cross2(I, J, K);
    if (std::abs(0.5 * area2) < kDegenerateArea)
        throw DegenerateTriangle("triangle IJK is degenerate");
    TriangleTest out;
    out.ratios = {cross2(I, J, v) / area2, cross2(J, K, v) / area2, cross2(K, I, v) / area2};
    out.inside = out.ratios[0] > 0.0 && out.ratios[1] > 0.0 && out.ratios[2] > 0.0;
    return out;
}

bool hole_exists_exact(const TrioContext& trio)
{
    check_trio(trio.fovs[0], trio.fovs[1], trio.fovs[2]);
    const auto test = point_in_triangle(trio.triangle[0], trio.triangle[1], trio.triangle[2], trio.radical_center);
    return test.inside && power_distance(trio.fovs[0], trio.radical_center) > 0.0;
}

bool CommGraph::has_edge(std::size_t i, std::size_t j) const
{
    const std::array<std::size_t, 2> e{std::min(i, j), std::max(i, j)};
    return std::binary_search(edges.begin(), edges.end(), e);
}

std::vector<std::size_t> CommGraph::neighbors(std::size_t i) const
{
    std::vector<std::size_t> out;
    for (const auto& e : edges) {
        if (e[0] == i)
            out.push_back(e[1]);
        else if (e[1] == i)
            out.push_back(e[0]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::array<std::size_t, 3>> CommGraph::trio_ids(std::size_t i) const
{
    std::vector<std::array<std::size_t, 3>> out;
    if (i >= agent_trios.size())
        return out;
    for (std::size_t t : agent_trios[i])
        out.push_back(trios[t].ids);
    return out;
}

bool fovs_overlap(const Fov& a, const Fov& b)
{
    return (a.center - b.center).norm() <= a.radius + b.radius;
}

namespace {

double tie_tolerance(double p, const Vec2& v) { return 1e-9 * (1.0 + std::abs(p) + v.squaredNorm()); }

// Fan triangulation of a degenerate power vertex: centers in angular order
// around their centroid, rotated to start at the lowest index.
void fan_triangulate(std::span<const Fov> fovs, const std::vector<std::size_t>& members,
                     std::vector<std::array<std::size_t, 3>>& out)
{
    Vec2 centroid = Vec2::Zero();
    for (std::size_t m : members)
        centroid += fovs[m].center;
    centroid /= static_cast<double>(members.size());
    std::vector<std::size_t> ring = members;
    std::sort(ring.begin(), ring.end(), [&](std::size_t a, std::size_t b) {
        const Vec2 da = fovs[a].center - centroid;
        const Vec2 db = fovs[b].center - centroid;
        const double ta = std::atan2(da.y(), da.x());
        const double tb = std::atan2(db.y(), db.x());
        return ta != tb ? ta < tb : a < b;
    });
    const auto lowest = std::min_element(ring.begin(), ring.end());
    std::rotate(ring.begin(), lowest, ring.end());
    for (std::size_t m = 1; m + 1 < ring.size(); ++m) {
        std::array<std::size_t, 3> tri{ring[0], ring[m], ring[m + 1]};
        if (std::abs(cross2(fovs[tri[0]].center, fovs[tri[1]].center, fovs[tri[2]].center)) < 2.0 * kDegenerateArea)
            continue;
        std::sort(tri.begin(), tri.end());
        out.push_back(tri);
    }
}

}  // namespace

std::vector<std::array<std::size_t, 3>> power_delaunay_triangles(std::span<const Fov> fovs)
{
    const std::size_t n = fovs.size();
    std::vector<std::array<std::size_t, 3>> out;
    std::set<std::vector<std::size_t>> degenerate;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                Vec2 v;
                try {
                    v = radical_center(fovs[i], fovs[j], fovs[k]);
                } catch (const DegenerateTrio&) {
                    continue;
                }
                const double p = power_distance(fovs[i], v);
                const double tol = tie_tolerance(p, v);
                std::vector<std::size_t> members{i, j, k};
                bool dominated = false;
                for (std::size_t l = 0; l < n && !dominated; ++l) {
                    if (l == i || l == j || l == k)
                        continue;
                    const double dl = power_distance(fovs[l], v);
                    if (dl < p - tol)
                        dominated = true;
                    else if (dl <= p + tol)
                        members.push_back(l);
                }
                if (dominated)
                    continue;
                if (members.size() == 3) {
                    out.push_back({i, j, k});
                } else {
                    std::sort(members.begin(), members.end());
                    degenerate.insert(members);
                }
            }
        }
    }
    for (const auto& members : degenerate)
        fan_triangulate(fovs, members, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::array<std::size_t, 2>> power_delaunay_edges(std::span<const Fov> fovs)
{
    const std::size_t n = fovs.size();
    std::vector<std::array<std::size_t, 2>> out;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            Line2 axis;
            try {
                axis = radical_axis(fovs[a], fovs[b]);
            } catch (const DegenerateTrio&) {
                continue;
            }
            const double scale = 1.0 + axis.point.squaredNorm() + fovs[a].radius * fovs[a].radius;
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            // Clip the axis by d_P(a, q) <= d_P(l, q) for every other circle l.
            for (std::size_t l = 0; l < n && lo < hi; ++l) {
                if (l == a || l == b)
                    continue;
                const Vec2 dl = fovs[l].center - fovs[a].center;
                const double rhs = fovs[l].center.squaredNorm() - fovs[l].radius * fovs[l].radius
                                   - fovs[a].center.squaredNorm() + fovs[a].radius * fovs[a].radius;
                const double slope = 2.0 * axis.direction.dot(dl);
                const double bound = rhs - 2.0 * axis.point.dot(dl);
                if (std::abs(slope) < 1e-14 * scale) {
                    if (bound < -1e-9 * scale)
                        hi = lo;
                } else if (slope > 0.0) {
                    hi = std::min(hi, bound / slope);
                } else {
                    lo = std::max(lo, bound / slope);
                }
            }
            if (hi - lo > 1e-9 * std::sqrt(scale))
                out.push_back({a, b});
        }
    }
    return out;
}

CommGraph build_graph(std::span<const AgentState> states, double r)
{
    CommGraph g;
    g.n = states.size();
    g.agent_trios.resize(g.n);
    std::vector<Fov> fovs;
    fovs.reserve(g.n);
    for (const auto& s : states)
        fovs.push_back(make_fov(s, r));

    const auto triangles = power_delaunay_triangles(fovs);
    std::set<std::array<std::size_t, 2>> edges;
    for (const auto& e : power_delaunay_edges(fovs))
        if (fovs_overlap(fovs[e[0]], fovs[e[1]]))
            edges.insert(e);
    for (const auto& t : triangles) {
        const bool ij = fovs_overlap(fovs[t[0]], fovs[t[1]]);
        const bool jk = fovs_overlap(fovs[t[1]], fovs[t[2]]);
        const bool ki = fovs_overlap(fovs[t[2]], fovs[t[0]]);
        if (ij)
            edges.insert({t[0], t[1]});
        if (jk)
            edges.insert({t[1], t[2]});
        if (ki)
            edges.insert({t[0], t[2]});
        if (!(ij && jk && ki)) {
            ++g.filtered_triangles;
            continue;
        }
        try {
            g.trios.push_back(make_trio(states, r, t));
        } catch (const DegenerateTrio&) {
            ++g.filtered_triangles;
        }
    }
    g.edges.assign(edges.begin(), edges.end());
    for (std::size_t t = 0; t < g.trios.size(); ++t)
        for (std::size_t id : g.trios[t].ids)
            g.agent_trios[id].push_back(t);
    return g;
}

Grid Grid::over(const Rect& bounds, double resolution)
{
    if (!(resolution > 0.0))
        throw Error("grid resolution must be positive");
    Grid g;
    g.bounds = bounds;
    g.nx = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.width() / resolution - 1e-9)));
    g.ny = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.height() / resolution - 1e-9)));
    g.hx = bounds.width() / static_cast<double>(g.nx);
    g.hy = bounds.height() / static_cast<double>(g.ny);
    return g;
}

Vec2 Grid::point(std::size_t ix, std::size_t iy) const
{
    return {bounds.xmin + (static_cast<double>(ix) + 0.5) * hx, bounds.ymin + (static_cast<double>(iy) + 0.5) * hy};
}

std::array<std::size_t, 4> Grid::clip(double x0, double y0, double x1, double y1) const
{
    auto lo = [](double v, std::size_t n) {
        return static_cast<std::size_t>(std::clamp(std::floor(v - 0.5), 0.0, static_cast<double>(n)));
    };
    auto hi = [](double v, std::size_t n) {
        return static_cast<std::size_t>(std::clamp(std::ceil(v + 0.5), 0.0, static_cast<double>(n)));
    };
    return {lo((x0 - bounds.xmin) / hx, nx), lo((y0 - bounds.ymin) / hy, ny),
            hi((x1 - bounds.xmin) / hx, nx), hi((y1 - bounds.ymin) / hy, ny)};
}

std::vector<Vec2> detect_holes_grid(std::span<const Fov> fovs,
                                    std::span<const std::array<Vec2, 3>> triangles,
                                    const Rect& mission, double resolution)
{
    const Grid grid = Grid::over(mission, resolution);
    const std::size_t n = grid.size();
    std::vector<char> covered(n, 0);
    for (const auto& f : fovs) {
        const auto [x0, y0, x1, y1] = grid.clip(f.center.x() - f.radius, f.center.y() - f.radius,
                                                f.center.x() + f.radius, f.center.y() + f.radius);
        for (std::size_t iy = y0; iy < y1; ++iy)
            for (std::size_t ix = x0; ix < x1; ++ix)
                if (power_distance(f, grid.point(ix, iy)) <= 0.0)
                    covered[grid.index(ix, iy)] = 1;
    }

    // Uncovered cells reachable from the mission boundary are not holes.
    std::vector<char> open(n, 0);
    std::deque<std::size_t> queue;
    auto seed = [&](std::size_t idx) {
        if (!covered[idx] && !open[idx]) {
            open[idx] = 1;
            queue.push_back(idx);
        }
    };
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        seed(grid.index(ix, 0));
        seed(grid.index(ix, grid.ny - 1));
    }
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
        seed(grid.index(0, iy));
        seed(grid.index(grid.nx - 1, iy));
    }
    while (!queue.empty()) {
        const std::size_t idx = queue.front();
        queue.pop_front();
        const std::size_t ix = idx % grid.nx;
        const std::size_t iy = idx / grid.nx;
        if (ix > 0)
            seed(idx - 1);
        if (ix + 1 < grid.nx)
            seed(idx + 1);
        if (iy > 0)
            seed(idx - grid.nx);
        if (iy + 1 < grid.ny)
            seed(idx + grid.nx);
    }

    std::vector<char> witness(n, 0);
    for (const auto& tri : triangles) {
        const double area2 = cross2(tri[0], tri[1], tri[2]);
        if (std::abs(0.5 * area2) < kDegenerateArea)
            continue;
        const double x0 = std::min({tri[0].x(), tri[1].x(), tri[2].x()});
        const double x1 = std::max({tri[0].x(), tri[1].x(), tri[2].x()});
        const double y0 = std::min({tri[0].y(), tri[1].y(), tri[2].y()});
        const double y1 = std::max({tri[0].y(), tri[1].y(), tri[2].y()});
        const auto [cx0, cy0, cx1, cy1] = grid.clip(x0, y0, x1, y1);
        for (std::size_t iy = cy0; iy < cy1; ++iy) {
            for (std::size_t ix = cx0; ix < cx1; ++ix) {
                const std::size_t idx = grid.index(ix, iy);
                if (covered[idx] || open[idx] || witness[idx])
                    continue;
                const Vec2 q = grid.point(ix, iy);
                if (cross2(tri[0], tri[1], q) / area2 > 0.0 && cross2(tri[1], tri[2], q) / area2 > 0.0
                    && cross2(tri[2], tri[0], q) / area2 > 0.0)
                    witness[idx] = 1;
            }
        }
    }
    std::vector<Vec2> out;
    for (std::size_t idx = 0; idx < n; ++idx)
        if (witness[idx])
            out.push_back(grid.point(idx));
    return out;
}

std::vector<Vec2> detect_holes_grid(std::span<const AgentState> states, double r,
                                    const Rect& mission, double resolution)
{
    const CommGraph g = build_graph(states, r);
    std::vector<Fov> fovs;
    for (const auto& s : states)
        fovs.push_back(make_fov(s, r));
    std::vector<std::array<Vec2, 3>> triangles;
    for (const auto& t : g.trios)
        triangles.push_back(t.triangle);
    return detect_holes_grid(fovs, triangles, mission, resolution);
}

double default_hole_resolution(const Rect& mission) { return mission.diagonal() / 200.0; }

}  // namespace holecov
