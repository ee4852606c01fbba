#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace holecov {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Three FOVs that violate the non-concentric / non-collinear assumption.
class DegenerateTrio : public Error {
public:
    using Error::Error;
};

class DegenerateTriangle : public Error {
public:
    using Error::Error;
};

// Signed-area and concentricity tolerances for trio degeneracy.
inline constexpr double kDegenerateArea = 1e-9;
inline constexpr double kConcentricTol = 1e-9;

/// State of one quadcopter: ground position, altitude and focal length.
struct AgentState {
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;
    double lambda = 1.0;

    Vec2 ground() const { return {x, y}; }
    Vec4 as_vector() const { return {x, y, z, lambda}; }
    static AgentState from_vector(const Vec4& p) { return {p[0], p[1], p[2], p[3]}; }

    bool operator==(const AgentState&) const = default;
};

/// Field of view on the ground plane: a closed disk.
struct Fov {
    Vec2 center = Vec2::Zero();
    double radius = 1.0;
};

/// FOV radius r * z / lambda.
double fov_radius(const AgentState& s, double r);
Fov make_fov(const AgentState& s, double r);

struct Line2 {
    Vec2 point = Vec2::Zero();
    Vec2 direction = Vec2::UnitX();

    double distance_to(const Vec2& q) const;
};

struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 1.0;
    double ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diagonal() const;
    bool contains(const Vec2& q) const;
};

/// ||q - center||^2 - radius^2. Negative inside the disk, zero on its boundary.
double power_distance(const Fov& fov, const Vec2& q);

/// Locus of equal power distance to two non-concentric circles.
/// Throws DegenerateTrio when the centers coincide.
Line2 radical_axis(const Fov& a, const Fov& b);

/// Common point of the three pairwise radical axes.
Vec2 radical_center(const Fov& a, const Fov& b, const Fov& c);

/// Twice the signed area of triangle (a, b, c); positive when counter-clockwise.
double cross2(const Vec2& a, const Vec2& b, const Vec2& c);

/// Per-trio coordinate frame: x axis along line JK, y axis along the radical
/// axis of J and K. Maps world points q to R * (q - origin).
struct SigmaDFrame {
    Vec2 origin = Vec2::Zero();
    Mat2 rotation = Mat2::Identity();

    Vec2 to_frame(const Vec2& q) const { return rotation * (q - origin); }
    Vec2 to_world(const Vec2& qd) const { return rotation.transpose() * qd + origin; }
    /// Maps a frame-expressed gradient (covector) back to world coordinates.
    Vec2 gradient_to_world(const Vec2& gd) const { return rotation.transpose() * gd; }
};

/// One triangular subgraph {i, j, k}. Positions 0, 1, 2 of every array refer to
/// ids[0], ids[1], ids[2].
struct TrioContext {
    std::array<std::size_t, 3> ids{};
    std::array<AgentState, 3> states{};
    std::array<Fov, 3> fovs{};
    double r = 1.0;
    Vec2 radical_center = Vec2::Zero();
    std::array<Vec2, 3> triangle{};
    /// frames[p] is the frame used when ids[p] is the distinguished agent.
    std::array<SigmaDFrame, 3> frames{};

    /// Position (0..2) of an agent id inside the trio; throws if absent.
    std::size_t slot_of(std::size_t agent) const;
    bool contains(std::size_t agent) const;
};

/// Builds the trio for agents ids drawn from states. Throws DegenerateTrio.
TrioContext make_trio(std::span<const AgentState> states, double r, std::array<std::size_t, 3> ids);

/// Frame for the distinguished agent `agent` (J, K are the other two, taken in
/// cyclic order after it).
SigmaDFrame sigma_d_frame(const TrioContext& trio, std::size_t agent);

struct TriangleTest {
    bool inside = false;
    /// Signed-area ratios (IJK, JKI, KIJ): barycentric weights of K, I, J.
    std::array<double, 3> ratios{};
};

/// Throws DegenerateTriangle when |signed area| < kDegenerateArea.
TriangleTest point_in_triangle(const Vec2& I, const Vec2& J, const Vec2& K, const Vec2& v);

/// True when the radical center lies strictly inside IJK and strictly outside
/// the FOVs.
bool hole_exists_exact(const TrioContext& trio);

struct CommGraph {
    std::size_t n = 0;
    /// Sorted (i < j) pairs.
    std::vector<std::array<std::size_t, 2>> edges;
    /// All trios with sorted ids, lexicographically ordered.
    std::vector<TrioContext> trios;
    /// agent_trios[i] holds indices into `trios` (the set T_i).
    std::vector<std::vector<std::size_t>> agent_trios;
    /// Power-Delaunay triangles discarded because a FOV pair does not overlap.
    std::size_t filtered_triangles = 0;

    bool has_edge(std::size_t i, std::size_t j) const;
    std::vector<std::size_t> neighbors(std::size_t i) const;
    /// Sorted id triples of T_i.
    std::vector<std::array<std::size_t, 3>> trio_ids(std::size_t i) const;
};

/// Closed intersection test (tangent disks overlap).
bool fovs_overlap(const Fov& a, const Fov& b);

/// Power-Delaunay triangles of a set of circles, by direct enumeration.
/// Degenerate vertices shared by four or more circles are fan-triangulated from
/// the lowest index in angular order. Result is sorted lexicographically.
std::vector<std::array<std::size_t, 3>> power_delaunay_triangles(std::span<const Fov> fovs);

/// Pairs whose power cells share a boundary segment of positive length.
std::vector<std::array<std::size_t, 2>> power_delaunay_edges(std::span<const Fov> fovs);

CommGraph build_graph(std::span<const AgentState> states, double r);

/// Uniform grid of cell midpoints over a rectangle.
struct Grid {
    Rect bounds;
    std::size_t nx = 1;
    std::size_t ny = 1;
    double hx = 1.0;
    double hy = 1.0;

    static Grid over(const Rect& bounds, double resolution);
    std::size_t size() const { return nx * ny; }
    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
    Vec2 point(std::size_t ix, std::size_t iy) const;
    Vec2 point(std::size_t idx) const { return point(idx % nx, idx / nx); }
    double cell_area() const { return hx * hy; }
    /// Index range [lo, hi) of columns / rows whose midpoints may lie in the box.
    std::array<std::size_t, 4> clip(double xmin, double ymin, double xmax, double ymax) const;
};

/// Grid oracle: uncovered grid points inside some trio triangle whose
/// uncovered 4-connected component does not touch the mission boundary.
std::vector<Vec2> detect_holes_grid(std::span<const Fov> fovs,
                                    std::span<const std::array<Vec2, 3>> triangles,
                                    const Rect& mission, double resolution);

std::vector<Vec2> detect_holes_grid(std::span<const AgentState> states, double r,
                                    const Rect& mission, double resolution);

/// Default oracle resolution: 1/200 of the mission diagonal.
double default_hole_resolution(const Rect& mission);

}  // namespace holecov
