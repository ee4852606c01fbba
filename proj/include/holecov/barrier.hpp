#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "holecov/geometry.hpp"

namespace holecov {

// Component indices follow the barrier's 1-based numbering:
//   1: -h_IJK, 2: -h_JKI, 3: -h_KIJ, 4: h_F.
inline constexpr int kComponentIJK = 1;
inline constexpr int kComponentJKI = 2;
inline constexpr int kComponentKIJ = 3;
inline constexpr int kComponentFov = 4;

/// Bit (l - 1) set means component l takes part in the max.
using ComponentMask = std::uint8_t;
inline constexpr ComponentMask kAllComponents = 0b1111;
inline constexpr ComponentMask kFovComponentOnly = 0b1000;

inline constexpr double kDefaultEpsilon = 0.2;
inline constexpr double kDefaultGuardThreshold = 1e4;

struct CbfComponents {
    std::array<double, 4> vals{};

    /// 1-based access.
    double at(int component) const { return vals.at(static_cast<std::size_t>(component - 1)); }
};

struct NcbfValue {
    double value = 0.0;
    int argmax = kComponentFov;
    /// Ascending 1-based component indices with |h_l - h| <= epsilon.
    std::vector<int> active_set;
};

struct CbfGradient {
    /// d/d(x, y, z, lambda) of one component, world frame.
    Vec4 d = Vec4::Zero();

    double norm() const { return d.norm(); }
};

/// Component values seen from `agent`, which plays the role of I; J and K are
/// the next two trio members in cyclic order.
CbfComponents cbf_components(const TrioContext& trio, std::size_t agent);

/// Max over the masked components plus the almost-active set.
NcbfValue ncbf_value(const CbfComponents& comps, double epsilon, ComponentMask mask = kAllComponents);
NcbfValue ncbf_value(const TrioContext& trio, std::size_t agent, double epsilon,
                     ComponentMask mask = kAllComponents);

/// Analytic gradient of component `component` (1..4) with respect to the state
/// of `agent`. Evaluated in the agent's J-K frame and rotated back.
CbfGradient cbf_gradient(const TrioContext& trio, std::size_t agent, int component);

/// Triangle components (1..3) whose magnitude exceeds `threshold`.
std::vector<int> degenerate_guard(const CbfComponents& comps, double threshold);

}  // namespace holecov
