#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "holecov/sim.hpp"

namespace holecov {

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parses the sectioned scenario format:
///
///   [agents]      x y z lambda [ux uy uz ulambda]   one row per agent
///   [sensing]     r, kappa, sigma, M, w
///   [density]     mission = xmin ymin xmax ymax, then rows weight mx my scale
///   [sim]         dt, steps, mode, nominal, grid_resolution, hole_every,
///                 min_z, min_lambda, seed, jitter, strict_clamps
///   [controller]  epsilon, guard_threshold, w_lambda, alpha_gain, alpha_power
///
/// `#` starts a comment. Omitted keys keep their defaults; unknown keys are errors.
/// Throws ParseError for malformed text and ValidationError for invalid values.
Scenario parse_config(std::string_view text);

Scenario load_config(const std::filesystem::path& path);

/// Text that parse_config maps back to an equal scenario.
std::string serialize(const Scenario& scenario);

}  // namespace holecov
