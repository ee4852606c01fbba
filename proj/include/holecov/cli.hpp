#pragma once

#include <filesystem>
#include <optional>

#include "holecov/sim.hpp"

namespace holecov {

struct EmitFlags {
    bool trace = true;
    bool summary = true;
    bool plotdata = false;
};

struct RunConfig {
    std::filesystem::path scenario;
    std::filesystem::path out_dir;
    std::optional<Mode> mode;
    std::optional<int> steps;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    EmitFlags emit;
};

/// Parses "trace,summary,plotdata" (any subset). Throws ValidationError.
EmitFlags parse_emit(const std::string& list);

/// Loads, overrides, runs and writes trace.csv, summary.txt and plot data into
/// out_dir. Returns 0 on success, 2 on invalid input, 3 when a strict-clamp
/// scenario clamped, 1 on other failures. Errors are reported on stderr.
int run_command(const RunConfig& config);

}  // namespace holecov
