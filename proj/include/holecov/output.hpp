#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

#include "holecov/sim.hpp"

namespace holecov {

/// Comma-separated trace, one row per step. Agent columns are suffixed with the
/// agent index; units are given in brackets in the header.
void write_trace(std::ostream& out, std::span<const TraceRecord> trace);

/// Flat `key = value` document.
void write_summary(std::ostream& out, const Scenario& scenario, const RunResult& result);

/// Writes positions.csv, radius.csv, ncbf.csv and global.csv into `dir`.
/// Returns the written paths. Throws Error on an empty trace or IO failure.
std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& dir,
                                                 std::span<const TraceRecord> trace);

}  // namespace holecov
