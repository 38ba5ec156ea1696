#pragma once

// Sweep results as CSV (one row per configuration) and as an SVG plot.

#include "rh/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace rh {

void write_sweep_csv(std::ostream& out, const SweepResult& result);
// Rebuilds points and hull; throws MalformedHeader / TruncatedData on bad input.
SweepResult read_sweep_csv(std::istream& in);

void write_sweep_svg(std::ostream& out, const SweepResult& result);

// Writes <stem>.csv and <stem>.svg; throws IoFailure.
void emit_report(const SweepResult& result, const std::filesystem::path& stem);

}  // namespace rh
