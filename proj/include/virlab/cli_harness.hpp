#pragma once

// Experiment front door: JSON config in, deterministic CSV/JSON (and optional
// SVG log-log plot) out. Subcommands: energy, perturb, virasoro, length,
// saddle, cocycle. Exit codes: 0 ok, 2 invariant violation, 3 numerical
// failure, 4 config/output error.

#include <string>

namespace virlab::cli {

int run(int argc, const char* const* argv);

/// %.17g formatting used for every CSV number.
std::string fmt(double v);

} // namespace virlab::cli
