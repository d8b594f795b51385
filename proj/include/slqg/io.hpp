#pragma once

#include <iosfwd>
#include <string>

#include "slqg/asset.hpp"
#include "slqg/riccati.hpp"
#include "slqg/sim.hpp"

namespace slqg {

// JSON game description: {"dims": {"n":1,"m1":1,"m2":1}, "horizon_T": 10.0,
// "delta": 0.15, "A": [[0.03]], ... , "G2": [[1.0]]}. Matrices are row-major
// nested arrays; bare numbers are accepted for 1x1 entries. Only constant
// coefficients are expressible in files; time-varying games use the API.
GameSpec load_game_spec(const std::string& path);
GameSpec parse_game_spec(const std::string& json_text);

// Doubles are written with up to 17 significant digits (round-trip exact), so
// repeated runs produce byte-identical files.
std::string format_double(double v);

// One row per node: t, vec(P1), vec(P2), vec(theta1), vec(theta2), and the
// per-node diagnostics columns.
void write_solution_csv(std::ostream& os, const EreSolution& sol);

// Reads gain columns (theta1_*, theta2_*) back from a solution CSV.
GainSchedule load_gain_schedule(const std::string& path, const Dims& dims);

// One row per (path, node) with state/control columns, then a trailing
// comment block with per-player cost summaries.
void write_ensemble_csv(std::ostream& os, const PathEnsemble& ensemble,
                        const GameSpec& spec);

// Figure tables, each with a gnuplot-friendly leading comment:
//   fig1: t,P1,P2   fig2: path,t,X   fig3: path,t,u1,u2
void write_fig1_csv(std::ostream& os, const FigureBundle& bundle);
void write_fig2_csv(std::ostream& os, const FigureBundle& bundle);
void write_fig3_csv(std::ostream& os, const FigureBundle& bundle);

std::string read_text_file(const std::string& path);  // Error(io) if missing
void write_text_file(const std::string& path, const std::string& content);

}  // namespace slqg
