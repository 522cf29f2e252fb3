#pragma once

/**
 * @file
 * @brief Problem files, CSV exports and the Verdict report.
 *
 * A problem file is JSON:
 *
 *     {
 *       "schema": "nonessential-problem/1",
 *       "name": "rocket-car",
 *       "n": 2, "r": 1,
 *       "t0": 0,
 *       "horizon": {"free": true, "Tmin": 0.1, "Tmax": 10},   // or {"free": false, "T": 2}
 *       "initial_state": [1, 0],
 *       "terminal_state": [0, null],                          // null leaves a component free
 *       "control_bounds": {"lo": [-1], "hi": [1]},            // null is unbounded
 *       "dynamics": ["x2", "u1"],
 *       "path_constraints": ["x1 - 3", "-x1 - 3"],            // g <= 0
 *       "objectives": [
 *         {"name": "time", "integrand": "1"},
 *         {"name": "sum", "integrand": "1 - u1", "composition": "y1 + y2"},
 *         {"name": "dist", "composition": "max(y1, y2)"}      // derived
 *       ],
 *       "solver": {"K": 200, "starts": 16, "seed": 0, "backend": "switchtime", ...}
 *     }
 *
 * Every key except "schema", "dynamics", "objectives" and the state/control
 * sizes is optional. Numbers are written in shortest round-trip form, so
 * exports are byte-stable.
 */

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "nonessential/analyzer.hpp"
#include "nonessential/error.hpp"
#include "nonessential/pareto.hpp"
#include "nonessential/problem.hpp"
#include "nonessential/solver.hpp"

namespace nonessential {

inline constexpr std::string_view kProblemSchema = "nonessential-problem/1";
inline constexpr std::string_view kVerdictSchema = "nonessential-verdict/1";

/// Input file missing or unreadable.
class FileError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem file: bad JSON, wrong schema, missing or mistyped keys.
class FormatError : public Error {
 public:
  using Error::Error;
};

struct ProblemFile {
  ProblemSpec spec;
  SolverConfig solver;
};

/// Throws FormatError on malformed JSON or schema mismatch, ParseError on a bad
/// expression and ValidationError when the spec fails validate().
ProblemFile parse_problem(std::string_view text);
ProblemFile load_problem(const std::filesystem::path& path);
std::string dump_problem(const ProblemFile& file);

/// Shortest decimal string that parses back to `v`; "inf", "-inf", "nan".
std::string format_number(double v);

/// Header I1..IN,T,u1_1..u1_K,u2_1..; one row per member in archive order.
/// Row i + 1 of the file (counting the header as row 0) is member i.
void write_front_csv(std::ostream& out, const ParetoArchive& archive);

/// Header t,x1..xn,u1..ur; one row per grid node. The control columns hold the
/// value on the interval starting at that node and are empty on the last node.
void write_trajectory_csv(std::ostream& out, const Solution& s);

/// Verdict report. Witnesses are listed as 1-based data rows of the CSV
/// written by write_front_csv(verdict.archive), named by `front_csv`.
std::string verdict_json(const Verdict& v, std::string_view front_csv);

void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace nonessential
