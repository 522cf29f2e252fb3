#pragma once

/**
 * @file
 * @brief Scalar minimization over the transcribed feasible set.
 *
 * Two backends share one penalty formulation:
 *
 *   merit = sum_i w_i I_i + mu * (terminal_sq + path_sq + sum_j max(0, I_j - b_j)^2)
 *
 * `Gradient` runs multi-start projected gradient descent on the full control
 * grid. `SwitchTime` restricts controls to piecewise-constant profiles with few
 * switches and optimizes the switch instants and T directly.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nonessential/problem.hpp"

namespace nonessential {

enum class Backend { Gradient, SwitchTime };

struct PenaltySchedule {
  double mu0 = 10.0;
  double growth = 10.0;
  int rounds = 4;
  /// Further escalations allowed while the last iterate is still infeasible.
  int extra_rounds = 6;
};

struct Backtracking {
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_steps = 30;
};

struct SolverConfig {
  int K = 200;
  int starts = 16;
  std::uint64_t seed = 0;
  PenaltySchedule penalty;
  Backtracking step;
  double tol_terminal = 1e-3;
  double tol_path = 1e-3;
  double tol_step = 1e-8;
  /// Relative: values within tol_opt * max(1, |best|) count as near-optimal.
  double tol_opt = 1e-4;
  /// Relative slack on epsilon-constraint bounds: I_j <= b_j + tol_bound * (1 + |b_j|).
  double tol_bound = 1e-6;
  Backend backend = Backend::SwitchTime;
  int max_switches = 2;
  /// Iteration cap per penalty round (gradient steps or Powell sweeps).
  int max_iterations = 200;
  /// 0 = NONESSENTIAL_THREADS or hardware concurrency.
  std::size_t threads = 0;

  /// Throws Error when a field is out of range.
  void validate() const;
};

/// Weighted sum with optional upper bounds on individual objectives.
struct Scalarization {
  std::vector<double> weights;       // one per objective
  std::vector<double> upper_bounds;  // +inf when unconstrained

  static Scalarization single(std::size_t N, std::size_t i);
  static Scalarization weighted(std::span<const double> gamma);
  static Scalarization eps_constrained(std::size_t i, std::span<const double> bounds);

  double value(const ObjectiveVector& v) const;
  double bound_violation_sq(const ObjectiveVector& v) const;
  bool within_bounds(const ObjectiveVector& v, double tol) const;
  std::size_t positive_weights() const;
};

/// Piecewise-constant control found by the switch-time backend.
struct SwitchStructure {
  std::vector<std::vector<double>> levels;        // per channel, in time order
  std::vector<std::vector<double>> switch_times;  // per channel, absolute times
  int switches() const;
};

struct ScalarResult {
  Solution best;
  double value = 0.0;
  /// Feasible solutions within tol_opt of `value`, pairwise distinct (max-norm
  /// control distance above 5% of the bound range). Starts with `best`.
  std::vector<Solution> all_near_optimal;
  bool converged = false;
  std::optional<SwitchStructure> structure;
  std::size_t evaluations = 0;
  /// Objective vectors of every feasible local-search result, in job order.
  std::vector<ObjectiveVector> candidates;
};

/// Distinctness used for all_near_optimal.
bool distinct_controls(const ProblemSpec& spec, const Solution& a, const Solution& b);

ScalarResult minimize(const ProblemSpec& spec, const Scalarization& s, const SolverConfig& cfg);

/// `i` is 0-based.
ScalarResult minimize_scalar(const ProblemSpec& spec, std::size_t i, const SolverConfig& cfg);

/// gamma >= 0 with sum 1, one weight per objective.
ScalarResult minimize_weighted(const ProblemSpec& spec, std::span<const double> gamma, const SolverConfig& cfg);

/// Minimizes I_i subject to I_j <= bounds_j. bounds_i must be +inf.
ScalarResult minimize_eps_constrained(const ProblemSpec& spec, std::size_t i, std::span<const double> bounds,
                                      const SolverConfig& cfg);

}  // namespace nonessential
