#pragma once

/**
 * @file
 * @brief Direct transcription: piecewise-constant controls on a uniform grid,
 * classical RK4 for the state, trapezoid rule for the cost integrals.
 *
 * A free final time is handled on the normalized interval [0, 1] with the
 * right-hand side scaled by the duration, which on a uniform grid is the same
 * as a step of (T - t0) / K.
 */

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nonessential/problem.hpp"

namespace nonessential {

/// Finite stand-in for u(.): K values per control channel, plus T when free.
struct DecisionVector {
  std::vector<std::vector<double>> controls;  // [r][K]
  std::optional<double> T;

  static DecisionVector constant(const ProblemSpec& spec, int K, std::span<const double> u,
                                 std::optional<double> T = std::nullopt);
};

/// Integrates the dynamics and accumulates every objective. Throws EvalError on
/// expression errors or a non-finite state.
Solution simulate(const ProblemSpec& spec, const DecisionVector& d, int K);

bool check_feasible(const Solution& sol, double tol_terminal, double tol_path);

/// I_i + mu * (sum of squared terminal errors + sum of squared path violations).
/// `objective` is 0-based.
double penalized_objective(const ProblemSpec& spec, const DecisionVector& d, int K, std::size_t objective,
                           double mu);

/// Reusable evaluator over flat decision vectors, laid out as
/// [u1(0..K-1), ..., ur(0..K-1), T?].
class Transcription {
 public:
  struct Outcome {
    ObjectiveVector objectives;
    Residuals residuals;
  };

  /// Per-grid-point snapshot of an evaluation, used to restart integration
  /// from any interval when only later controls change.
  struct Trace {
    std::vector<double> states;      // [(K+1) * n]
    std::vector<double> integrals;   // [(K+1) * N], sums over intervals before k
    std::vector<double> path_max;    // [K+1]
    std::vector<double> path_sq;     // [K+1]
  };

  Transcription(const ProblemSpec& spec, int K);

  const ProblemSpec& spec() const noexcept { return spec_; }
  int K() const noexcept { return K_; }
  std::size_t size() const noexcept { return size_; }
  bool free_horizon() const noexcept { return free_; }

  std::vector<double> lower() const;
  std::vector<double> upper() const;

  std::vector<double> flatten(const DecisionVector& d) const;
  DecisionVector unflatten(std::span<const double> flat) const;

  double final_time(std::span<const double> flat) const;

  Outcome evaluate(std::span<const double> flat, Trace* record = nullptr) const;

  /// Re-evaluates `flat` reusing `base` for every interval before `interval`.
  /// `flat` must agree with the vector that produced `base` on those intervals
  /// and on T.
  Outcome resume(const Trace& base, std::size_t interval, std::span<const double> flat) const;

  Solution solution(std::span<const double> flat) const;

 private:
  Outcome run(std::span<const double> flat, std::size_t first, const Trace* base, Trace* record,
              Solution* out) const;

  ProblemSpec spec_;
  int K_;
  std::size_t n_, r_, N_;
  bool free_;
  std::size_t size_;
  std::vector<std::optional<Expr>> integrands_;  // per objective, smoothed when requested
};

}  // namespace nonessential
