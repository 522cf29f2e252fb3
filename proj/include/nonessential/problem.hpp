#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nonessential/expr.hpp"

namespace nonessential {

struct FixedHorizon {
  double T = 1.0;
};

/// Final time is a decision variable in [Tmin, Tmax].
struct FreeHorizon {
  double Tmin = 0.0;
  double Tmax = 1.0;
};

using Horizon = std::variant<FixedHorizon, FreeHorizon>;

/// One cost functional. Either an integrand, a composition over the other
/// criteria (`y1..yN`), or an integrand carrying a declared composition tag.
struct Objective {
  std::string name;
  std::optional<Expr> integrand;
  std::optional<Expr> composition;
  /// Evaluate abs(z) as sqrt(z^2 + 1e-12) inside this integrand.
  bool smooth_abs = false;

  bool is_derived() const { return !integrand.has_value(); }
};

struct ProblemSpec {
  std::string name;
  int n = 1;  // states
  int r = 1;  // controls
  std::vector<Expr> dynamics;
  double t0 = 0.0;
  Horizon horizon = FixedHorizon{};
  std::vector<double> initial_state;
  /// Pinned value per state component, or nullopt when the endpoint is free.
  std::vector<std::optional<double>> terminal_state;
  /// Interpreted as g(t, x, u) <= 0.
  std::vector<Expr> path_constraints;
  std::vector<double> control_lo;
  std::vector<double> control_hi;
  std::vector<Objective> objectives;

  bool free_horizon() const { return std::holds_alternative<FreeHorizon>(horizon); }
  std::size_t objective_count() const { return objectives.size(); }
};

/// Point in criterion space.
struct ObjectiveVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

struct Residuals {
  /// max |x_i(T) - beta_i| over pinned components.
  double terminal = 0.0;
  /// max over evaluation points of max(0, g_i) and control-bound excess.
  double path = 0.0;
  /// Sum of squared terminal errors.
  double terminal_sq = 0.0;
  /// Sum of squared path violations over all evaluation points.
  double path_sq = 0.0;
};

/// One admissible pair (x, u) on a time grid.
struct Solution {
  std::vector<double> grid;                   // K+1 points over [t0, T]
  std::vector<std::vector<double>> controls;  // [r][K]
  double T = 0.0;
  std::vector<std::vector<double>> states;  // [n][K+1]
  ObjectiveVector objectives;
  Residuals residuals;

  std::size_t intervals() const { return grid.empty() ? 0 : grid.size() - 1; }
};

/// Every violated structural invariant; empty when the spec is well formed.
std::vector<std::string> validate(const ProblemSpec& spec);

/// Throws ValidationError unless validate(spec) is empty.
void require_valid(const ProblemSpec& spec);

}  // namespace nonessential
