#include "nonessential/problem.hpp"

#include <cmath>

#include "nonessential/error.hpp"

namespace nonessential {

namespace {

void check_variables(const Expr& e, const ProblemSpec& spec, const std::string& where, bool allow_criteria,
                     std::vector<std::string>& out) {
  if (e.max_index(VarKind::State) > spec.n)
    out.push_back(where + ": unknown variable x" + std::to_string(e.max_index(VarKind::State)) +
                  " (n = " + std::to_string(spec.n) + ")");
  if (e.max_index(VarKind::Control) > spec.r)
    out.push_back(where + ": unknown variable u" + std::to_string(e.max_index(VarKind::Control)) +
                  " (r = " + std::to_string(spec.r) + ")");
  if (!allow_criteria && e.references(VarKind::Criterion))
    out.push_back(where + ": criterion variables y1..yN are only allowed in composition tags");
}

}  // namespace

std::vector<std::string> validate(const ProblemSpec& spec) {
  std::vector<std::string> errors;
  if (spec.n < 1) errors.push_back("n must be positive");
  if (spec.r < 1) errors.push_back("r must be positive");
  if (spec.r > spec.n) errors.push_back("r <= n violated");
  const auto n = static_cast<std::size_t>(std::max(spec.n, 0));
  const auto r = static_cast<std::size_t>(std::max(spec.r, 0));

  if (spec.dynamics.size() != n)
    errors.push_back("expected " + std::to_string(n) + " dynamics expressions, got " +
                     std::to_string(spec.dynamics.size()));
  if (spec.initial_state.size() != n) errors.push_back("initial_state must have n entries");
  if (spec.terminal_state.size() != n) errors.push_back("terminal_state must have n entries");
  if (spec.control_lo.size() != r || spec.control_hi.size() != r)
    errors.push_back("control_bounds must have r entries");
  for (std::size_t j = 0; j < std::min(spec.control_lo.size(), spec.control_hi.size()); ++j)
    if (!(spec.control_lo[j] <= spec.control_hi[j]))
      errors.push_back("control_bounds: lower > upper for u" + std::to_string(j + 1));

  for (double v : spec.initial_state)
    if (!std::isfinite(v)) errors.push_back("initial_state entries must be finite");
  for (const auto& v : spec.terminal_state)
    if (v && !std::isfinite(*v)) errors.push_back("pinned terminal_state entries must be finite");

  if (!std::isfinite(spec.t0)) errors.push_back("t0 must be finite");
  if (const auto* fixed = std::get_if<FixedHorizon>(&spec.horizon)) {
    if (!(fixed->T > spec.t0) || !std::isfinite(fixed->T)) errors.push_back("fixed horizon requires T > t0");
  } else {
    const auto& free = std::get<FreeHorizon>(spec.horizon);
    if (!(free.Tmin > 0.0 && free.Tmin <= free.Tmax) || !std::isfinite(free.Tmax))
      errors.push_back("free horizon requires 0 < Tmin <= Tmax");
    else if (!(free.Tmin > spec.t0))
      errors.push_back("free horizon requires Tmin > t0");
  }

  for (std::size_t i = 0; i < spec.dynamics.size(); ++i)
    check_variables(spec.dynamics[i], spec, "dynamics[" + std::to_string(i + 1) + "]", false, errors);
  for (std::size_t i = 0; i < spec.path_constraints.size(); ++i)
    check_variables(spec.path_constraints[i], spec, "path_constraints[" + std::to_string(i + 1) + "]", false,
                    errors);

  if (spec.objectives.empty()) errors.push_back("N >= 1 objectives required");
  const int N = static_cast<int>(spec.objectives.size());
  for (int i = 0; i < N; ++i) {
    const auto& obj = spec.objectives[static_cast<std::size_t>(i)];
    const std::string where = "objectives[" + std::to_string(i + 1) + "]";
    if (!obj.integrand && !obj.composition) errors.push_back(where + ": needs an integrand or a composition");
    if (obj.integrand) check_variables(*obj.integrand, spec, where, false, errors);
    if (obj.composition) {
      const Expr& phi = *obj.composition;
      if (phi.references(VarKind::State) || phi.references(VarKind::Control) || phi.references(VarKind::Time))
        errors.push_back(where + ": composition may only reference y1..yN");
      if (phi.max_index(VarKind::Criterion) > N)
        errors.push_back(where + ": unknown variable y" + std::to_string(phi.max_index(VarKind::Criterion)));
      if (!obj.integrand) {
        // A derived objective is evaluated from integral objectives only.
        for (int j = 0; j < N; ++j)
          if (phi.references(VarKind::Criterion, j + 1) && spec.objectives[static_cast<std::size_t>(j)].is_derived())
            errors.push_back(where + ": composition references derived objective y" + std::to_string(j + 1));
      }
    }
  }
  return errors;
}

void require_valid(const ProblemSpec& spec) {
  auto errors = validate(spec);
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

}  // namespace nonessential
