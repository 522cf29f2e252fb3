#include "nonessential/transcribe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nonessential/error.hpp"

namespace nonessential {

namespace {

constexpr double kAbsSmoothing = 1e-6;

}  // namespace

DecisionVector DecisionVector::constant(const ProblemSpec& spec, int K, std::span<const double> u,
                                        std::optional<double> T) {
  DecisionVector d;
  d.controls.resize(static_cast<std::size_t>(spec.r));
  for (std::size_t c = 0; c < d.controls.size(); ++c)
    d.controls[c].assign(static_cast<std::size_t>(K), c < u.size() ? u[c] : 0.0);
  d.T = T;
  return d;
}

Transcription::Transcription(const ProblemSpec& spec, int K)
    : spec_(spec),
      K_(K),
      n_(static_cast<std::size_t>(spec.n)),
      r_(static_cast<std::size_t>(spec.r)),
      N_(spec.objectives.size()),
      free_(spec.free_horizon()) {
  if (K < 2) throw Error("transcription needs K >= 2 intervals");
  size_ = r_ * static_cast<std::size_t>(K_) + (free_ ? 1 : 0);
  integrands_.reserve(N_);
  for (const auto& obj : spec.objectives) {
    if (!obj.integrand)
      integrands_.emplace_back(std::nullopt);
    else
      integrands_.emplace_back(obj.smooth_abs ? obj.integrand->with_smoothed_abs(kAbsSmoothing) : *obj.integrand);
  }
}

std::vector<double> Transcription::lower() const {
  std::vector<double> lo(size_);
  for (std::size_t c = 0; c < r_; ++c)
    std::fill_n(lo.begin() + static_cast<std::ptrdiff_t>(c * K_), K_, spec_.control_lo[c]);
  if (free_) lo.back() = std::get<FreeHorizon>(spec_.horizon).Tmin;
  return lo;
}

std::vector<double> Transcription::upper() const {
  std::vector<double> hi(size_);
  for (std::size_t c = 0; c < r_; ++c)
    std::fill_n(hi.begin() + static_cast<std::ptrdiff_t>(c * K_), K_, spec_.control_hi[c]);
  if (free_) hi.back() = std::get<FreeHorizon>(spec_.horizon).Tmax;
  return hi;
}

std::vector<double> Transcription::flatten(const DecisionVector& d) const {
  if (d.controls.size() != r_) throw Error("decision vector has the wrong number of control channels");
  std::vector<double> flat;
  flat.reserve(size_);
  for (const auto& channel : d.controls) {
    if (channel.size() != static_cast<std::size_t>(K_)) throw Error("decision vector has the wrong grid size");
    flat.insert(flat.end(), channel.begin(), channel.end());
  }
  if (free_) {
    if (!d.T) throw Error("free horizon requires T in the decision vector");
    flat.push_back(*d.T);
  }
  return flat;
}

DecisionVector Transcription::unflatten(std::span<const double> flat) const {
  DecisionVector d;
  d.controls.resize(r_);
  for (std::size_t c = 0; c < r_; ++c)
    d.controls[c].assign(flat.begin() + static_cast<std::ptrdiff_t>(c * K_),
                         flat.begin() + static_cast<std::ptrdiff_t>((c + 1) * K_));
  if (free_) d.T = flat.back();
  return d;
}

double Transcription::final_time(std::span<const double> flat) const {
  if (free_) return flat.back();
  return std::get<FixedHorizon>(spec_.horizon).T;
}

Transcription::Outcome Transcription::evaluate(std::span<const double> flat, Trace* record) const {
  if (flat.size() != size_) throw Error("decision vector has the wrong size");
  return run(flat, 0, nullptr, record, nullptr);
}

Transcription::Outcome Transcription::resume(const Trace& base, std::size_t interval,
                                             std::span<const double> flat) const {
  if (flat.size() != size_) throw Error("decision vector has the wrong size");
  return run(flat, std::min(interval, static_cast<std::size_t>(K_)), &base, nullptr, nullptr);
}

Solution Transcription::solution(std::span<const double> flat) const {
  if (flat.size() != size_) throw Error("decision vector has the wrong size");
  Solution sol;
  run(flat, 0, nullptr, nullptr, &sol);
  return sol;
}

Transcription::Outcome Transcription::run(std::span<const double> flat, std::size_t first, const Trace* base,
                                          Trace* record, Solution* out) const {
  const std::size_t K = static_cast<std::size_t>(K_);
  const double T = final_time(flat);
  const double span = T - spec_.t0;
  const double h = span / static_cast<double>(K);
  const auto time_at = [&](std::size_t k) {
    return spec_.t0 + span * (static_cast<double>(k) / static_cast<double>(K));
  };

  std::vector<double> x(n_), k1(n_), k2(n_), k3(n_), k4(n_), tmp(n_), u(r_);
  std::vector<double> acc(N_, 0.0);
  double path_max = 0.0;
  double path_sq = 0.0;

  if (base) {
    std::copy_n(base->states.begin() + static_cast<std::ptrdiff_t>(first * n_), n_, x.begin());
    std::copy_n(base->integrals.begin() + static_cast<std::ptrdiff_t>(first * N_), N_, acc.begin());
    path_max = base->path_max[first];
    path_sq = base->path_sq[first];
  } else {
    x = spec_.initial_state;
  }

  if (record) {
    record->states.assign((K + 1) * n_, 0.0);
    record->integrals.assign((K + 1) * N_, 0.0);
    record->path_max.assign(K + 1, 0.0);
    record->path_sq.assign(K + 1, 0.0);
  }
  if (out) {
    out->grid.resize(K + 1);
    out->controls.assign(r_, std::vector<double>(K));
    out->states.assign(n_, std::vector<double>(K + 1));
    out->T = T;
    for (std::size_t k = 0; k <= K; ++k) out->grid[k] = time_at(k);
  }

  const auto rhs = [&](double t, const std::vector<double>& state, std::vector<double>& dx) {
    const EvalContext ctx{t, state, u, {}};
    for (std::size_t i = 0; i < n_; ++i) dx[i] = spec_.dynamics[i].eval(ctx);
  };
  const auto snapshot = [&](std::size_t k) {
    if (record) {
      std::copy(x.begin(), x.end(), record->states.begin() + static_cast<std::ptrdiff_t>(k * n_));
      std::copy(acc.begin(), acc.end(), record->integrals.begin() + static_cast<std::ptrdiff_t>(k * N_));
      record->path_max[k] = path_max;
      record->path_sq[k] = path_sq;
    }
    if (out)
      for (std::size_t i = 0; i < n_; ++i) out->states[i][k] = x[i];
  };
  const auto constrain = [&](double t, const std::vector<double>& state) {
    const EvalContext ctx{t, state, u, {}};
    for (const auto& g : spec_.path_constraints) {
      const double v = std::max(0.0, g.eval(ctx));
      path_max = std::max(path_max, v);
      path_sq += v * v;
    }
  };

  snapshot(first);
  for (std::size_t k = first; k < K; ++k) {
    for (std::size_t c = 0; c < r_; ++c) {
      u[c] = flat[c * K + k];
      const double excess = std::max({0.0, u[c] - spec_.control_hi[c], spec_.control_lo[c] - u[c]});
      path_max = std::max(path_max, excess);
      path_sq += excess * excess;
      if (out) out->controls[c][k] = u[c];
    }
    const double t = time_at(k);
    const double t1 = time_at(k + 1);

    {
      const EvalContext ctx{t, x, u, {}};
      for (std::size_t j = 0; j < N_; ++j)
        if (integrands_[j]) acc[j] += 0.5 * h * integrands_[j]->eval(ctx);
    }
    constrain(t, x);

    rhs(t, x, k1);
    for (std::size_t i = 0; i < n_; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n_; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n_; ++i) tmp[i] = x[i] + h * k3[i];
    rhs(t1, tmp, k4);
    for (std::size_t i = 0; i < n_; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(x[i])) throw EvalError("state diverged (non-finite x" + std::to_string(i + 1) + ")");
    }

    {
      const EvalContext ctx{t1, x, u, {}};
      for (std::size_t j = 0; j < N_; ++j)
        if (integrands_[j]) acc[j] += 0.5 * h * integrands_[j]->eval(ctx);
    }
    constrain(t1, x);
    snapshot(k + 1);
  }

  Outcome result;
  for (std::size_t i = 0; i < n_; ++i) {
    if (!spec_.terminal_state[i]) continue;
    const double e = x[i] - *spec_.terminal_state[i];
    result.residuals.terminal = std::max(result.residuals.terminal, std::fabs(e));
    result.residuals.terminal_sq += e * e;
  }
  result.residuals.path = path_max;
  result.residuals.path_sq = path_sq;

  result.objectives.values = acc;
  for (std::size_t j = 0; j < N_; ++j) {
    if (integrands_[j]) continue;
    const EvalContext ctx{0.0, {}, {}, acc};
    result.objectives.values[j] = spec_.objectives[j].composition->eval(ctx);
  }
  for (double v : result.objectives.values)
    if (!std::isfinite(v)) throw EvalError("objective value is not finite");

  if (out) {
    out->objectives = result.objectives;
    out->residuals = result.residuals;
  }
  return result;
}

Solution simulate(const ProblemSpec& spec, const DecisionVector& d, int K) {
  const Transcription tr(spec, K);
  return tr.solution(tr.flatten(d));
}

bool check_feasible(const Solution& sol, double tol_terminal, double tol_path) {
  return sol.residuals.terminal <= tol_terminal && sol.residuals.path <= tol_path;
}

double penalized_objective(const ProblemSpec& spec, const DecisionVector& d, int K, std::size_t objective,
                           double mu) {
  if (!(mu > 0.0)) throw Error("penalty weight must be positive");
  const Transcription tr(spec, K);
  const auto out = tr.evaluate(tr.flatten(d));
  if (objective >= out.objectives.size()) throw Error("objective index out of range");
  return out.objectives[objective] + mu * (out.residuals.terminal_sq + out.residuals.path_sq);
}

}  // namespace nonessential
