#include "nonessential/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "nonessential/error.hpp"
#include "nonessential/parallel.hpp"
#include "nonessential/transcribe.hpp"

namespace nonessential {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Result of one local search.
struct Candidate {
  bool found = false;
  std::vector<double> flat;
  ObjectiveVector objectives;
  double value = kInf;
  int switches = 0;
  bool converged = false;
  std::optional<SwitchStructure> structure;
};

struct JobResult {
  std::vector<Candidate> candidates;
  std::size_t evaluations = 0;
};

class Merit {
 public:
  Merit(const Transcription& tr, const Scalarization& s, const SolverConfig& cfg) : tr_(tr), s_(s), cfg_(cfg) {}

  double penalized(const Transcription::Outcome& out, double mu) const {
    const auto& r = out.residuals;
    return s_.value(out.objectives) + mu * (r.terminal_sq + r.path_sq + s_.bound_violation_sq(out.objectives));
  }

  bool feasible(const Transcription::Outcome& out) const {
    return out.residuals.terminal <= cfg_.tol_terminal && out.residuals.path <= cfg_.tol_path &&
           s_.within_bounds(out.objectives, cfg_.tol_bound);
  }

  double operator()(std::span<const double> flat, double mu, Transcription::Trace* trace = nullptr) {
    ++count;
    try {
      return penalized(tr_.evaluate(flat, trace), mu);
    } catch (const EvalError&) {
      return kInf;
    }
  }

  double resumed(const Transcription::Trace& trace, std::size_t interval, std::span<const double> flat, double mu) {
    ++count;
    try {
      return penalized(tr_.resume(trace, interval, flat), mu);
    } catch (const EvalError&) {
      return kInf;
    }
  }

  // Candidate for `flat` if it is feasible.
  Candidate accept(std::span<const double> flat) {
    Candidate c;
    ++count;
    try {
      const auto out = tr_.evaluate(flat);
      if (!feasible(out)) return c;
      c.found = true;
      c.flat.assign(flat.begin(), flat.end());
      c.value = s_.value(out.objectives);
      c.objectives = out.objectives;
    } catch (const EvalError&) {
    }
    return c;
  }

  std::size_t count = 0;

 private:
  const Transcription& tr_;
  const Scalarization& s_;
  const SolverConfig& cfg_;
};

std::mt19937_64 job_rng(std::uint64_t seed, std::uint64_t job) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(job), static_cast<std::uint32_t>(job >> 32)};
  return std::mt19937_64(seq);
}

// Sampling interval for a possibly unbounded coordinate.
std::pair<double, double> sampling_range(double lo, double hi) {
  if (std::isfinite(lo) && std::isfinite(hi)) return {lo, hi};
  if (std::isfinite(lo)) return {lo, lo + 2.0};
  if (std::isfinite(hi)) return {hi - 2.0, hi};
  return {-1.0, 1.0};
}

// ---------------------------------------------------------------------------
// Gradient backend

Candidate gradient_start(const Transcription& tr, const Scalarization& s, const SolverConfig& cfg,
                         std::size_t start, std::size_t& evaluations) {
  Merit merit(tr, s, cfg);
  const std::size_t size = tr.size();
  const std::size_t K = static_cast<std::size_t>(tr.K());
  const std::size_t controls = size - (tr.free_horizon() ? 1 : 0);
  const auto lo = tr.lower();
  const auto hi = tr.upper();

  auto rng = job_rng(cfg.seed, start);
  std::vector<double> x(size);
  for (std::size_t j = 0; j < size; ++j) {
    const auto [a, b] = sampling_range(lo[j], hi[j]);
    x[j] = std::uniform_real_distribution<double>(a, b)(rng);
  }

  // Control entries act like samples of a function of normalized time, so
  // their gradient is rescaled by K to approximate the L2 gradient.
  std::vector<double> scale(size, static_cast<double>(K));
  if (tr.free_horizon()) scale.back() = 1.0;

  const auto project = [&](std::vector<double>& v) {
    for (std::size_t j = 0; j < size; ++j) v[j] = std::clamp(v[j], lo[j], hi[j]);
  };

  const auto gradient = [&](const std::vector<double>& at, const Transcription::Trace& trace, double mu,
                            std::vector<double>& g) {
    std::vector<double> probe = at;
    for (std::size_t j = 0; j < size; ++j) {
      const double h = 1e-6 * (1.0 + std::fabs(at[j]));
      double fp, fm;
      probe[j] = at[j] + h;
      if (j < controls) {
        const std::size_t interval = j % K;
        fp = merit.resumed(trace, interval, probe, mu);
        probe[j] = at[j] - h;
        fm = merit.resumed(trace, interval, probe, mu);
      } else {
        fp = merit(probe, mu);
        probe[j] = at[j] - h;
        fm = merit(probe, mu);
      }
      probe[j] = at[j];
      g[j] = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * h) : 0.0;
    }
  };

  Candidate kept;
  double mu = cfg.penalty.mu0;
  std::vector<double> g(size), gn(size), xn(size);
  Transcription::Trace trace, trace_n;
  const int last = cfg.penalty.rounds + cfg.penalty.extra_rounds;
  for (int round = 0; round < last; ++round, mu *= cfg.penalty.growth) {
    if (round >= cfg.penalty.rounds && kept.found && kept.flat == x) break;
    double f = merit(x, mu, &trace);
    if (!std::isfinite(f)) break;
    gradient(x, trace, mu, g);
    double gmax = 0.0;
    for (std::size_t j = 0; j < size; ++j) gmax = std::max(gmax, std::fabs(scale[j] * g[j]));
    double alpha = gmax > 0.0 ? 0.1 / gmax : 1.0;
    bool converged = false;
    for (int it = 0; it < cfg.max_iterations && !converged; ++it) {
      bool accepted = false;
      for (int bt = 0; bt < cfg.step.max_steps; ++bt, alpha *= cfg.step.shrink) {
        double slope = 0.0, moved = 0.0;
        for (std::size_t j = 0; j < size; ++j) {
          xn[j] = x[j] - alpha * scale[j] * g[j];
        }
        project(xn);
        for (std::size_t j = 0; j < size; ++j) {
          slope += g[j] * (xn[j] - x[j]);
          moved = std::max(moved, std::fabs(xn[j] - x[j]));
        }
        if (moved < cfg.tol_step) {
          converged = true;
          break;
        }
        const double fn = merit(xn, mu, &trace_n);
        if (fn <= f + cfg.step.armijo * slope) {
          accepted = true;
          // Barzilai-Borwein step in the scaled metric.
          gradient(xn, trace_n, mu, gn);
          double ss = 0.0, sy = 0.0;
          for (std::size_t j = 0; j < size; ++j) {
            const double sj = xn[j] - x[j];
            ss += sj * sj / scale[j];
            sy += sj * (gn[j] - g[j]);
          }
          alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e6) : std::min(alpha * 4.0, 1e6);
          std::swap(x, xn);
          std::swap(g, gn);
          std::swap(trace, trace_n);
          f = fn;
          break;
        }
      }
      if (!accepted) converged = true;  // no descent left at this precision
    }
    Candidate c = merit.accept(x);
    if (c.found) {
      c.converged = converged;
      kept = std::move(c);
    }
  }
  evaluations += merit.count;
  return kept;
}

// ---------------------------------------------------------------------------
// Switch-time backend

// Piecewise-constant profile per channel, parameterized by switch fractions of
// the horizon and, when free, the horizon itself.
struct Shape {
  std::vector<std::vector<double>> levels;  // per channel

  std::size_t switches() const {
    std::size_t s = 0;
    for (const auto& l : levels) s += l.size() - 1;
    return s;
  }
};

std::vector<Shape> enumerate_shapes(const ProblemSpec& spec, int max_switches) {
  std::vector<std::vector<std::vector<double>>> per_channel(static_cast<std::size_t>(spec.r));
  for (std::size_t c = 0; c < per_channel.size(); ++c) {
    const double lo = spec.control_lo[c], hi = spec.control_hi[c];
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw Error("switchtime backend needs finite control bounds");
    std::vector<double> alphabet{lo};
    bool off = false;
    for (const auto& obj : spec.objectives)
      if (obj.integrand && obj.integrand->has_abs_of_control(static_cast<int>(c) + 1)) off = true;
    if (off && lo < 0.0 && hi > 0.0) alphabet.push_back(0.0);
    if (hi != lo) alphabet.push_back(hi);

    std::vector<std::vector<double>> seqs;
    std::vector<std::vector<double>> layer;
    for (double a : alphabet) layer.push_back({a});
    for (int len = 1; len <= max_switches + 1 && !layer.empty(); ++len) {
      seqs.insert(seqs.end(), layer.begin(), layer.end());
      std::vector<std::vector<double>> next;
      for (const auto& s : layer)
        for (double a : alphabet)
          if (a != s.back()) {
            next.push_back(s);
            next.back().push_back(a);
          }
      layer = std::move(next);
    }
    per_channel[c] = std::move(seqs);
  }

  std::vector<Shape> shapes(1);
  for (const auto& options : per_channel) {
    std::vector<Shape> grown;
    for (const auto& base : shapes)
      for (const auto& seq : options) {
        grown.push_back(base);
        grown.back().levels.push_back(seq);
      }
    shapes = std::move(grown);
  }
  std::stable_sort(shapes.begin(), shapes.end(),
                   [](const Shape& a, const Shape& b) { return a.switches() < b.switches(); });
  return shapes;
}

class ShapeMap {
 public:
  ShapeMap(const Transcription& tr, const Shape& shape) : tr_(tr), shape_(shape) {
    dims_ = shape.switches() + (tr.free_horizon() ? 1 : 0);
  }

  std::size_t dims() const { return dims_; }

  void flat(std::span<const double> v, std::vector<double>& out) const {
    const std::size_t K = static_cast<std::size_t>(tr_.K());
    out.resize(tr_.size());
    std::size_t offset = 0;
    std::vector<double> bounds;
    for (std::size_t c = 0; c < shape_.levels.size(); ++c) {
      const auto& levels = shape_.levels[c];
      const std::size_t s = levels.size() - 1;
      bounds.assign(v.begin() + static_cast<std::ptrdiff_t>(offset),
                    v.begin() + static_cast<std::ptrdiff_t>(offset + s));
      std::sort(bounds.begin(), bounds.end());
      bounds.push_back(1.0);
      offset += s;
      // Interval average of the profile, so values move continuously with the switches.
      std::size_t seg = 0;
      for (std::size_t k = 0; k < K; ++k) {
        const double a = static_cast<double>(k) / static_cast<double>(K);
        const double b = static_cast<double>(k + 1) / static_cast<double>(K);
        while (bounds[seg] <= a && seg + 1 < bounds.size()) ++seg;
        if (bounds[seg] >= b) {
          out[c * K + k] = levels[seg];
          continue;
        }
        double acc = 0.0, left = a;
        std::size_t j = seg;
        while (true) {
          const double right = std::min(b, bounds[j]);
          if (right > left) acc += levels[j] * (right - left);
          left = std::max(left, right);
          if (bounds[j] >= b || j + 1 >= bounds.size()) break;
          ++j;
        }
        out[c * K + k] = acc * static_cast<double>(K);
      }
    }
    if (tr_.free_horizon()) {
      const auto& h = std::get<FreeHorizon>(tr_.spec().horizon);
      out.back() = h.Tmin + std::clamp(v.back(), 0.0, 1.0) * (h.Tmax - h.Tmin);
    }
  }

  SwitchStructure structure(std::span<const double> v) const {
    SwitchStructure st;
    const double t0 = tr_.spec().t0;
    std::vector<double> flat_v;
    double T = 0.0;
    if (tr_.free_horizon()) {
      const auto& h = std::get<FreeHorizon>(tr_.spec().horizon);
      T = h.Tmin + std::clamp(v.back(), 0.0, 1.0) * (h.Tmax - h.Tmin);
    } else {
      T = std::get<FixedHorizon>(tr_.spec().horizon).T;
    }
    std::size_t offset = 0;
    for (const auto& levels : shape_.levels) {
      const std::size_t s = levels.size() - 1;
      std::vector<double> z(v.begin() + static_cast<std::ptrdiff_t>(offset),
                            v.begin() + static_cast<std::ptrdiff_t>(offset + s));
      std::sort(z.begin(), z.end());
      for (double& t : z) t = t0 + t * (T - t0);
      offset += s;
      st.levels.push_back(levels);
      st.switch_times.push_back(std::move(z));
    }
    return st;
  }

 private:
  const Transcription& tr_;
  const Shape& shape_;
  std::size_t dims_;
};

// Brent's minimizer on [a, b] starting from the sample (x, fx).
std::pair<double, double> brent(const std::function<double(double)>& f, double a, double b, double x, double fx) {
  constexpr double kGold = 0.3819660112501051;
  constexpr double kTol = 1e-9;
  double v = x, w = x, fv = fx, fw = fx, d = 0.0, e = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = kTol * std::fabs(x) + 1e-11;
    const double tol2 = 2.0 * tol1;
    if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool golden = true;
    if (std::fabs(e) > tol1 && std::isfinite(fx) && std::isfinite(fv) && std::isfinite(fw)) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      const double etemp = e;
      e = d;
      if (!(std::fabs(p) >= std::fabs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
        golden = false;
      }
    }
    if (golden) {
      e = (x >= xm) ? a - x : b - x;
      d = kGold * e;
    }
    const double u = std::fabs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
    const double fu = f(u);
    if (fu <= fx) {
      (u >= x ? a : b) = x;
      v = w, fv = fw;
      w = x, fw = fx;
      x = u, fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w, fv = fw;
        w = u, fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u, fv = fu;
      }
    }
  }
  return {x, fx};
}

// Minimizes f along direction d (unit length) inside the unit box. `window`
// limits the step; the range is scanned before Brent refines the best bracket.
double line_minimize(const std::function<double(std::span<const double>)>& f, std::vector<double>& x, double fx,
                     const std::vector<double>& d, double window, int samples) {
  double amin = -window, amax = window;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (d[j] > 0.0) {
      amin = std::max(amin, -x[j] / d[j]);
      amax = std::min(amax, (1.0 - x[j]) / d[j]);
    } else if (d[j] < 0.0) {
      amin = std::max(amin, (1.0 - x[j]) / d[j]);
      amax = std::min(amax, -x[j] / d[j]);
    }
  }
  if (!(amax > amin)) return fx;

  std::vector<double> point(x.size());
  const auto along = [&](double a) {
    for (std::size_t j = 0; j < x.size(); ++j) point[j] = std::clamp(x[j] + a * d[j], 0.0, 1.0);
    return f(point);
  };

  std::vector<std::pair<double, double>> scan{{0.0, fx}};
  for (int i = 0; i <= samples; ++i) {
    const double a = amin + (amax - amin) * static_cast<double>(i) / static_cast<double>(samples);
    if (a != 0.0) scan.emplace_back(a, along(a));
  }
  std::sort(scan.begin(), scan.end());
  std::size_t best = 0;
  for (std::size_t i = 1; i < scan.size(); ++i)
    if (scan[i].second < scan[best].second) best = i;
  const double lo = scan[best > 0 ? best - 1 : 0].first;
  const double hi = scan[std::min(best + 1, scan.size() - 1)].first;
  auto [a, fa] = brent(along, lo, hi, scan[best].first, scan[best].second);
  if (!(fa < fx)) return fx;
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j] + a * d[j], 0.0, 1.0);
  return fa;
}

// Powell's conjugate direction method in the unit box. Returns true when the
// relative decrease fell below tolerance before the iteration cap. Directions
// can collapse against the box faces, so a stall with updated directions resets
// to the coordinate axes and only a stalled axis sweep counts as converged.
bool powell(const std::function<double(std::span<const double>)>& f, std::vector<double>& x, double& fx,
            bool global, int max_iterations) {
  const std::size_t m = x.size();
  std::vector<std::vector<double>> dirs;
  bool axes = false;
  const auto reset = [&] {
    dirs.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) dirs[i][i] = 1.0;
    axes = true;
  };
  reset();
  const double window = global ? 2.0 : 0.05;
  const int samples = global ? 8 : 4;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const std::vector<double> start = x;
    const double fstart = fx;
    double biggest = 0.0;
    std::size_t ibig = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double before = fx;
      fx = line_minimize(f, x, fx, dirs[i], window, samples);
      if (before - fx > biggest) {
        biggest = before - fx;
        ibig = i;
      }
    }
    if (2.0 * (fstart - fx) <= 1e-12 * (std::fabs(fstart) + std::fabs(fx)) + 1e-15) {
      if (axes) return true;
      reset();
      continue;
    }
    std::vector<double> dnew(m);
    double norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      dnew[j] = x[j] - start[j];
      norm += dnew[j] * dnew[j];
    }
    norm = std::sqrt(norm);
    if (m > 1 && norm > 0.0) {
      for (double& v : dnew) v /= norm;
      fx = line_minimize(f, x, fx, dnew, window, samples);
      dirs[ibig] = dirs.back();
      dirs.back() = dnew;
      axes = false;
    }
  }
  return false;
}

constexpr int kRefinedPerShape = 2;

JobResult switch_shape(const Transcription& tr, const Scalarization& s, const SolverConfig& cfg, const Shape& shape,
                       std::size_t job) {
  JobResult out;
  Merit merit(tr, s, cfg);
  const ShapeMap map(tr, shape);
  const std::size_t m = map.dims();
  std::vector<double> flat;
  double mu = cfg.penalty.mu0;
  const std::function<double(std::span<const double>)> f = [&](std::span<const double> v) {
    map.flat(v, flat);
    return merit(flat, mu);
  };

  // Screen: centre point plus `starts` uniform samples at the first penalty level.
  auto rng = job_rng(cfg.seed, job);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, std::vector<double>>> pool;
  const int samples = m == 0 ? 0 : cfg.starts;
  pool.emplace_back(0.0, std::vector<double>(m, 0.5));
  for (int i = 0; i < samples; ++i) {
    std::vector<double> v(m);
    for (double& z : v) z = unit(rng);
    pool.emplace_back(0.0, std::move(v));
  }
  for (auto& [fv, v] : pool) fv = f(v);
  std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t refine = std::min<std::size_t>(m == 0 ? 1 : kRefinedPerShape, pool.size());
  for (std::size_t p = 0; p < refine; ++p) {
    std::vector<double> v = pool[p].second;
    Candidate kept;
    mu = cfg.penalty.mu0;
    bool feasible = false;
    const int last = cfg.penalty.rounds + cfg.penalty.extra_rounds;
    for (int round = 0; round < last; ++round, mu *= cfg.penalty.growth) {
      if (round >= cfg.penalty.rounds && feasible) break;
      double fv = f(v);
      const bool converged = m == 0 || powell(f, v, fv, round == 0, cfg.max_iterations);
      map.flat(v, flat);
      Candidate c = merit.accept(flat);
      feasible = c.found;
      if (c.found) {
        c.converged = converged;
        c.switches = static_cast<int>(shape.switches());
        c.structure = map.structure(v);
        kept = std::move(c);
      }
    }
    if (kept.found) out.candidates.push_back(std::move(kept));
  }
  out.evaluations = merit.count;
  return out;
}

// ---------------------------------------------------------------------------

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void SolverConfig::validate() const {
  if (K < 2) throw Error("solver: K must be at least 2");
  if (starts < 1) throw Error("solver: starts must be at least 1");
  if (max_switches < 0) throw Error("solver: max_switches must be non-negative");
  if (max_iterations < 1) throw Error("solver: max_iterations must be at least 1");
  if (!(tol_terminal > 0.0) || !(tol_path > 0.0) || !(tol_step > 0.0) || !(tol_opt > 0.0))
    throw Error("solver: tolerances must be positive");
  if (!(tol_bound > 0.0)) throw Error("solver: tolerances must be positive");
  if (!(penalty.mu0 > 0.0) || !(penalty.growth >= 1.0) || penalty.rounds < 1 || penalty.extra_rounds < 0)
    throw Error("solver: invalid penalty schedule");
  if (!(step.shrink > 0.0 && step.shrink < 1.0) || !(step.armijo > 0.0 && step.armijo < 1.0) ||
      step.max_steps < 1)
    throw Error("solver: invalid backtracking parameters");
}

Scalarization Scalarization::single(std::size_t N, std::size_t i) {
  if (i >= N) throw Error("objective index out of range");
  Scalarization s;
  s.weights.assign(N, 0.0);
  s.weights[i] = 1.0;
  s.upper_bounds.assign(N, kInf);
  return s;
}

Scalarization Scalarization::weighted(std::span<const double> gamma) {
  double sum = 0.0;
  for (double g : gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw Error("weights must be finite and non-negative");
    sum += g;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw Error("weights must sum to 1");
  Scalarization s;
  s.weights.assign(gamma.begin(), gamma.end());
  s.upper_bounds.assign(gamma.size(), kInf);
  return s;
}

Scalarization Scalarization::eps_constrained(std::size_t i, std::span<const double> bounds) {
  if (i >= bounds.size()) throw Error("objective index out of range");
  if (bounds[i] != kInf) throw Error("the minimized objective must be unbounded");
  Scalarization s = single(bounds.size(), i);
  s.upper_bounds.assign(bounds.begin(), bounds.end());
  return s;
}

double Scalarization::value(const ObjectiveVector& v) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0) sum += weights[i] * v[i];
  return sum;
}

double Scalarization::bound_violation_sq(const ObjectiveVector& v) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < upper_bounds.size(); ++i) {
    const double e = std::max(0.0, v[i] - upper_bounds[i]);
    sum += e * e;
  }
  return sum;
}

bool Scalarization::within_bounds(const ObjectiveVector& v, double tol) const {
  for (std::size_t i = 0; i < upper_bounds.size(); ++i)
    if (v[i] > upper_bounds[i] + tol * (1.0 + std::fabs(upper_bounds[i]))) return false;
  return true;
}

std::size_t Scalarization::positive_weights() const {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

int SwitchStructure::switches() const {
  int s = 0;
  for (const auto& l : levels) s += static_cast<int>(l.size()) - 1;
  return s;
}

bool distinct_controls(const ProblemSpec& spec, const Solution& a, const Solution& b) {
  for (std::size_t c = 0; c < a.controls.size() && c < b.controls.size(); ++c) {
    const double range = spec.control_hi[c] - spec.control_lo[c];
    const double threshold = 0.05 * (std::isfinite(range) ? range : 1.0);
    const auto& ua = a.controls[c];
    const auto& ub = b.controls[c];
    if (ua.size() != ub.size()) return true;
    for (std::size_t k = 0; k < ua.size(); ++k)
      if (std::fabs(ua[k] - ub[k]) > threshold) return true;
  }
  return false;
}

ScalarResult minimize(const ProblemSpec& spec, const Scalarization& s, const SolverConfig& cfg) {
  require_valid(spec);
  cfg.validate();
  const std::size_t N = spec.objective_count();
  if (s.weights.size() != N || s.upper_bounds.size() != N)
    throw Error("scalarization does not match the number of objectives");

  const Transcription tr(spec, cfg.K);
  const std::size_t threads = worker_count(cfg.threads);

  std::vector<JobResult> jobs;
  if (cfg.backend == Backend::Gradient) {
    jobs.resize(static_cast<std::size_t>(cfg.starts));
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
      Candidate c = gradient_start(tr, s, cfg, i, jobs[i].evaluations);
      if (c.found) jobs[i].candidates.push_back(std::move(c));
    });
  } else {
    const auto shapes = enumerate_shapes(spec, cfg.max_switches);
    jobs.resize(shapes.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) { jobs[i] = switch_shape(tr, s, cfg, shapes[i], i); });
  }

  ScalarResult result;
  std::vector<Candidate> all;
  for (auto& job : jobs) {
    result.evaluations += job.evaluations;
    for (auto& c : job.candidates) {
      result.candidates.push_back(c.objectives);
      all.push_back(std::move(c));
    }
  }
  if (all.empty())
    throw InfeasibleError("no feasible point found after " + std::to_string(jobs.size()) + " local searches");

  double vmin = kInf;
  for (const auto& c : all) vmin = std::min(vmin, c.value);
  const double threshold = vmin + cfg.tol_opt * std::max(1.0, std::fabs(vmin));
  std::vector<const Candidate*> near;
  for (const auto& c : all)
    if (c.value <= threshold) near.push_back(&c);

  // A single criterion often has numerically tied minimizers; prefer the one
  // with the fewest switches. Weighted sums keep the exact minimum so that the
  // result is never dominated by another candidate.
  const bool prefer_simple = s.positive_weights() == 1;
  std::stable_sort(near.begin(), near.end(), [&](const Candidate* a, const Candidate* b) {
    if (prefer_simple && a->switches != b->switches) return a->switches < b->switches;
    if (a->value != b->value) return a->value < b->value;
    return lex_less(a->flat, b->flat);
  });

  for (const Candidate* c : near) {
    Solution sol = tr.solution(c->flat);
    bool fresh = true;
    for (const auto& kept : result.all_near_optimal)
      if (!distinct_controls(spec, kept, sol)) {
        fresh = false;
        break;
      }
    if (fresh) result.all_near_optimal.push_back(std::move(sol));
  }
  result.best = result.all_near_optimal.front();
  result.value = near.front()->value;
  result.converged = near.front()->converged;
  result.structure = near.front()->structure;
  return result;
}

ScalarResult minimize_scalar(const ProblemSpec& spec, std::size_t i, const SolverConfig& cfg) {
  return minimize(spec, Scalarization::single(spec.objective_count(), i), cfg);
}

ScalarResult minimize_weighted(const ProblemSpec& spec, std::span<const double> gamma, const SolverConfig& cfg) {
  if (gamma.size() != spec.objective_count()) throw Error("one weight per objective is required");
  return minimize(spec, Scalarization::weighted(gamma), cfg);
}

ScalarResult minimize_eps_constrained(const ProblemSpec& spec, std::size_t i, std::span<const double> bounds,
                                      const SolverConfig& cfg) {
  if (bounds.size() != spec.objective_count()) throw Error("one bound per objective is required");
  return minimize(spec, Scalarization::eps_constrained(i, bounds), cfg);
}

}  // namespace nonessential
