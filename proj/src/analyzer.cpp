#include "nonessential/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nonessential/error.hpp"

namespace nonessential {

namespace {

std::vector<std::size_t> with_extra(std::span<const std::size_t> base, std::size_t k) {
  std::vector<std::size_t> ext(base.begin(), base.end());
  ext.push_back(k);
  return ext;
}

bool contains(const std::vector<std::size_t>& sorted, std::size_t v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

void check_arguments(const ParetoArchive& archive, std::span<const std::size_t> base, std::size_t k) {
  if (base.empty()) throw Error("analysis needs at least one base objective");
  for (const auto& m : archive.members()) {
    if (k >= m.objectives.size()) throw Error("archive member lacks objective " + std::to_string(k + 1));
    for (std::size_t i : base) {
      if (i == k) throw Error("objective under test is also in the base set");
      if (i >= m.objectives.size()) throw Error("archive member lacks objective " + std::to_string(i + 1));
    }
  }
}

std::string list(const std::vector<std::size_t>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i] + 1;
  return out.str();
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Nonessential: return "nonessential";
    case Status::Essential: return "essential";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::NotApplicable: return "not-applicable";
  }
  return "?";
}

const char* to_string(Strength s) {
  return s == Strength::Heuristic ? "heuristic" : "proof-at-archive-level";
}

Evidence check_efficient_equality(const ParetoArchive& archive, std::span<const std::size_t> base, std::size_t k) {
  check_arguments(archive, base, k);
  const auto ext = with_extra(base, k);
  const auto eN = efficient_positions(archive, base);
  const auto eN1 = efficient_positions(archive, ext);
  Evidence e;
  e.test = "efficient_set_equality";
  std::set_symmetric_difference(eN.begin(), eN.end(), eN1.begin(), eN1.end(), std::back_inserter(e.witnesses));
  e.outcome = e.witnesses.empty() ? Outcome::Pass : Outcome::Fail;
  std::ostringstream d;
  d << eN.size() << " efficient without objective " << k + 1 << ", " << eN1.size() << " with it";
  if (!e.witnesses.empty()) d << "; " << e.witnesses.size() << " members efficient in exactly one set";
  e.detail = d.str();
  return e;
}

Evidence check_equal_image(const ParetoArchive& archive, std::span<const std::size_t> base, std::size_t k) {
  check_arguments(archive, base, k);
  const double tol = archive.tol_obj();
  const auto eff = efficient_positions(archive, base);
  Evidence e;
  e.test = "equal_image";
  std::size_t vacuous = 0;
  for (std::size_t a : eff) {
    const auto& ya = archive[a].objectives;
    bool twin = false;
    for (std::size_t b = 0; b < archive.size(); ++b) {
      if (b == a) continue;
      const auto& yb = archive[b].objectives;
      bool same = true;
      for (std::size_t i : base) same = same && std::fabs(ya[i] - yb[i]) <= tol;
      if (!same) continue;
      twin = true;
      if (std::fabs(ya[k] - yb[k]) > tol && e.witnesses.empty()) e.witnesses = {a, b};
    }
    if (!twin) ++vacuous;
  }
  e.outcome = e.witnesses.empty() ? Outcome::Pass : Outcome::Fail;
  std::ostringstream d;
  d << eff.size() << " efficient members checked, " << vacuous << " without an equal-image partner (vacuous)";
  e.detail = d.str();
  return e;
}

Evidence check_monotone_composition(const Expr& phi, const ParetoArchive& probe, std::span<const std::size_t> base,
                          std::size_t k, std::uint64_t seed, int samples) {
  check_arguments(probe, base, k);
  Evidence e;
  e.test = "monotone_composition";
  e.strength = Strength::Heuristic;
  for (int i = 1; i <= phi.max_index(VarKind::Criterion); ++i) {
    const bool allowed = std::find(base.begin(), base.end(), static_cast<std::size_t>(i - 1)) != base.end();
    if (!allowed && phi.references(VarKind::Criterion, i)) {
      e.outcome = Outcome::Fail;
      e.detail = "composition refers to y" + std::to_string(i) + ", which is not a base objective";
      return e;
    }
  }
  if (probe.empty()) {
    e.outcome = Outcome::NotApplicable;
    e.detail = "empty probe";
    return e;
  }
  const std::size_t width = probe[0].objectives.size();
  const auto value = [&](const std::vector<double>& y) { return phi.eval(EvalContext{0.0, {}, {}, y}); };

  for (std::size_t m = 0; m < probe.size(); ++m) {
    const auto& y = probe[m].objectives.values;
    const double Ik = y[k];
    if (std::fabs(Ik - value(y)) > 1e-6 * (1.0 + std::fabs(Ik))) {
      e.outcome = Outcome::Fail;
      e.witnesses = {m};
      e.detail = "declared composition does not reproduce objective " + std::to_string(k + 1);
      return e;
    }
  }

  const auto ordered_ok = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    const double a = value(lo), b = value(hi);
    return a <= b + 1e-12 * (1.0 + std::fabs(a) + std::fabs(b));
  };
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < probe.size(); ++a)
    for (std::size_t b = 0; b < probe.size(); ++b) {
      if (a == b) continue;
      const auto& ya = probe[a].objectives.values;
      const auto& yb = probe[b].objectives.values;
      bool below = true;
      for (std::size_t i : base) below = below && ya[i] <= yb[i];
      if (!below) continue;
      ++pairs;
      if (!ordered_ok(ya, yb)) {
        e.outcome = Outcome::Fail;
        e.witnesses = {a, b};
        e.detail = "composition decreases between two ordered probe members";
        return e;
      }
    }

  std::vector<double> lo(width, 0.0), hi(width, 0.0);
  for (std::size_t i : base) {
    lo[i] = hi[i] = probe[0].objectives[i];
    for (const auto& m : probe.members()) {
      lo[i] = std::min(lo[i], m.objectives[i]);
      hi[i] = std::max(hi[i], m.objectives[i]);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(width, 0.0), q(width, 0.0);
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i : base) {
      const double u = lo[i] + unit(rng) * (hi[i] - lo[i]);
      const double v = lo[i] + unit(rng) * (hi[i] - lo[i]);
      p[i] = std::min(u, v);
      q[i] = std::max(u, v);
    }
    if (!ordered_ok(p, q)) {
      e.outcome = Outcome::Fail;
      e.detail = "composition decreases between two ordered points of the probe box";
      return e;
    }
  }
  e.outcome = Outcome::Pass;
  std::ostringstream d;
  d << "identity holds on " << probe.size() << " members; nondecreasing on " << pairs << " ordered member pairs and "
    << samples << " sampled pairs";
  e.detail = d.str();
  return e;
}

Evidence check_unique_minimizer(const ParetoArchive& archive, std::span<const std::size_t> base,
                          std::span<const std::size_t> minimizers) {
  Evidence e;
  e.test = "unique_minimizer";
  if (minimizers.size() != 1) {
    e.outcome = Outcome::NotApplicable;
    e.detail = std::to_string(minimizers.size()) + " distinct minimizers; uniqueness not established";
    return e;
  }
  const auto eff = efficient_positions(archive, base);
  e.witnesses = {minimizers[0]};
  e.outcome = contains(eff, minimizers[0]) ? Outcome::Pass : Outcome::Fail;
  e.detail = e.outcome == Outcome::Pass ? "unique minimizer is efficient without the objective"
                                        : "unique minimizer is dominated without the objective";
  return e;
}

Evidence check_minimizer_intersection(const ParetoArchive& archive, std::span<const std::size_t> base,
                          std::span<const std::size_t> minimizers) {
  Evidence e;
  e.test = "minimizer_intersection";
  if (minimizers.empty()) {
    e.outcome = Outcome::NotApplicable;
    e.detail = "no minimizer in the archive";
    return e;
  }
  const auto eff = efficient_positions(archive, base);
  for (std::size_t m : minimizers)
    if (contains(eff, m)) e.witnesses.push_back(m);
  if (e.witnesses.empty()) {
    e.outcome = Outcome::Fail;
    e.witnesses.assign(minimizers.begin(), minimizers.end());
    e.detail = "no minimizer is efficient without the objective";
  } else {
    e.outcome = Outcome::Pass;
    e.detail = std::to_string(e.witnesses.size()) + " of " + std::to_string(minimizers.size()) +
               " minimizers are efficient without the objective";
  }
  return e;
}

std::vector<std::size_t> minimizer_members(const ParetoArchive& archive, std::size_t k) {
  std::vector<std::size_t> out;
  if (archive.empty()) return out;
  double best = archive[0].objectives[k];
  for (const auto& m : archive.members()) best = std::min(best, m.objectives[k]);
  for (std::size_t i = 0; i < archive.size(); ++i)
    if (archive[i].objectives[k] <= best + archive.tol_obj()) out.push_back(i);
  return out;
}

Status combine(std::span<const Evidence> evidence) {
  bool sufficient = false;
  for (const auto& e : evidence) {
    const bool necessary = e.test == "efficient_set_equality" || e.test == "equal_image" || e.test == "unique_minimizer" ||
                           e.test == "minimizer_intersection";
    if (necessary && e.outcome == Outcome::Fail) return Status::Essential;
    if ((e.test == "efficient_set_equality" || e.test == "monotone_composition") && e.outcome == Outcome::Pass) sufficient = true;
  }
  return sufficient ? Status::Nonessential : Status::Inconclusive;
}

Verdict analyze_archive(const ParetoArchive& archive, std::span<const std::size_t> base, std::size_t k,
                        const Expr* phi, std::uint64_t seed) {
  Verdict v;
  v.archive = archive;
  v.base.assign(base.begin(), base.end());
  v.extra = k;
  v.archive_provenance = "given archive of " + std::to_string(archive.size()) + " members";
  const auto minimizers = minimizer_members(archive, k);
  v.evidence.push_back(check_efficient_equality(archive, base, k));
  v.evidence.push_back(check_equal_image(archive, base, k));
  if (phi) {
    v.evidence.push_back(check_monotone_composition(*phi, archive, base, k, seed));
  } else {
    v.evidence.push_back(Evidence{"monotone_composition", Outcome::NotApplicable, Strength::Heuristic, {}, "no composition tag"});
  }
  v.evidence.push_back(check_unique_minimizer(archive, base, minimizers));
  v.evidence.push_back(check_minimizer_intersection(archive, base, minimizers));
  v.status = combine(v.evidence);
  return v;
}

Verdict analyze(const ProblemSpec& spec, std::size_t k, const SolverConfig& cfg, const AnalyzeOptions& options) {
  require_valid(spec);
  const std::size_t N = spec.objective_count();
  if (k >= N) throw Error("analyze: objective " + std::to_string(k + 1) + " does not exist");
  if (N < 2) throw Error("analyze: needs at least two objectives");
  std::vector<std::size_t> base;
  for (std::size_t i = 0; i < N; ++i)
    if (i != k) base.push_back(i);
  const auto ext = all_indices(N);

  const auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(std::string(name) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(std::string(name) + ": " + e.what());
    }
  };

  Verdict v;
  v.base = base;
  v.extra = k;
  ParetoArchive pool(options.tol_obj);
  const auto base_front =
      stage("weight sweep without objective", [&] { return sweep_weights(spec, base, options.weight_grid, cfg, options.tol_obj); });
  const auto full_front =
      stage("weight sweep with objective", [&] { return sweep_weights(spec, ext, options.weight_grid, cfg, options.tol_obj); });
  std::vector<ScalarResult> singles;
  for (std::size_t i = 0; i < N; ++i)
    singles.push_back(stage("scalar minimization", [&] { return minimize_scalar(spec, i, cfg); }));

  pool.merge(base_front);
  pool.merge(full_front);
  for (const auto& r : singles)
    for (const auto& s : r.all_near_optimal) pool.insert(s);

  std::vector<std::size_t> minimizers;
  for (const auto& s : singles[k].all_near_optimal) {
    const std::size_t at = pool.find(s);
    if (std::find(minimizers.begin(), minimizers.end(), at) == minimizers.end()) minimizers.push_back(at);
  }

  std::ostringstream prov;
  prov << "pool of " << pool.size() << " feasible solutions: weight sweep (grid " << options.weight_grid
       << ") over objectives {" << list(base) << "} (" << base_front.size() << " efficient), weight sweep over {"
       << list(ext) << "} (" << full_front.size() << " efficient), and near-optimal minimizers of every objective; "
       << (cfg.backend == Backend::SwitchTime ? "switchtime" : "gradient") << " backend, K=" << cfg.K
       << ", seed=" << cfg.seed << ", starts=" << cfg.starts << ", tol_obj=" << options.tol_obj;
  v.archive_provenance = prov.str();

  v.evidence.push_back(check_efficient_equality(pool, base, k));
  v.evidence.push_back(check_equal_image(pool, base, k));
  const auto& tag = spec.objectives[k].composition;
  if (tag) {
    v.evidence.push_back(stage("monotone_composition", [&] { return check_monotone_composition(*tag, pool, base, k, cfg.seed); }));
  } else {
    v.evidence.push_back(Evidence{"monotone_composition", Outcome::NotApplicable, Strength::Heuristic, {}, "no composition tag"});
  }
  v.evidence.push_back(check_unique_minimizer(pool, base, minimizers));
  v.evidence.push_back(check_minimizer_intersection(pool, base, minimizers));
  v.status = combine(v.evidence);
  v.archive = std::move(pool);
  return v;
}

}  // namespace nonessential
