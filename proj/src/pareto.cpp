#include "nonessential/pareto.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "nonessential/error.hpp"
#include "nonessential/parallel.hpp"

namespace nonessential {

namespace {

// o removes m: o_i <= m_i + tol everywhere, o_j < m_j - tol somewhere.
bool removes(const ObjectiveVector& o, const ObjectiveVector& m, std::span<const std::size_t> indices, double tol) {
  bool strict = false;
  for (std::size_t i : indices) {
    if (o[i] > m[i] + tol) return false;
    if (o[i] < m[i] - tol) strict = true;
  }
  return strict;
}

bool same_decision(const Solution& a, const Solution& b) { return a.T == b.T && a.controls == b.controls; }

// Solves each scalarization, inner solves single-threaded when the sweep itself
// runs in parallel. Infeasible cells yield nullopt when `skip_infeasible`.
std::vector<std::optional<ScalarResult>> solve_all(const ProblemSpec& spec, const std::vector<Scalarization>& jobs,
                                                   const SolverConfig& cfg, bool skip_infeasible) {
  std::vector<std::optional<ScalarResult>> out(jobs.size());
  const std::size_t workers = std::min(worker_count(cfg.threads), jobs.size());
  SolverConfig inner = cfg;
  if (workers > 1) inner.threads = 1;
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    try {
      out[j] = minimize(spec, jobs[j], inner);
    } catch (const InfeasibleError&) {
      if (!skip_infeasible) throw;
    }
  });
  return out;
}

void check_indices(const ProblemSpec& spec, std::span<const std::size_t> indices) {
  if (indices.empty()) throw Error("at least one objective index is required");
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= spec.objective_count()) throw Error("objective index out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (indices[a] == indices[b]) throw Error("objective indices must be distinct");
  }
}

}  // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) throw Error("dominates: objective vectors differ in length");
  return dominates(a, b, all_indices(a.size()));
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b, std::span<const std::size_t> indices) {
  bool strict = false;
  for (std::size_t i : indices) {
    if (i >= a.size() || i >= b.size()) throw Error("dominates: objective index out of range");
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

std::vector<std::size_t> all_indices(std::size_t N) {
  std::vector<std::size_t> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = i;
  return out;
}

std::vector<std::size_t> efficient_indices(std::span<const ObjectiveVector> points,
                                           std::span<const std::size_t> indices, double tol) {
  if (indices.empty()) throw Error("efficient subset needs at least one objective index");
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < points.size(); ++m) {
    bool kept = true;
    for (std::size_t o = 0; o < points.size() && kept; ++o)
      if (o != m && removes(points[o], points[m], indices, tol)) kept = false;
    if (kept) out.push_back(m);
  }
  return out;
}

std::size_t ParetoArchive::find(const Solution& s) const {
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (same_decision(members_[i], s)) return i;
  return members_.size();
}

std::size_t ParetoArchive::insert(Solution s) {
  const std::size_t at = find(s);
  if (at == members_.size()) members_.push_back(std::move(s));
  return at;
}

void ParetoArchive::merge(const ParetoArchive& other) {
  for (const auto& s : other.members_) insert(s);
}

std::vector<ObjectiveVector> ParetoArchive::objective_vectors() const {
  std::vector<ObjectiveVector> out;
  out.reserve(members_.size());
  for (const auto& s : members_) out.push_back(s.objectives);
  return out;
}

void ParetoArchive::prune(std::span<const std::size_t> indices) {
  const auto keep = efficient_positions(*this, indices);
  std::vector<Solution> next;
  next.reserve(keep.size());
  for (std::size_t i : keep) next.push_back(std::move(members_[i]));
  members_ = std::move(next);
}

std::vector<std::size_t> efficient_positions(const ParetoArchive& archive, std::span<const std::size_t> indices) {
  const auto points = archive.objective_vectors();
  return efficient_indices(points, indices, archive.tol_obj());
}

std::vector<Solution> efficient_subset(const ParetoArchive& archive, std::span<const std::size_t> indices) {
  std::vector<Solution> out;
  for (std::size_t i : efficient_positions(archive, indices)) out.push_back(archive[i]);
  return out;
}

std::vector<std::vector<double>> interior_weights(std::size_t count, int grid) {
  if (count == 0) throw Error("weights need at least one objective");
  if (grid < 1) throw Error("weight grid must be at least 1");
  const int total = grid + 1;
  std::vector<std::vector<double>> out;
  std::vector<int> parts(count, 1);
  // Enumerate compositions of `total` into `count` positive parts in
  // lexicographic order of the leading parts.
  const auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == count) {
      parts[pos] = remaining;
      std::vector<double> w(count);
      for (std::size_t i = 0; i < count; ++i) w[i] = static_cast<double>(parts[i]) / total;
      out.push_back(std::move(w));
      return;
    }
    const int slots = static_cast<int>(count - pos - 1);
    for (int p = 1; p <= remaining - slots; ++p) {
      parts[pos] = p;
      self(self, pos + 1, remaining - p);
    }
  };
  if (total < static_cast<int>(count)) return out;
  recurse(recurse, 0, total);
  return out;
}

ParetoArchive sweep_weights(const ProblemSpec& spec, std::span<const std::size_t> indices, int grid,
                            const SolverConfig& cfg, double tol_obj) {
  check_indices(spec, indices);
  const std::size_t N = spec.objective_count();
  std::vector<Scalarization> jobs;
  for (const auto& w : interior_weights(indices.size(), grid)) {
    std::vector<double> gamma(N, 0.0);
    for (std::size_t a = 0; a < indices.size(); ++a) gamma[indices[a]] = w[a];
    // Rounded weights may miss 1 by an ulp; renormalize against the first entry.
    double sum = 0.0;
    for (double g : gamma) sum += g;
    gamma[indices[0]] += 1.0 - sum;
    jobs.push_back(Scalarization::weighted(gamma));
  }
  ParetoArchive archive(tol_obj);
  for (auto& r : solve_all(spec, jobs, cfg, false))
    for (auto& s : r->all_near_optimal) archive.insert(std::move(s));
  archive.prune(indices);
  return archive;
}

ParetoArchive sweep_eps(const ProblemSpec& spec, std::span<const std::size_t> indices, std::size_t i, int grid,
                        const SolverConfig& cfg, double tol_obj) {
  check_indices(spec, indices);
  if (grid < 2) throw Error("epsilon grid must be at least 2");
  if (std::find(indices.begin(), indices.end(), i) == indices.end())
    throw Error("minimized objective must be one of the indices");
  const std::size_t N = spec.objective_count();

  std::vector<Scalarization> singles;
  for (std::size_t j : indices) singles.push_back(Scalarization::single(N, j));
  auto minimizers = solve_all(spec, singles, cfg, false);

  std::vector<std::size_t> others;
  std::vector<double> lo, hi;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    const std::size_t j = indices[a];
    if (j == i) continue;
    others.push_back(j);
    lo.push_back(minimizers[a]->value);
    double top = minimizers[a]->value;
    for (std::size_t b = 0; b < indices.size(); ++b)
      if (b != a) top = std::max(top, minimizers[b]->best.objectives[j]);
    hi.push_back(top);
  }

  std::vector<Scalarization> cells;
  std::vector<std::size_t> step(others.size(), 0);
  while (true) {
    std::vector<double> bounds(N, std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < others.size(); ++a) {
      const double t = static_cast<double>(step[a]) / static_cast<double>(grid - 1);
      bounds[others[a]] = step[a] + 1 == static_cast<std::size_t>(grid) ? hi[a] : lo[a] + t * (hi[a] - lo[a]);
    }
    cells.push_back(Scalarization::eps_constrained(i, bounds));
    std::size_t a = 0;
    while (a < step.size() && ++step[a] == static_cast<std::size_t>(grid)) step[a++] = 0;
    if (a == step.size()) break;
  }

  ParetoArchive archive(tol_obj);
  for (auto& r : minimizers) archive.insert(std::move(r->best));
  for (auto& r : solve_all(spec, cells, cfg, true))
    if (r)
      for (auto& s : r->all_near_optimal) archive.insert(std::move(s));
  archive.prune(indices);
  return archive;
}

}  // namespace nonessential
