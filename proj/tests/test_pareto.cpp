#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nonessential/catalog.hpp"
#include "nonessential/error.hpp"
#include "nonessential/pareto.hpp"
#include "oracles/brute_force.hpp"
#include "support.hpp"

using namespace nonessential;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt6 = std::sqrt(6.0);

ObjectiveVector vec(std::vector<double> v) { return ObjectiveVector{std::move(v)}; }

std::vector<ObjectiveVector> vectors(const std::vector<std::vector<double>>& pts) {
  std::vector<ObjectiveVector> out;
  for (const auto& p : pts) out.push_back(vec(p));
  return out;
}

}  // namespace

TEST_CASE("dominates") {
  const auto A = vec({kSqrt2, kSqrt2});
  const auto C = vec({2.0, 0.0});
  CHECK_FALSE(dominates(A, C));
  CHECK_FALSE(dominates(C, A));
  CHECK_FALSE(dominates(A, A));
  CHECK(dominates(vec({1, 0}), vec({1, 1})));
  CHECK_THROWS_AS(dominates(vec({1}), vec({1, 2})), Error);
}

TEST_CASE("dominates is a strict partial order (property)") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = vectors(random_points(rng, 3, 1 + trial % 4, 2));
    const auto &a = p[0], &b = p[1], &c = p[2];
    CHECK_FALSE(dominates(a, a));
    if (dominates(a, b)) CHECK_FALSE(dominates(b, a));
    if (dominates(a, b) && dominates(b, c)) CHECK(dominates(a, c));
  }
}

TEST_CASE("efficient subset of the rocket car corner points") {
  const auto archive = archive_of({{kSqrt2, kSqrt2}, {4 + kSqrt6, -kSqrt6}, {2, 0}}, 1e-6);
  CHECK(efficient_subset(archive, all_indices(2)).size() == 3);
  const auto two = archive_of({{0, 0}, {1, 1}});
  const auto eff = efficient_subset(two, all_indices(2));
  REQUIRE(eff.size() == 1);
  CHECK(eff[0].objectives == vec({0, 0}));
}

TEST_CASE("efficient subset matches the brute-force oracle (property)") {
  std::mt19937_64 rng(202);
  {
    const auto pts = random_points(rng, 100, 3, 20);
    CHECK(efficient_indices(vectors(pts), all_indices(3)) == oracle::nondominated(pts, {0, 1, 2}));
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dims = 1 + trial % 4;
    const auto pts = random_points(rng, 1 + trial % 64, dims, 5);
    std::vector<std::size_t> coords;
    for (std::size_t c = 0; c < dims; ++c)
      if (rng() % 3 != 0 || coords.empty()) coords.push_back(c);
    CHECK(efficient_indices(vectors(pts), coords) == oracle::nondominated(pts, coords));
  }
}

TEST_CASE("efficient subset is idempotent and pairwise non-dominated (property)") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dims = 1 + trial % 4;
    auto archive = archive_of(random_points(rng, 1 + trial % 50, dims, 6));
    const auto idx = all_indices(dims);
    archive.prune(idx);
    const auto again = efficient_positions(archive, idx);
    CHECK(again.size() == archive.size());
    for (const auto& a : archive.members())
      for (const auto& b : archive.members()) CHECK_FALSE(dominates(a.objectives, b.objectives));
  }
}

TEST_CASE("points equal within tol_obj are retained together") {
  const auto archive = archive_of({{1.0, 1.0}, {1.0 + 1e-9, 1.0 - 1e-9}, {1.0 + 1e-9, 1.0}, {2.0, 2.0}}, 1e-6);
  CHECK(efficient_subset(archive, all_indices(2)).size() == 3);
  // A real improvement still removes the others.
  const auto archive2 = archive_of({{1.0, 1.0}, {1.0 + 1e-9, 0.5}}, 1e-6);
  CHECK(efficient_subset(archive2, all_indices(2)).size() == 1);
}

TEST_CASE("archive keeps one member per decision vector") {
  ParetoArchive archive;
  Solution s;
  s.controls = {{0.5, -0.5}};
  s.T = 2.0;
  s.objectives = vec({1, 2});
  CHECK(archive.insert(s) == 0);
  CHECK(archive.insert(s) == 0);
  s.T = 2.5;
  CHECK(archive.insert(s) == 1);
  CHECK(archive.size() == 2);
  CHECK(archive.find(s) == 1);
}

TEST_CASE("positive-weight minimizers of a finite archive are efficient (property)") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> w(0.01, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dims = 1 + trial % 4;
    const auto pts = vectors(random_points(rng, 1 + trial % 64, dims, 8));
    std::vector<double> gamma(dims);
    for (double& g : gamma) g = w(rng);
    double best = INFINITY;
    std::vector<double> score;
    for (const auto& p : pts) {
      double s = 0.0;
      for (std::size_t i = 0; i < dims; ++i) s += gamma[i] * p[i];
      score.push_back(s);
      best = std::min(best, s);
    }
    const auto eff = efficient_indices(pts, all_indices(dims));
    for (std::size_t m = 0; m < pts.size(); ++m)
      if (score[m] == best) CHECK(std::find(eff.begin(), eff.end(), m) != eff.end());
  }
}

TEST_CASE("appending a function of the criteria only grows the efficient set (property)") {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t N = 1 + trial % 3;
    auto raw = random_points(rng, 2 + trial % 40, N, 6);

    // Arbitrary phi: random signed linear form plus a bounded oscillation.
    std::vector<double> a(N);
    for (double& c : a) c = coef(rng);
    auto any = raw;
    for (auto& p : any) {
      double v = std::sin(3.0 * p[0]);
      for (std::size_t i = 0; i < N; ++i) v += a[i] * p[i];
      p.push_back(v);
    }
    const auto base = all_indices(N);
    const auto ext = all_indices(N + 1);
    const auto eN = efficient_indices(vectors(any), base);
    const auto eN1 = efficient_indices(vectors(any), ext);
    CHECK(std::includes(eN1.begin(), eN1.end(), eN.begin(), eN.end()));

    // Monotone phi: positive linear, shifted p-norm above the minimum corner, or max.
    auto mono = raw;
    const int family = trial % 3;
    std::vector<double> lowest(N, INFINITY);
    for (const auto& p : raw)
      for (std::size_t i = 0; i < N; ++i) lowest[i] = std::min(lowest[i], p[i]);
    for (auto& c : a) c = pos(rng);
    const double pnorm = 1.0 + trial % 4;
    for (auto& p : mono) {
      double v = 0.0;
      if (family == 0) {
        for (std::size_t i = 0; i < N; ++i) v += a[i] * p[i];
      } else if (family == 1) {
        for (std::size_t i = 0; i < N; ++i) v += std::pow(p[i] - lowest[i], pnorm);
        v = std::pow(v, 1.0 / pnorm);
      } else {
        v = *std::max_element(p.begin(), p.end());
      }
      p.push_back(v);
    }
    CHECK(efficient_indices(vectors(mono), base) == efficient_indices(vectors(mono), ext));
  }
}

TEST_CASE("interior weight grid") {
  const auto w = interior_weights(2, 9);
  REQUIRE(w.size() == 9);
  CHECK(w.front()[0] == doctest::Approx(0.1));
  CHECK(w.back()[0] == doctest::Approx(0.9));
  CHECK(interior_weights(2, 1) == std::vector<std::vector<double>>{{0.5, 0.5}});
  CHECK(interior_weights(3, 9).size() == 36);
  CHECK(interior_weights(1, 5) == std::vector<std::vector<double>>{{1.0}});
  for (const auto& g : interior_weights(4, 6)) {
    double s = 0.0;
    for (double x : g) {
      CHECK(x > 0.0);
      s += x;
    }
    CHECK(s == doctest::Approx(1.0));
  }
}

TEST_CASE("rocket car weight sweep traces the convex front") {
  const auto spec = load_catalog("rocket-car");
  const std::size_t idx[] = {0, 1};
  const auto archive = sweep_weights(spec, idx, 9, SolverConfig{});
  CHECK(archive.size() >= 5);

  auto all = archive.objective_vectors();
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  // Several weights reach B; keep one representative per 1e-3 neighbourhood.
  std::vector<ObjectiveVector> pts;
  for (const auto& p : all)
    if (pts.empty() || p[0] - pts.back()[0] > 1e-3) pts.push_back(p);
  CHECK(pts.size() >= 5);
  for (const auto& p : pts) {
    CHECK(p[0] >= kSqrt2 - 1e-3);
    CHECK(p[0] <= 4 + kSqrt6 + 1e-2);
    CHECK(p[1] >= -kSqrt6 - 1e-3);
    CHECK(p[1] <= kSqrt2 + 1e-3);
  }
  // Decreasing and convex along increasing time.
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i][1] < pts[i - 1][1]);
  for (std::size_t i = 2; i < pts.size(); ++i) {
    const double s1 = (pts[i - 1][1] - pts[i - 2][1]) / (pts[i - 1][0] - pts[i - 2][0]);
    const double s2 = (pts[i][1] - pts[i - 1][1]) / (pts[i][0] - pts[i - 1][0]);
    CHECK(s2 >= s1 - 1e-3);
  }
  // The extreme weights land close to A and B.
  CHECK(pts.front()[0] < 1.6);
  CHECK(pts.back()[1] < -2.4);
}

TEST_CASE("degenerate weight sweeps") {
  const auto spec = load_catalog("rocket-car");
  SolverConfig cfg;
  const std::size_t both[] = {0, 1};
  const auto one = sweep_weights(spec, both, 1, cfg);
  const double half[] = {0.5, 0.5, 0.0};
  auto expected = minimize_weighted(spec, half, cfg);
  ParetoArchive direct;
  for (auto& s : expected.all_near_optimal) direct.insert(s);
  direct.prune(both);
  REQUIRE(one.size() == direct.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].objectives == direct[i].objectives);

  const std::size_t single[] = {2};
  const auto s = sweep_weights(spec, single, 9, cfg);
  const auto r = minimize_scalar(spec, 2, cfg);
  REQUIRE(s.size() == 1);
  CHECK(s[0].objectives == r.best.objectives);

  const std::size_t bad[] = {0, 0};
  CHECK_THROWS_AS(sweep_weights(spec, bad, 3, cfg), Error);
  CHECK_THROWS_AS(sweep_weights(spec, both, 0, cfg), Error);
}

TEST_CASE("epsilon sweep spans A to B") {
  const auto spec = load_catalog("rocket-car");
  const std::size_t idx[] = {0, 1};
  const auto archive = sweep_eps(spec, idx, 1, 5, SolverConfig{});
  double tmin = INFINITY, tmax = -INFINITY;
  for (const auto& m : archive.members()) {
    tmin = std::min(tmin, m.objectives[0]);
    tmax = std::max(tmax, m.objectives[0]);
  }
  CHECK(std::fabs(tmin - kSqrt2) <= 0.02 * kSqrt2);
  CHECK(std::fabs(tmax - (4 + kSqrt6)) <= 0.02 * (4 + kSqrt6));
  CHECK(archive.size() >= 4);

  const auto ends = sweep_eps(spec, idx, 1, 2, SolverConfig{});
  for (const auto& m : ends.members()) {
    const bool at_a = std::fabs(m.objectives[0] - kSqrt2) < 1e-3;
    const bool at_b = std::fabs(m.objectives[1] + kSqrt6) < 1e-3;
    CHECK((at_a || at_b));
  }
  CHECK_THROWS_AS(sweep_eps(spec, idx, 1, 1, SolverConfig{}), Error);
  CHECK_THROWS_AS(sweep_eps(spec, idx, 2, 3, SolverConfig{}), Error);
}

TEST_CASE("single integrator epsilon sweep collapses to one point") {
  const auto spec = load_catalog("single-integrator");
  const std::size_t idx[] = {0, 1};
  const auto archive = sweep_eps(spec, idx, 0, 4, SolverConfig{});
  REQUIRE_FALSE(archive.empty());
  for (const auto& m : archive.members()) {
    CHECK(std::fabs(m.objectives[0] - 1.0) < 1e-3);
    CHECK(std::fabs(m.objectives[1] - 1.0) < 1e-3);
  }
}
