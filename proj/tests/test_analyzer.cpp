#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nonessential/analyzer.hpp"
#include "nonessential/catalog.hpp"
#include "nonessential/error.hpp"
#include "oracles/brute_force.hpp"
#include "support.hpp"

using namespace nonessential;

namespace {

const double kS2 = std::sqrt(2.0);
const double kS6 = std::sqrt(6.0);

const std::vector<std::size_t> kBase2{0, 1};
const std::vector<std::size_t> kBase1{0};

// A, B, C from the rocket car with the third coordinate I1 + I2.
ParetoArchive rocket_abc() {
  return archive_of({{kS2, kS2, 2 * kS2}, {4 + kS6, -kS6, 4}, {2, 0, 2}}, 1e-6);
}

// Oracle archive for the single integrator: (time, fuel) of every bang-off control on ten
// intervals. Patterns are stored as controls so members stay distinct.
ParetoArchive example1_archive() {
  ParetoArchive archive(1e-6);
  for (const auto& b : oracle::single_integrator_grid()) {
    Solution s;
    s.T = b.time;
    s.controls = {std::vector<double>(b.pattern.begin(), b.pattern.end())};
    s.objectives.values = {b.time, b.fuel};
    archive.insert(std::move(s));
  }
  return archive;
}

const Evidence& find_evidence(const Verdict& v, const std::string& test) {
  for (const auto& e : v.evidence)
    if (e.test == test) return e;
  FAIL("missing evidence " << test);
  return v.evidence.front();
}

}  // namespace

TEST_CASE("definition check on the rocket car points") {
  const auto e = check_efficient_equality(rocket_abc(), kBase2, 2);
  CHECK(e.outcome == Outcome::Pass);
  CHECK(e.witnesses.empty());
}

TEST_CASE("decreasing extra coordinate makes a dominated point efficient") {
  const auto archive = archive_of({{0, 0, 0}, {1, 1, -1}});
  const auto e = check_efficient_equality(archive, kBase2, 2);
  CHECK(e.outcome == Outcome::Fail);
  CHECK(e.witnesses == std::vector<std::size_t>{1});
}

TEST_CASE("equal-image check") {
  CHECK(check_equal_image(rocket_abc(), kBase2, 2).outcome == Outcome::Pass);
  const auto e = check_equal_image(archive_of({{1, 1, 0}, {1, 1, 5}}), kBase2, 2);
  CHECK(e.outcome == Outcome::Fail);
  CHECK(e.witnesses == std::vector<std::size_t>{0, 1});
}

TEST_CASE("single integrator oracle archive") {
  const auto archive = example1_archive();
  REQUIRE(archive.size() == 1023);
  const std::vector<std::size_t> time{0}, fuel{1};

  SUBCASE("fuel added to time is nonessential") {
    const auto v = analyze_archive(archive, time, 1);
    CHECK(v.status == Status::Nonessential);
    CHECK(find_evidence(v, "efficient_set_equality").outcome == Outcome::Pass);
    CHECK(find_evidence(v, "monotone_composition").outcome == Outcome::NotApplicable);
    // The only time-optimal control is u = -1 throughout; nothing shares its time.
    const auto& t1 = find_evidence(v, "equal_image");
    CHECK(t1.outcome == Outcome::Pass);
    CHECK(t1.detail == "1 efficient members checked, 1 without an equal-image partner (vacuous)");
  }

  SUBCASE("time added to fuel is essential") {
    const auto v = analyze_archive(archive, fuel, 0);
    CHECK(v.status == Status::Essential);
    const auto& d = find_evidence(v, "efficient_set_equality");
    CHECK(d.outcome == Outcome::Fail);
    CHECK(d.witnesses.size() == 1022);
    for (std::size_t w : d.witnesses) CHECK(archive[w].T > 1.0);
    const auto& t1 = find_evidence(v, "equal_image");
    CHECK(t1.outcome == Outcome::Fail);
    REQUIRE(t1.witnesses.size() == 2);
    CHECK(archive[t1.witnesses[0]].objectives[0] != doctest::Approx(archive[t1.witnesses[1]].objectives[0]));
    // Every member is fuel-optimal, so the time minimizer lies in the fuel-efficient set.
    CHECK(find_evidence(v, "unique_minimizer").outcome == Outcome::Pass);
    CHECK(find_evidence(v, "minimizer_intersection").outcome == Outcome::Pass);
  }
}

TEST_CASE("composition identity and monotonicity") {
  const auto probe = rocket_abc();
  const auto e = check_monotone_composition(Expr::parse("y1 + y2"), probe, kBase2, 2);
  CHECK(e.outcome == Outcome::Pass);
  CHECK(e.strength == Strength::Heuristic);

  // Distance to the ideal point on a probe with y1 >= sqrt2, y2 >= -sqrt6.
  const Expr pnorm = Expr::parse("((y1 - sqrt(2))^2 + (y2 + sqrt(6))^2)^(1/2)");
  std::vector<std::vector<double>> pts;
  for (auto y : std::vector<std::vector<double>>{{kS2, kS2}, {4 + kS6, -kS6}, {2, 0}, {3, -1}}) {
    std::vector<double> row = y;
    row.push_back(pnorm.eval(EvalContext{0.0, {}, {}, y}));
    pts.push_back(row);
  }
  CHECK(check_monotone_composition(pnorm, archive_of(pts), kBase2, 2).outcome == Outcome::Pass);

  const auto slow = archive_of({{1, 1, -1}, {2, 2, -2}, {3, 0, -3}});
  const auto neg = check_monotone_composition(Expr::parse("-y1"), slow, kBase2, 2);
  CHECK(neg.outcome == Outcome::Fail);
  CHECK(neg.witnesses.size() == 2);

  const auto wrong = check_monotone_composition(Expr::parse("y1 - y2"), probe, kBase2, 2);
  CHECK(wrong.outcome == Outcome::Fail);
  CHECK(wrong.witnesses.size() == 1);

  CHECK(check_monotone_composition(Expr::parse("y3"), probe, kBase2, 2).outcome == Outcome::Fail);
}

TEST_CASE("minimizer checks") {
  SUBCASE("unique minimizer C is efficient") {
    const auto archive = rocket_abc();
    const auto mins = minimizer_members(archive, 2);
    CHECK(mins == std::vector<std::size_t>{2});
    CHECK(check_unique_minimizer(archive, kBase2, mins).outcome == Outcome::Pass);
    const auto meets = check_minimizer_intersection(archive, kBase2, mins);
    CHECK(meets.outcome == Outcome::Pass);
    CHECK(meets.witnesses == std::vector<std::size_t>{2});
  }
  SUBCASE("dominated minimizer") {
    // (0,0) beats (1,1) on the base objective; the extra objective prefers (1,1).
    const auto archive = archive_of({{0, 1}, {1, 0}});
    const auto mins = minimizer_members(archive, 1);
    CHECK(mins == std::vector<std::size_t>{1});
    CHECK(check_unique_minimizer(archive, kBase1, mins).outcome == Outcome::Fail);
    CHECK(check_minimizer_intersection(archive, kBase1, mins).outcome == Outcome::Fail);
    CHECK(oracle::same_efficient_sets({{0, 1}, {1, 0}}, {0}, 1) == false);
    CHECK(analyze_archive(archive, kBase1, 1).status == Status::Essential);
  }
  SUBCASE("tied minimizers abstain") {
    const auto archive = archive_of({{0, 1}, {1, 1}});
    const auto mins = minimizer_members(archive, 1);
    CHECK(mins.size() == 2);
    CHECK(check_unique_minimizer(archive, kBase1, mins).outcome == Outcome::NotApplicable);
    CHECK(check_minimizer_intersection(archive, kBase1, mins).outcome == Outcome::Pass);
  }
}

TEST_CASE("argument errors") {
  const auto archive = rocket_abc();
  CHECK_THROWS_AS(check_efficient_equality(archive, std::vector<std::size_t>{}, 2), Error);
  CHECK_THROWS_AS(check_efficient_equality(archive, kBase2, 1), Error);
  CHECK_THROWS_AS(check_equal_image(archive, kBase2, 3), Error);
}

TEST_CASE("definition check agrees with brute force on random archives") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> size(1, 64), dims(1, 4);
  for (int c = 0; c < 1000; ++c) {
    const std::size_t N = dims(rng);
    const auto pts = random_points(rng, size(rng), N + 1, 4);
    std::vector<std::size_t> base(N);
    for (std::size_t i = 0; i < N; ++i) base[i] = i;
    const auto e = check_efficient_equality(archive_of(pts), base, N);
    CHECK((e.outcome == Outcome::Pass) == oracle::same_efficient_sets(pts, base, N));

    auto with = base;
    with.push_back(N);
    const auto a = oracle::nondominated(pts, base), b = oracle::nondominated(pts, with);
    std::vector<std::size_t> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
    CHECK(e.witnesses == diff);
  }
}

TEST_CASE("necessary conditions hold whenever the archive verdict is nonessential") {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<std::size_t> size(1, 40), dims(1, 3);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  int nonessential = 0, unique = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t N = dims(rng);
    auto pts = random_points(rng, size(rng), N + 1, 5);
    // Half the cases get a monotone extra column so nonessential verdicts are common.
    if (c % 2 == 0) {
      std::vector<double> g(N);
      for (double& x : g) x = w(rng);
      for (auto& p : pts) {
        p[N] = 0;
        for (std::size_t i = 0; i < N; ++i) p[N] += g[i] * p[i];
      }
    }
    std::vector<std::size_t> base(N);
    for (std::size_t i = 0; i < N; ++i) base[i] = i;
    const auto archive = archive_of(pts);
    const auto v = analyze_archive(archive, base, N);
    if (v.status == Status::Essential) {
      CHECK(!find_evidence(v, "efficient_set_equality").witnesses.empty());
      continue;
    }
    REQUIRE(v.status == Status::Nonessential);
    ++nonessential;
    const auto mins = minimizer_members(archive, N);
    const auto eff = efficient_positions(archive, base);
    const auto unique_check = find_evidence(v, "unique_minimizer");
    if (mins.size() == 1) {
      ++unique;
      CHECK(std::binary_search(eff.begin(), eff.end(), mins[0]));
      CHECK(unique_check.outcome == Outcome::Pass);
    } else {
      CHECK(unique_check.outcome == Outcome::NotApplicable);
    }
    CHECK(find_evidence(v, "minimizer_intersection").outcome == Outcome::Pass);
  }
  CHECK(nonessential >= 500);
  CHECK(unique > 50);
}

TEST_CASE("monotone composites never change the efficient set") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<std::size_t> size(1, 40), dims(1, 3);
  std::uniform_real_distribution<double> w(0.1, 2.0), shift(-3.0, 3.0);
  const char* families[] = {"linear", "pnorm", "max"};
  for (int c = 0; c < 1000; ++c) {
    const std::size_t N = dims(rng);
    auto pts = random_points(rng, size(rng), N, 6);
    std::vector<double> g(N), s(N);
    for (std::size_t i = 0; i < N; ++i) {
      g[i] = w(rng);
      s[i] = shift(rng);
    }
    std::string phi;
    const std::string family = families[c % 3];
    for (std::size_t i = 0; i < N; ++i) {
      const std::string y = "y" + std::to_string(i + 1);
      // Points sit at or above 0, so shifting by min(shift, 0) keeps the base nonnegative.
      const std::string shifted = "(" + y + " - (" + std::to_string(std::min(s[i], 0.0)) + "))";
      std::string term;
      if (family == "linear") term = std::to_string(g[i]) + "*" + y;
      if (family == "pnorm") term = shifted + "^3";
      if (family == "max") term = y;
      if (i == 0) {
        phi = term;
      } else if (family == "max") {
        phi = "max(" + phi + ", " + term + ")";
      } else {
        phi += " + " + term;
      }
    }
    if (family == "pnorm") phi = "(" + phi + ")^(1/3)";
    const Expr tag = Expr::parse(phi);
    for (auto& p : pts) p.push_back(tag.eval(EvalContext{0.0, {}, {}, p}));

    std::vector<std::size_t> base(N);
    for (std::size_t i = 0; i < N; ++i) base[i] = i;
    const auto archive = archive_of(pts);
    CHECK_MESSAGE(check_efficient_equality(archive, base, N).outcome == Outcome::Pass, phi);
    CHECK_MESSAGE(check_monotone_composition(tag, archive, base, N, c, 200).outcome == Outcome::Pass, phi);
  }
}

TEST_CASE("rocket car: I3 = I1 + I2 is nonessential") {
  const auto spec = load_catalog("rocket-car");
  const auto v = analyze(spec, 2, SolverConfig{});
  CHECK(v.status == Status::Nonessential);
  CHECK(find_evidence(v, "efficient_set_equality").outcome == Outcome::Pass);
  CHECK(find_evidence(v, "equal_image").outcome == Outcome::Pass);
  CHECK(find_evidence(v, "monotone_composition").outcome == Outcome::Pass);
  CHECK(find_evidence(v, "unique_minimizer").outcome == Outcome::Pass);
  const auto& meets = find_evidence(v, "minimizer_intersection");
  CHECK(meets.outcome == Outcome::Pass);
  REQUIRE(meets.witnesses.size() == 1);
  const auto& C = v.archive[meets.witnesses[0]].objectives;
  CHECK(C[0] == doctest::Approx(2).epsilon(1e-3));
  CHECK(C[1] == doctest::Approx(0).scale(1).epsilon(1e-3));
  CHECK(v.archive_provenance.find("seed=0") != std::string::npos);
}

TEST_CASE("single integrator through the solver") {
  const auto spec = load_catalog("single-integrator");
  SUBCASE("fuel added to time") {
    const auto v = analyze(spec, 1, SolverConfig{});
    CHECK(v.status == Status::Nonessential);
    CHECK(find_evidence(v, "monotone_composition").outcome == Outcome::NotApplicable);
    CHECK(find_evidence(v, "efficient_set_equality").outcome == Outcome::Pass);
  }
  SUBCASE("time added to fuel") {
    const auto v = analyze(spec, 0, SolverConfig{});
    CHECK(v.status == Status::Essential);
    const auto& d = find_evidence(v, "efficient_set_equality");
    REQUIRE(!d.witnesses.empty());
    bool slow = false;
    for (std::size_t w : d.witnesses) {
      const auto& y = v.archive[w].objectives;
      slow = slow || (y[1] == doctest::Approx(1).epsilon(1e-3) && y[0] > 1.1);
    }
    CHECK(slow);
  }
}

TEST_CASE("analyze rejects bad indices") {
  const auto spec = load_catalog("rocket-car");
  CHECK_THROWS_AS(analyze(spec, 3, SolverConfig{}), Error);
}
