#include "nonessential/catalog.hpp"

#include <cmath>

#include "nonessential/error.hpp"

namespace nonessential {

namespace {

Objective integral(std::string name, std::string_view integrand, std::string_view tag = {}) {
  Objective o;
  o.name = std::move(name);
  o.integrand = Expr::parse(integrand);
  if (!tag.empty()) o.composition = Expr::parse(tag);
  return o;
}

Objective derived(std::string name, std::string_view composition) {
  Objective o;
  o.name = std::move(name);
  o.composition = Expr::parse(composition);
  return o;
}

ProblemSpec single_integrator(double xi) {
  if (xi == 0.0 || !std::isfinite(xi)) throw Error("single-integrator requires a finite xi != 0");
  ProblemSpec s;
  s.name = "single-integrator";
  s.n = 1;
  s.r = 1;
  s.dynamics = {Expr::parse("u1")};
  s.horizon = FreeHorizon{0.05 * std::fabs(xi), 3.0 * std::fabs(xi)};
  s.initial_state = {xi};
  s.terminal_state = {0.0};
  s.control_lo = {-1.0};
  s.control_hi = {1.0};
  s.objectives = {integral("time", "1"), integral("fuel", "abs(u1)")};
  return s;
}

ProblemSpec rocket_car_base() {
  ProblemSpec s;
  s.name = "rocket-car";
  s.n = 2;
  s.r = 1;
  s.dynamics = {Expr::parse("x2"), Expr::parse("u1")};
  s.horizon = FreeHorizon{0.1, 10.0};
  s.initial_state = {1.0, 0.0};
  s.terminal_state = {0.0, std::nullopt};
  s.path_constraints = {Expr::parse("x1 - 3"), Expr::parse("-x1 - 3")};
  s.control_lo = {-1.0};
  s.control_hi = {1.0};
  s.objectives = {integral("time", "1"), integral("speed", "-u1")};
  return s;
}

ProblemSpec frozen() {
  ProblemSpec s;
  s.name = "frozen";
  s.n = 1;
  s.r = 1;
  s.dynamics = {Expr::parse("0")};
  s.horizon = FixedHorizon{2.0};
  s.initial_state = {0.5};
  s.terminal_state = {std::nullopt};
  s.control_lo = {-1.0};
  s.control_hi = {1.0};
  s.objectives = {integral("quadratic", "t^2 + x1"), integral("zero", "0")};
  return s;
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"single-integrator", "rocket-car", "rocket-car-weighted", "rocket-car-pnorm", "rocket-car-slow",
          "frozen"};
}

ProblemSpec load_catalog(std::string_view name, const CatalogOptions& options) {
  if (name == "single-integrator") return single_integrator(options.xi);
  if (name == "frozen") return frozen();
  if (name.starts_with("rocket-car")) {
    ProblemSpec s = rocket_car_base();
    if (name == "rocket-car") {
      s.objectives.push_back(integral("time+speed", "1 - u1", "y1 + y2"));
      return s;
    }
    s.name = std::string(name);
    if (name == "rocket-car-weighted") {
      s.objectives.push_back(integral("weighted", "0.3 - 0.7*u1", "0.3*y1 + 0.7*y2"));
      return s;
    }
    if (name == "rocket-car-pnorm") {
      s.objectives.push_back(derived("pnorm", "((y1 - sqrt(2))^2 + (y2 + sqrt(6))^2)^(1/2)"));
      return s;
    }
    if (name == "rocket-car-slow") {
      s.objectives.push_back(integral("slowness", "-1", "-y1"));
      return s;
    }
  }
  throw Error("unknown catalog problem '" + std::string(name) + "'");
}

}  // namespace nonessential
