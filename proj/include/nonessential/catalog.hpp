#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nonessential/problem.hpp"

namespace nonessential {

struct CatalogOptions {
  /// Initial state of the single integrator, must be nonzero.
  double xi = 1.0;
};

/// Built-in problems:
///   single-integrator   x' = u, |u| <= 1, x(0) = xi, x(T) = 0, free T;
///                       I1 = time, I2 = fuel (integral of |u|).
///   rocket-car          x1' = x2, x2' = u, |u| <= 1, |x1| <= 3, x(0) = (1, 0),
///                       x1(T) = 0, free T; I1 = time, I2 = -x2(T), I3 = I1 + I2
///                       tagged "y1 + y2".
///   rocket-car-weighted I3 = 0.3 I1 + 0.7 I2 as an integrand, tagged.
///   rocket-car-pnorm    I3 = ((I1 - sqrt 2)^2 + (I2 + sqrt 6)^2)^(1/2), derived.
///   rocket-car-slow     I3 = integral of -1 (rewards long horizons), tagged "-y1".
///   frozen              x' = 0 on a fixed horizon; objective integrands in t only.
ProblemSpec load_catalog(std::string_view name, const CatalogOptions& options = {});

std::vector<std::string> catalog_names();

}  // namespace nonessential
