#pragma once

// Reference implementations kept free of library code, for cross-checking.

#include <cstddef>
#include <vector>

namespace oracle {

using Point = std::vector<double>;

// a is no worse everywhere and better somewhere on the chosen coordinates.
inline bool better(const Point& a, const Point& b, const std::vector<std::size_t>& coords) {
  int no_worse = 0, better_somewhere = 0;
  for (std::size_t c : coords) {
    no_worse += a[c] <= b[c];
    better_somewhere += a[c] < b[c];
  }
  return no_worse == static_cast<int>(coords.size()) && better_somewhere > 0;
}

// Double loop: a point survives when nobody beats it.
inline std::vector<std::size_t> nondominated(const std::vector<Point>& pts, const std::vector<std::size_t>& coords) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < pts.size(); ++j) beaten = beaten || (j != i && better(pts[j], pts[i], coords));
    if (!beaten) keep.push_back(i);
  }
  return keep;
}

// Exact "nonessential" test for coordinate k against base coordinates:
// the nondominated sets over base and over base + {k} coincide.
inline bool same_efficient_sets(const std::vector<Point>& pts, std::vector<std::size_t> base, std::size_t k) {
  const auto a = nondominated(pts, base);
  base.push_back(k);
  return a == nondominated(pts, base);
}

// Single integrator with xi = 1 on a 10-interval grid: every control taking values in
// {-1, 0} per interval, with the interval length chosen so x reaches 0 at T.
// c intervals at -1 force h = 1/c, so T = 10/c and fuel = c * h.
struct BangOff {
  std::vector<int> pattern;  // 0 or -1 per interval
  double time;
  double fuel;
};

inline std::vector<BangOff> single_integrator_grid() {
  std::vector<BangOff> out;
  for (unsigned mask = 1; mask < (1u << 10); ++mask) {
    BangOff b;
    int c = 0;
    for (int k = 0; k < 10; ++k) {
      const int on = (mask >> k) & 1u;
      b.pattern.push_back(on ? -1 : 0);
      c += on;
    }
    const double h = 1.0 / c;
    b.time = 10.0 * h;
    double x = 1.0, fuel = 0.0;
    for (int u : b.pattern) {
      x += u * h;
      fuel += (u < 0 ? -u : u) * h;
    }
    b.fuel = fuel;
    if (x < -1e-12 || x > 1e-12) continue;
    out.push_back(b);
  }
  return out;
}

}  // namespace oracle
