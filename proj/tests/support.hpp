#pragma once

#include <random>
#include <vector>

#include "nonessential/pareto.hpp"

// Archive of bare objective vectors. Member i gets the one-knot control {i}
// so every member has its own decision vector.
inline nonessential::ParetoArchive archive_of(const std::vector<std::vector<double>>& points, double tol = 0.0) {
  nonessential::ParetoArchive archive(tol);
  for (std::size_t i = 0; i < points.size(); ++i) {
    nonessential::Solution s;
    s.grid = {0.0, 1.0};
    s.controls = {{static_cast<double>(i)}};
    s.T = 1.0;
    s.objectives.values = points[i];
    archive.insert(std::move(s));
  }
  return archive;
}

// Integer-valued points make ties and duplicates common.
inline std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t count, std::size_t dims,
                                                      int range) {
  std::uniform_int_distribution<int> v(0, range);
  std::vector<std::vector<double>> out(count, std::vector<double>(dims));
  for (auto& p : out)
    for (double& x : p) x = v(rng);
  return out;
}
