#pragma once

/**
 * @file
 * @brief Dominance, efficient subsets of finite archives, and front generation
 * by weight sweeps and epsilon-constraint grids.
 *
 * Objective indices are 0-based.
 */

#include <cstddef>
#include <span>
#include <vector>

#include "nonessential/problem.hpp"
#include "nonessential/solver.hpp"

namespace nonessential {

/// a <= b componentwise with at least one strict inequality. Exact arithmetic.
/// Throws Error on a length mismatch.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Dominance restricted to `indices`.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b, std::span<const std::size_t> indices);

/// Positions of the points not dominated by any other point over `indices`.
///
/// With tol > 0, `o` removes `m` only if o_i <= m_i + tol on every index and
/// o_j < m_j - tol on some index, so points that agree within tol survive
/// together. tol = 0 is plain dominance.
std::vector<std::size_t> efficient_indices(std::span<const ObjectiveVector> points,
                                           std::span<const std::size_t> indices, double tol = 0.0);

/// 0, 1, ..., N-1.
std::vector<std::size_t> all_indices(std::size_t N);

/// Finite set of feasible solutions with pairwise different decision vectors.
class ParetoArchive {
 public:
  explicit ParetoArchive(double tol_obj = 1e-6) : tol_obj_(tol_obj) {}

  /// Adds `s` unless a member has the same controls and T. Returns the position
  /// of the member holding that decision vector.
  std::size_t insert(Solution s);
  void merge(const ParetoArchive& other);

  /// Position of the member with the same decision vector, or size().
  std::size_t find(const Solution& s) const;

  const std::vector<Solution>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const Solution& operator[](std::size_t i) const { return members_[i]; }
  double tol_obj() const noexcept { return tol_obj_; }

  std::vector<ObjectiveVector> objective_vectors() const;

  /// Keeps only efficient_subset(indices), preserving order.
  void prune(std::span<const std::size_t> indices);

 private:
  double tol_obj_;
  std::vector<Solution> members_;
};

/// Members not dominated over `indices`, compared with the archive's tol_obj.
std::vector<Solution> efficient_subset(const ParetoArchive& archive, std::span<const std::size_t> indices);
std::vector<std::size_t> efficient_positions(const ParetoArchive& archive, std::span<const std::size_t> indices);

/// All weight vectors with entries m / (grid + 1), m >= 1, summing to 1 over
/// `count` entries.
std::vector<std::vector<double>> interior_weights(std::size_t count, int grid);

/// Solves minimize_weighted for every interior weight over `indices` (zero on
/// the other objectives), collects each result set, and prunes to the
/// efficient subset over `indices`.
ParetoArchive sweep_weights(const ProblemSpec& spec, std::span<const std::size_t> indices, int grid,
                            const SolverConfig& cfg, double tol_obj = 1e-6);

/// Epsilon-constraint scan minimizing objective `i`. Bounds on the other
/// objectives in `indices` step uniformly from their minimum to their largest
/// value at the other minimizers. The archive holds each minimizer's best
/// solution and every cell's result set. Cells with no feasible point are skipped.
ParetoArchive sweep_eps(const ProblemSpec& spec, std::span<const std::size_t> indices, std::size_t i, int grid,
                        const SolverConfig& cfg, double tol_obj = 1e-6);

}  // namespace nonessential
