#pragma once

/**
 * @file
 * @brief Decides whether one objective can be dropped without changing the
 * efficient set, relative to a finite archive of computed solutions.
 *
 * Every check works on an archive that stands in for the feasible set, so
 * verdicts hold at archive level. `base` lists the objectives kept, `k` is the
 * objective under test. Indices are 0-based.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nonessential/expr.hpp"
#include "nonessential/pareto.hpp"
#include "nonessential/solver.hpp"

namespace nonessential {

enum class Status { Nonessential, Essential, Inconclusive };
enum class Outcome { Pass, Fail, NotApplicable };
enum class Strength { ProofAtArchiveLevel, Heuristic };

const char* to_string(Status s);
const char* to_string(Outcome o);
const char* to_string(Strength s);

struct Evidence {
  std::string test;
  Outcome outcome = Outcome::NotApplicable;
  Strength strength = Strength::ProofAtArchiveLevel;
  /// Positions in the archive the check ran on.
  std::vector<std::size_t> witnesses;
  std::string detail;
};

struct Verdict {
  Status status = Status::Inconclusive;
  std::vector<Evidence> evidence;
  std::string archive_provenance;
  /// Pool every check ran on; witnesses index into it.
  ParetoArchive archive;
  std::vector<std::size_t> base;
  std::size_t extra = 0;
};

/// Compares the efficient subsets over `base` and over base + {k} member by
/// member. Pass means they are equal. Witnesses are members in exactly one set.
Evidence check_efficient_equality(const ParetoArchive& archive, std::span<const std::size_t> base, std::size_t k);

/// For every member efficient over `base`, each member with the same base
/// values (within tol_obj) must also share value k. Witnesses come in pairs.
Evidence check_equal_image(const ParetoArchive& archive, std::span<const std::size_t> base, std::size_t k);

/// Declared composition I_k = phi(y): checks the identity on every probe
/// member, then that phi is nondecreasing over `base` on all ordered probe
/// pairs and on `samples` random ordered pairs from the probe's bounding box.
/// `phi` reads y1..yN as objectives 0..N-1.
Evidence check_monotone_composition(const Expr& phi, const ParetoArchive& probe, std::span<const std::size_t> base,
                          std::size_t k, std::uint64_t seed = 0, int samples = 10000);

/// Unique k-minimizer must be efficient over `base`. Not applicable unless
/// `minimizers` has exactly one member.
Evidence check_unique_minimizer(const ParetoArchive& archive, std::span<const std::size_t> base,
                          std::span<const std::size_t> minimizers);

/// Some k-minimizer must be efficient over `base`.
Evidence check_minimizer_intersection(const ParetoArchive& archive, std::span<const std::size_t> base,
                          std::span<const std::size_t> minimizers);

/// Members whose value k is within tol_obj of the archive minimum.
std::vector<std::size_t> minimizer_members(const ParetoArchive& archive, std::size_t k);

/// Essential on any failed equality, equal-image or minimizer check;
/// nonessential on a passed equality or composition check; else inconclusive.
Status combine(std::span<const Evidence> evidence);

/// All archive-level checks with the k-minimizer set taken from the archive.
Verdict analyze_archive(const ParetoArchive& archive, std::span<const std::size_t> base, std::size_t k,
                        const Expr* phi = nullptr, std::uint64_t seed = 0);

struct AnalyzeOptions {
  int weight_grid = 9;
  double tol_obj = 1e-6;
};

/// Builds the pool from weight sweeps over the objectives without k and over
/// all objectives, plus every objective's scalar minimizers, then runs all
/// checks. The k-minimizer set is minimize_scalar(k).all_near_optimal.
Verdict analyze(const ProblemSpec& spec, std::size_t k, const SolverConfig& cfg, const AnalyzeOptions& options = {});

}  // namespace nonessential
