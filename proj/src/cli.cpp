#include "nonessential/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nonessential/analyzer.hpp"
#include "nonessential/catalog.hpp"
#include "nonessential/error.hpp"
#include "nonessential/io.hpp"
#include "nonessential/pareto.hpp"
#include "nonessential/solver.hpp"

namespace nonessential {

namespace {

struct UsageError : Error {
  using Error::Error;
};

constexpr std::string_view kCatalogPrefix = "catalog:";

// Flags shared by the solving subcommands; unset flags keep the problem file's values.
struct SolverFlags {
  std::string backend;
  std::uint64_t seed = 0;
  int grid = 0;
  int starts = 0;
  std::size_t threads = 0;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--backend", backend, "gradient or switchtime")->check(CLI::IsMember({"gradient", "switchtime"}));
    seed_opt = app->add_option("--seed", seed, "random seed");
    app->add_option("--grid", grid, "number of control intervals K")->check(CLI::PositiveNumber);
    app->add_option("--starts", starts, "random starts per local search")->check(CLI::PositiveNumber);
    app->add_option("--threads", threads, "worker threads (0 = NONESSENTIAL_THREADS or all cores)");
  }

  SolverConfig apply(SolverConfig cfg) const {
    if (!backend.empty()) cfg.backend = backend == "gradient" ? Backend::Gradient : Backend::SwitchTime;
    if (seed_opt && seed_opt->count()) cfg.seed = seed;
    if (grid) cfg.K = grid;
    if (starts) cfg.starts = starts;
    if (threads) cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

ProblemFile open_problem(const std::string& source, double xi) {
  if (source.starts_with(kCatalogPrefix)) {
    ProblemFile f;
    try {
      f.spec = load_catalog(source.substr(kCatalogPrefix.size()), CatalogOptions{xi});
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return f;
  }
  return load_problem(source);
}

std::size_t objective_index(int one_based, const ProblemSpec& spec, const char* flag) {
  if (one_based < 1 || static_cast<std::size_t>(one_based) > spec.objective_count())
    throw UsageError(std::string(flag) + " must be between 1 and " + std::to_string(spec.objective_count()));
  return static_cast<std::size_t>(one_based - 1);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiobjective optimal control: Pareto fronts and nonessential objectives"};
  app.require_subcommand(1);
  app.fallthrough();
  double xi = 1.0;
  app.add_option("--xi", xi, "initial state of catalog:single-integrator");

  std::string problem;
  SolverFlags flags;

  auto* solve = app.add_subcommand("solve", "minimize one objective");
  int objective = 0;
  std::string trajectory = "trajectory.csv";
  solve->add_option("problem", problem, "problem file or catalog:NAME")->required();
  solve->add_option("--objective", objective, "objective to minimize (1-based)")->required();
  solve->add_option("--out", trajectory, "trajectory CSV");
  flags.add(solve);

  auto* pareto = app.add_subcommand("pareto", "compute an efficient front");
  std::vector<int> indices;
  int weights = 0, eps = 0, minimize_index = 0;
  std::string front = "front.csv";
  pareto->add_option("problem", problem, "problem file or catalog:NAME")->required();
  pareto->add_option("--indices", indices, "objectives spanning the front, e.g. 1,2")->delimiter(',')->required();
  auto* wopt = pareto->add_option("--weights", weights, "weight grid M")->check(CLI::PositiveNumber);
  auto* eopt = pareto->add_option("--eps", eps, "epsilon grid M")->check(CLI::Range(2, 1000000));
  wopt->excludes(eopt);
  pareto->add_option("--minimize", minimize_index, "objective minimized by --eps (default: first index)");
  pareto->add_option("--out", front, "front CSV");
  flags.add(pareto);

  auto* analyze_cmd = app.add_subcommand("analyze", "decide whether an objective is nonessential");
  int extra = 0, analyze_weights = 9;
  std::string report = "verdict.json", pool = "archive.csv";
  analyze_cmd->add_option("problem", problem, "problem file or catalog:NAME")->required();
  analyze_cmd->add_option("--extra", extra, "objective under test (1-based)")->required();
  analyze_cmd->add_option("--weights", analyze_weights, "weight grid M of both sweeps")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--out", report, "verdict JSON");
  analyze_cmd->add_option("--front", pool, "CSV of the compared archive, referenced by witness rows");
  flags.add(analyze_cmd);

  auto* validate_cmd = app.add_subcommand("validate", "check a problem file");
  validate_cmd->add_option("file", problem, "problem file")->required();

  auto* export_cmd = app.add_subcommand("export", "write a problem file");
  std::string exported;
  export_cmd->add_option("problem", problem, "problem file or catalog:NAME")->required();
  export_cmd->add_option("--out", exported, "output path (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) {
      load_problem(problem);
      out << "valid\n";
      return kExitOk;
    }

    ProblemFile file = open_problem(problem, xi);

    if (export_cmd->parsed()) {
      const std::string text = dump_problem(file);
      if (exported.empty()) {
        out << text;
      } else {
        write_file(exported, text);
        out << "wrote " << exported << '\n';
      }
      return kExitOk;
    }

    SolverConfig cfg;
    try {
      cfg = flags.apply(file.solver);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const ProblemSpec& spec = file.spec;

    if (solve->parsed()) {
      const auto r = minimize_scalar(spec, objective_index(objective, spec, "--objective"), cfg);
      std::ostringstream csv;
      write_trajectory_csv(csv, r.best);
      write_file(trajectory, csv.str());
      out << "value " << format_number(r.value) << '\n';
      out << "T " << format_number(r.best.T) << '\n';
      out << "near_optimal " << r.all_near_optimal.size() << '\n';
      out << "trajectory " << trajectory << '\n';
      return kExitOk;
    }

    if (pareto->parsed()) {
      if (!wopt->count() && !eopt->count()) throw UsageError("pareto needs --weights M or --eps M");
      std::vector<std::size_t> idx;
      for (int i : indices) idx.push_back(objective_index(i, spec, "--indices"));
      ParetoArchive archive;
      if (wopt->count()) {
        archive = sweep_weights(spec, idx, weights, cfg);
      } else {
        const std::size_t target = minimize_index ? objective_index(minimize_index, spec, "--minimize") : idx.front();
        archive = sweep_eps(spec, idx, target, eps, cfg);
      }
      std::ostringstream csv;
      write_front_csv(csv, archive);
      write_file(front, csv.str());
      out << "points " << archive.size() << '\n';
      out << "front " << front << '\n';
      return kExitOk;
    }

    if (analyze_cmd->parsed()) {
      const std::size_t k = objective_index(extra, spec, "--extra");
      AnalyzeOptions options;
      options.weight_grid = analyze_weights;
      const Verdict v = analyze(spec, k, cfg, options);
      std::ostringstream csv;
      write_front_csv(csv, v.archive);
      write_file(pool, csv.str());
      write_file(report, verdict_json(v, pool));
      out << to_string(v.status) << '\n';
      for (const auto& e : v.evidence) out << "  " << e.test << ": " << to_string(e.outcome) << " (" << e.detail << ")\n";
      out << "verdict " << report << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace nonessential
