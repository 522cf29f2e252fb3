#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nonessential {

/// Exit codes of run_cli.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInfeasible = 2, kExitInternal = 3 };

/// Command-line front end. `args` excludes the program name.
///
///   solve    PROBLEM --objective I [--backend B] [--seed S] [--grid K] [--out CSV]
///   pareto   PROBLEM --indices LIST (--weights M | --eps M [--minimize I]) [--out CSV]
///   analyze  PROBLEM --extra K [--weights M] [--out JSON] [--front CSV]
///   validate FILE
///   export   PROBLEM [--out JSON]
///
/// PROBLEM is a problem file or catalog:NAME. Objective indices are 1-based.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

}  // namespace nonessential
