#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "lvc/error.hpp"

namespace lvc::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,          // bad flags, violated parameter constraints, bad manifest
  kExitDegenerateGap = 3,  // corridor indicator undefined (a12 == a21)
  kExitHorizon = 4,        // convergence not reached before the horizon
  kExitSolver = 5,         // step underflow, invariance breach, re-exit
  kExitIo = 6,
};

int exit_code_for(ErrorKind kind) noexcept;

struct OutputSpec {
  std::string prefix = "lvcorridor";
  bool svg = false;
};

// Throws lvc::Error(InvalidArgument) naming the violated constraint.
void validate(const Experiment& e);

// Runs e, writes its payload files and manifest under out.prefix, and
// returns the exit code. Diagnostics go to diag only.
int execute(const Experiment& e, const OutputSpec& out, std::ostream& diag);

// Full command line (without argv[0]).
int run(const std::vector<std::string>& args, std::ostream& diag);

}  // namespace lvc::cli
