// cli.hpp — Command-line front end: run, audit, spectra, bench, sweep, export

#pragma once

#include "fermidyn/run.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fermidyn {

// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,             // also returned when the run flags a physicality violation
    kExitInternal = 1,
    kExitUsage = 2,
    kExitConfig = 3,
    kExitNumerical = 4,      // stiffness, quadrature failure, Pauli factor out of range
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Human-readable summary of a finished run.
std::string run_report(const RunResult& r);

}  // namespace fermidyn
