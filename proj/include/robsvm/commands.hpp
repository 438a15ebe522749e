#pragma once

// Subcommands that orchestrate the library and write JSON-lines reports.

#include "robsvm/config.hpp"
#include "robsvm/kernel.hpp"
#include "robsvm/probabilistic.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace robsvm {

/// train, robust-eval, equivalence-check, calibrate, kernel-train, consistency-exp,
/// pathological-demo.
const std::vector<std::string>& command_names();

/// Runs `command`, writing a header record, result records and a final summary record to
/// `out`. Errors are reported as a final record with "complete": false and a nonzero return.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out);

/// Parsers shared with the command-line tool and the Python module.
NormSpec parse_norm(const std::string& name);
KernelSpec parse_kernel(const std::string& name, int degree, double gamma);
/// point_mass:c | uniform:lo,hi | discrete:c@p,c@p,...
BudgetPrior parse_prior(const std::string& text);

}  // namespace robsvm
