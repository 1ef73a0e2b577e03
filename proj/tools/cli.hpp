#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fakedet::cli {

/// Runs one subcommand (synth, transform, train, eval, robustness, report).
/// Returns 0 on success, 2 on usage errors and 1 on any other failure;
/// diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace fakedet::cli
