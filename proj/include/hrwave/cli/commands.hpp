#pragma once

#include <iosfwd>

namespace hrwave::cli {

/// Exit statuses of the command-line front end.
enum Status : int { kOk = 0, kFailure = 1, kUsage = 2, kBlowUp = 3 };

/// Subcommands run, converge, compare and plot.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hrwave::cli
