//===- cli.hpp - Command-line driver ----------------------------*- C++ -*-===//

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecdiff {

enum ExitCode : int {
  ExitSame = 0,       // success; no difference up to the rank bound
  ExitDifferent = 1,  // a difference was found
  ExitUsage = 2,      // usage or input error
  ExitInvariant = 3,  // an internal invariant or soundness check failed
};

/// Runs `ecdiff` with Args (excluding the program name).
int runCli(const std::vector<std::string> &Args, std::ostream &Out, std::ostream &Err);

} // namespace ecdiff
