//===- check.hpp - Static results against the oracle ------------*- C++ -*-===//

#pragma once

#include "ecdiff/diff.hpp"
#include "ecdiff/oracle.hpp"

namespace ecdiff {

struct CheckOptions {
  int loopBound = 3;
  int maxRank = 3;
  LabelMap explicitMap;
  std::size_t budget = 2'000'000;
};

struct VersionCheck {
  StaticAbstractTrace analysis;
  GroundAbstractTrace ground;
  SoundnessReport soundness;
  std::optional<std::string> error; // ground truth unusable
};

struct CheckReport {
  DiffReport diff;
  VersionCheck first;
  VersionCheck second;
  /// Delta tuples the oracle does not confirm.
  std::vector<std::string> inconsistencies;

  bool sound() const {
    return !first.error && !second.error && first.soundness.ok() && second.soundness.ok();
  }
};

/// Delta tuples of R not witnessed by G1, or witnessed by G2 (and the
/// symmetric conditions for delta21).
std::vector<std::string> checkConsistency(const DiffReport &R, const Program &P1,
                                          const Program &P2, const GroundAbstractTrace &G1,
                                          const GroundAbstractTrace &G2);

CheckReport runCheck(const Program &P1, const Program &P2, const CheckOptions &Opts);

} // namespace ecdiff
