// Access to the shipped `.cp` fixtures.
#pragma once

#include "ecdiff/frontend.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ecdiff::testing {

inline std::string fixturePath(const std::string &Name) {
  return std::string(ECDIFF_FIXTURE_DIR) + "/" + Name + ".cp";
}

inline Program loadFixture(const std::string &Name) { return parseFile(fixturePath(Name)); }

inline const std::vector<std::string> &fixtureNames() {
  static const std::vector<std::string> Names = {"mot1_a", "mot1_b", "mot2_a", "mot2_b",
                                                 "mot3_a", "mot3_b", "adhoc",  "adhoc_racy"};
  return Names;
}

/// (before, after) pairs.
inline const std::vector<std::pair<std::string, std::string>> &fixturePairs() {
  static const std::vector<std::pair<std::string, std::string>> Pairs = {
      {"mot1_a", "mot1_b"}, {"mot2_a", "mot2_b"}, {"mot3_a", "mot3_b"}, {"adhoc", "adhoc_racy"}};
  return Pairs;
}

/// Statement pair by names, for readable expectations.
inline StmtPair pairOf(const Program &P, const std::string &A, const std::string &B) {
  return {*P.findByName(A), *P.findByName(B)};
}

/// Pairs restricted to statements that carry a user label, rendered by name.
inline std::set<std::pair<std::string, std::string>> labeled(const Program &P,
                                                             const StmtPairSet &S) {
  std::set<std::pair<std::string, std::string>> Out;
  for (auto &[A, B] : S)
    if (P.stmt(A).label && P.stmt(B).label && !P.stmt(A).synthesized && !P.stmt(B).synthesized)
      Out.insert({P.name(A), P.name(B)});
  return Out;
}

} // namespace ecdiff::testing
