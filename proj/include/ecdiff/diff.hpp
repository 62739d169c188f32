//===- diff.hpp - Statement matching and abstract-trace diffs ---*- C++ -*-===//

#pragma once

#include "ecdiff/frontend.hpp"
#include "ecdiff/rules.hpp"

#include <map>
#include <stdexcept>

namespace ecdiff {

class DiffError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Partial bijection between the statements of two versions.
struct Correspondence {
  std::map<StmtId, StmtId> forward;  // P1 -> P2
  std::map<StmtId, StmtId> backward; // P2 -> P1
  std::set<StmtId> unmatched1;
  std::set<StmtId> unmatched2;
};

/// Explicit `name -> name` pairs, names as rendered by Program::name.
using LabelMap = std::vector<std::pair<std::string, std::string>>;

LabelMap parseLabelMap(std::string_view Text);
LabelMap readLabelMap(const std::string &Path);

Correspondence matchStatements(const Program &P1, const Program &P2,
                               const LabelMap &Explicit = {});

/// Maps every statement of T through M; nullopt if one is unmatched.
std::optional<RfTuple> translateTuple(const RfTuple &T, const std::map<StmtId, StmtId> &M);

struct TraceDiff {
  std::set<RfTuple> delta12; // over P1 statements
  std::set<RfTuple> delta21; // over P2 statements
  std::set<RfTuple> patchLocal12;
  std::set<RfTuple> patchLocal21;
};

/// Compares the rank-k tuples of two traces of equal rank.
TraceDiff diffTraces(const StaticAbstractTrace &T1, const StaticAbstractTrace &T2,
                     const Correspondence &C);

struct DiffStats {
  std::size_t mayHb1 = 0, mayHb2 = 0;
  std::size_t mayRf1 = 0, mayRf2 = 0;
  long long millis = 0;
};

struct DiffReport {
  int rankFound = 0;     // 0 when no difference up to the bound
  int rankEvaluated = 0; // last rank compared
  TraceDiff diff;
  DiffStats stats;
  Correspondence correspondence;
};

struct DiffOptions {
  int maxRank = 3;
  bool accessRestriction = true;
  LabelMap explicitMap;
};

/// Raises the rank from 1 until a difference shows up or maxRank is reached.
DiffReport iterativeDiff(const Program &P1, const Program &P2, const DiffOptions &Opts = {});

} // namespace ecdiff
