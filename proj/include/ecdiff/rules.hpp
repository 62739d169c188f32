//===- rules.hpp - Happens-before and read-from inference -------*- C++ -*-===//

#pragma once

#include "ecdiff/datalog.hpp"
#include "ecdiff/facts.hpp"
#include "ecdiff/frontend.hpp"

#include <stdexcept>

namespace ecdiff {

/// A read-from edge (store, load); the variable is the one the store writes.
using RfEdge = StmtPair;
/// Ordered tuple of read-from edges.
using RfTuple = std::vector<RfEdge>;

/// Raised when an analysis result breaks one of its own invariants.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct AnalysisOptions {
  int rank = 1;
  /// Restrict MayHb to statements that access globals.
  bool accessRestriction = true;
};

struct StaticAbstractTrace {
  int rank = 1;
  std::string fingerprint;
  StmtPairSet mayRf;
  /// Ordered pairs (rank >= 2) and triples (rank 3) of read-from edges.
  std::set<RfTuple> mayRfSets;
  StmtPairSet mustHb;
  StmtPairSet mayHb;
  StmtPairSet noRf;
  std::set<RfTuple> noRfs;
  FactBase facts;
  datalog::Database db;
  std::vector<std::string> warnings;

  /// Tuples of exactly length K (K = 1 yields singletons of mayRf).
  std::set<RfTuple> tuples(int K) const;
};

datalog::RuleProgram rank1Rules(bool AccessRestriction = true);
datalog::RuleProgram rank2Rules();
datalog::RuleProgram rank3Rules();

StaticAbstractTrace analyze(const Program &P, const AnalysisOptions &Opts = {});

/// Evaluates the higher-rank rules on top of an existing result.
void raiseRank(const Program &P, StaticAbstractTrace &T, int Rank);

/// Derived relation exposed by `--dump`: mustHb, mayHb, mayRf, noRf, mayRfs,
/// noRfs or mayRfs3, or any relation name of the database.
std::vector<datalog::Tuple> dumpRelation(const StaticAbstractTrace &T, const std::string &Name);

} // namespace ecdiff
