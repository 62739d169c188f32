//===- oracle.hpp - Exhaustive interleaving enumeration ---------*- C++ -*-===//
//
// Sequentially consistent execution of a program under every schedule,
// with a per-activation loop bound. Produces the exact read-from and store
// order edges and the ordered edge tuples occurring within single traces.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "ecdiff/frontend.hpp"
#include "ecdiff/rules.hpp"

#include <compare>
#include <stdexcept>

namespace ecdiff {

struct GroundEdge {
  enum class Kind { Rf, So };
  Kind kind = Kind::Rf;
  StmtId from; // store (rf) or earlier store (so)
  StmtId to;   // load (rf) or later store (so)
  friend auto operator<=>(const GroundEdge &, const GroundEdge &) = default;
};

using GroundTuple = std::vector<GroundEdge>;

/// One maximal schedule. Edges realized by one event share its position.
struct GroundTrace {
  std::vector<StmtId> events;
  std::vector<std::pair<std::size_t, GroundEdge>> edges; // (event index, edge)
  bool completed = false;   // every created thread finished
  bool deadlocked = false;
  bool loopPruned = false;  // some thread stopped at the loop bound
  std::vector<StmtId> failedAsserts;
};

struct OracleOptions {
  int loopBound = 3;
  int rank = 1;
  /// Also record store-order edges.
  bool storeOrder = true;
  /// Abort after this many distinct states (explore) or traces (enumerate).
  std::size_t budget = 2'000'000;
};

struct OracleStats {
  std::size_t states = 0;
  double traces = 0;           // maximal schedules
  double completedTraces = 0;
  double deadlockedTraces = 0;
  double prunedTraces = 0;
  std::vector<std::string> deadlockWitnesses;
  std::set<StmtId> failedAsserts;
};

struct GroundAbstractTrace {
  int rank = 1;
  std::string fingerprint;
  StmtPairSet rf;
  StmtPairSet so;
  /// Distinct-edge tuples of length 1..rank in the order realized.
  std::set<GroundTuple> sets;
  /// For tuples built from enumerate(): index of a witnessing trace.
  std::map<GroundTuple, std::size_t> witness;
  bool complete = true;
  OracleStats stats;

  /// Tuples of exactly length K consisting of read-from edges only.
  std::set<RfTuple> rfTuples(int K) const;
};

class OracleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// All maximal schedules, without state merging. `Complete` is cleared when
/// the trace budget runs out.
std::vector<GroundTrace> enumerate(const Program &P, const OracleOptions &Opts,
                                   bool *Complete = nullptr);

GroundAbstractTrace groundAbstractTrace(const Program &P, const std::vector<GroundTrace> &Traces,
                                        int Rank);

/// Same result as groundAbstractTrace(enumerate(...)) computed over the
/// memoized state graph.
GroundAbstractTrace explore(const Program &P, const OracleOptions &Opts);

struct SoundnessReport {
  std::vector<RfEdge> missingRf;
  std::vector<RfTuple> missingTuples;
  bool ok() const { return missingRf.empty() && missingTuples.empty(); }
};

/// Ground read-from edges and tuples the static trace fails to cover.
SoundnessReport checkSoundness(const StaticAbstractTrace &Static,
                               const GroundAbstractTrace &Ground);

} // namespace ecdiff
