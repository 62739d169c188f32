//===- report.cpp - Text and JSON rendering -------------------------------===//

#include "ecdiff/report.hpp"

#include <sstream>

namespace ecdiff {

std::string edgeText(const RfEdge &E, const Program &P) {
  return "(" + P.name(E.first) + "," + P.name(E.second) + ")";
}

std::string tupleText(const RfTuple &T, const Program &P) {
  if (T.size() == 1)
    return edgeText(T.front(), P);
  std::string Out = "[";
  for (std::size_t I = 0; I < T.size(); ++I)
    Out += (I ? " -> " : "") + edgeText(T[I], P);
  return Out + "]";
}

nlohmann::json tupleJson(const RfTuple &T, const Program &P) {
  nlohmann::json J = nlohmann::json::array();
  for (auto &[S, L] : T)
    J.push_back({P.name(S), P.name(L)});
  return J;
}

nlohmann::json tupleSetJson(const std::set<RfTuple> &Set, const Program &P) {
  // Sorted by rendered names so that output does not depend on ids.
  std::set<nlohmann::json> Sorted;
  for (const RfTuple &T : Set)
    Sorted.insert(tupleJson(T, P));
  return nlohmann::json(std::vector<nlohmann::json>(Sorted.begin(), Sorted.end()));
}

namespace {

nlohmann::json pairsJson(const StmtPairSet &Set, const Program &P) {
  std::set<std::vector<std::string>> Sorted;
  for (auto &[A, B] : Set)
    Sorted.insert({P.name(A), P.name(B)});
  return nlohmann::json(Sorted);
}

void listTuples(std::ostream &OS, const std::set<RfTuple> &Set, const Program &P) {
  if (Set.empty()) {
    OS << "  (none)\n";
    return;
  }
  std::set<std::string> Lines;
  for (const RfTuple &T : Set)
    Lines.insert(tupleText(T, P));
  for (const std::string &L : Lines)
    OS << "  " << L << "\n";
}

} // namespace

nlohmann::json analysisJson(const StaticAbstractTrace &T, const Program &P) {
  nlohmann::json J;
  J["rank"] = T.rank;
  J["mustHb"] = pairsJson(T.mustHb, P);
  J["mayHb"] = pairsJson(T.mayHb, P);
  J["noRf"] = pairsJson(T.noRf, P);
  J["mayRf"] = pairsJson(T.mayRf, P);
  if (T.rank >= 2) {
    J["mayRfs"] = tupleSetJson(T.tuples(2), P);
    J["noRfs"] = tupleSetJson(T.noRfs, P);
  }
  if (T.rank >= 3)
    J["mayRfs3"] = tupleSetJson(T.tuples(3), P);
  J["warnings"] = T.warnings;
  return J;
}

std::string analysisText(const StaticAbstractTrace &T, const Program &P) {
  std::ostringstream OS;
  OS << "rank: " << T.rank << "\n";
  OS << "mustHb: " << T.mustHb.size() << "  mayHb: " << T.mayHb.size()
     << "  noRf: " << T.noRf.size() << "  mayRf: " << T.mayRf.size() << "\n";
  std::set<RfTuple> Edges;
  for (const RfEdge &E : T.mayRf)
    Edges.insert({E});
  OS << "mayRf:\n";
  listTuples(OS, Edges, P);
  for (int K = 2; K <= T.rank; ++K) {
    OS << "mayRfs (rank " << K << "): " << T.tuples(K).size() << "\n";
    listTuples(OS, T.tuples(K), P);
  }
  return OS.str();
}

nlohmann::json diffJson(const DiffReport &R, const Program &P1, const Program &P2) {
  nlohmann::json J;
  J["rank_found"] = R.rankFound;
  J["delta12"] = tupleSetJson(R.diff.delta12, P1);
  J["delta21"] = tupleSetJson(R.diff.delta21, P2);
  J["patch_local_12"] = tupleSetJson(R.diff.patchLocal12, P1);
  J["patch_local_21"] = tupleSetJson(R.diff.patchLocal21, P2);
  J["stats"] = {{"mayHb_p1", R.stats.mayHb1}, {"mayHb_p2", R.stats.mayHb2},
                {"mayRf_p1", R.stats.mayRf1}, {"mayRf_p2", R.stats.mayRf2},
                {"millis", R.stats.millis}};
  return J;
}

std::string diffText(const DiffReport &R, const Program &P1, const Program &P2) {
  std::ostringstream OS;
  if (R.rankFound == 0)
    OS << "rank_found: 0 (no difference up to rank " << R.rankEvaluated << ")\n";
  else
    OS << "rank_found: " << R.rankFound << "\n";
  OS << "delta12 (allowed only before the change):\n";
  listTuples(OS, R.diff.delta12, P1);
  OS << "delta21 (allowed only after the change):\n";
  listTuples(OS, R.diff.delta21, P2);
  OS << "patch_local_12:\n";
  listTuples(OS, R.diff.patchLocal12, P1);
  OS << "patch_local_21:\n";
  listTuples(OS, R.diff.patchLocal21, P2);
  OS << "stats: mayHb " << R.stats.mayHb1 << "/" << R.stats.mayHb2 << ", mayRf "
     << R.stats.mayRf1 << "/" << R.stats.mayRf2 << ", " << R.stats.millis << " ms\n";
  return OS.str();
}

namespace {

nlohmann::json groundTupleJson(const GroundTuple &T, const Program &P) {
  nlohmann::json J = nlohmann::json::array();
  for (const GroundEdge &E : T)
    J.push_back({E.kind == GroundEdge::Kind::Rf ? "rf" : "so", P.name(E.from), P.name(E.to)});
  return J;
}

} // namespace

nlohmann::json groundJson(const GroundAbstractTrace &G, const Program &P, bool Full) {
  nlohmann::json J;
  J["rank"] = G.rank;
  J["complete"] = G.complete;
  J["rf_count"] = G.rf.size();
  J["so_count"] = G.so.size();
  J["sets_count"] = G.sets.size();
  J["stats"] = {{"states", G.stats.states},
                {"traces", G.stats.traces},
                {"completed", G.stats.completedTraces},
                {"deadlocked", G.stats.deadlockedTraces},
                {"loop_pruned", G.stats.prunedTraces},
                {"deadlock_witnesses", G.stats.deadlockWitnesses}};
  std::vector<std::string> Failed;
  for (StmtId S : G.stats.failedAsserts)
    Failed.push_back(P.name(S));
  J["stats"]["failed_asserts"] = Failed;
  if (Full) {
    J["rf"] = pairsJson(G.rf, P);
    J["so"] = pairsJson(G.so, P);
    std::set<nlohmann::json> Sorted;
    for (const GroundTuple &T : G.sets)
      Sorted.insert(groundTupleJson(T, P));
    J["sets"] = std::vector<nlohmann::json>(Sorted.begin(), Sorted.end());
  }
  return J;
}

std::string groundText(const GroundAbstractTrace &G, const Program &P) {
  std::ostringstream OS;
  OS << "rank: " << G.rank << (G.complete ? "" : "  (incomplete: budget exhausted)") << "\n";
  OS << "rf: " << G.rf.size() << "  so: " << G.so.size() << "  sets: " << G.sets.size() << "\n";
  OS << "states: " << G.stats.states << "  traces: " << G.stats.traces
     << "  completed: " << G.stats.completedTraces
     << "  deadlocked: " << G.stats.deadlockedTraces
     << "  loop-pruned: " << G.stats.prunedTraces << "\n";
  for (const std::string &W : G.stats.deadlockWitnesses)
    OS << "deadlock: " << W << "\n";
  for (StmtId S : G.stats.failedAsserts)
    OS << "assertion can fail: " << P.name(S) << "\n";
  return OS.str();
}

} // namespace ecdiff
