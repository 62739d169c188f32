//===- check.cpp - Soundness and consistency checks -----------------------===//

#include "ecdiff/check.hpp"
#include "ecdiff/report.hpp"

#include <future>

namespace ecdiff {

namespace {

void oneSide(const std::set<RfTuple> &Delta, int Rank, const Program &Mine,
             const GroundAbstractTrace &MineG, const GroundAbstractTrace &TheirG,
             const std::map<StmtId, StmtId> &M, const char *Name,
             std::vector<std::string> &Out) {
  if (Delta.empty())
    return;
  auto Witnessed = MineG.rfTuples(Rank);
  auto Other = TheirG.rfTuples(Rank);
  for (const RfTuple &T : Delta) {
    if (!Witnessed.count(T))
      Out.push_back(std::string(Name) + " " + tupleText(T, Mine) +
                    " is not realized by any schedule of its own version");
    auto X = translateTuple(T, M);
    if (X && Other.count(*X))
      Out.push_back(std::string(Name) + " " + tupleText(T, Mine) +
                    " is realized by a schedule of the other version");
  }
}

VersionCheck checkOne(const Program &P, const CheckOptions &Opts) {
  VersionCheck V;
  AnalysisOptions AO;
  AO.rank = Opts.maxRank;
  V.analysis = analyze(P, AO);
  OracleOptions OO;
  OO.loopBound = Opts.loopBound;
  OO.rank = Opts.maxRank;
  OO.storeOrder = false;
  OO.budget = Opts.budget;
  V.ground = explore(P, OO);
  try {
    V.soundness = checkSoundness(V.analysis, V.ground);
  } catch (const OracleError &E) {
    V.error = E.what();
  }
  return V;
}

} // namespace

std::vector<std::string> checkConsistency(const DiffReport &R, const Program &P1,
                                          const Program &P2, const GroundAbstractTrace &G1,
                                          const GroundAbstractTrace &G2) {
  std::vector<std::string> Out;
  if (R.rankFound == 0)
    return Out;
  if (G1.rank < R.rankFound || G2.rank < R.rankFound)
    throw OracleError("ground truth rank is below the rank of the difference");
  oneSide(R.diff.delta12, R.rankFound, P1, G1, G2, R.correspondence.forward, "delta12", Out);
  oneSide(R.diff.delta21, R.rankFound, P2, G2, G1, R.correspondence.backward, "delta21", Out);
  return Out;
}

CheckReport runCheck(const Program &P1, const Program &P2, const CheckOptions &Opts) {
  CheckReport R;
  DiffOptions DO;
  DO.maxRank = Opts.maxRank;
  DO.explicitMap = Opts.explicitMap;
  R.diff = iterativeDiff(P1, P2, DO);
  auto F = std::async(std::launch::async, [&] { return checkOne(P1, Opts); });
  R.second = checkOne(P2, Opts);
  R.first = F.get();
  R.inconsistencies = checkConsistency(R.diff, P1, P2, R.first.ground, R.second.ground);
  return R;
}

} // namespace ecdiff
