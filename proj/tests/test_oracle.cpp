#include "ecdiff/oracle.hpp"

#include "fixtures.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace ecdiff;
using namespace ecdiff::testing;

namespace {

OracleOptions options(int Bound, int Rank, bool StoreOrder = true) {
  OracleOptions O;
  O.loopBound = Bound;
  O.rank = Rank;
  O.storeOrder = StoreOrder;
  return O;
}

const char *HandOff = R"(
var x = 0;
var y = 0;
thread main { create(u); A: x = 1; join(u); B: assert(x); }
thread u { R: y = x; }
)";

} // namespace

TEST(Enumerate, HandComputedSchedules) {
  Program P = parse(HandOff);
  auto Traces = enumerate(P, options(3, 1));
  // R runs either before or after A; join waits for R.
  ASSERT_EQ(Traces.size(), 2u);
  for (const GroundTrace &T : Traces) {
    EXPECT_TRUE(T.completed);
    EXPECT_FALSE(T.deadlocked);
    EXPECT_EQ(T.events.size(), P.size());
  }
  GroundAbstractTrace G = groundAbstractTrace(P, Traces, 1);
  EXPECT_EQ(G.rf, (StmtPairSet{pairOf(P, "__init_x", "R"), pairOf(P, "A", "R"),
                                pairOf(P, "A", "B")}));
  EXPECT_EQ(G.so, (StmtPairSet{pairOf(P, "__init_x", "A"), pairOf(P, "__init_y", "R")}));
  EXPECT_EQ(G.stats.completedTraces, 2);
}

TEST(Enumerate, OrderedPairsFollowTraceOrder) {
  Program P = parse(HandOff);
  GroundAbstractTrace G = groundAbstractTrace(P, enumerate(P, options(3, 2, false)), 2);
  auto Pairs = G.rfTuples(2);
  EXPECT_TRUE(Pairs.count({pairOf(P, "A", "R"), pairOf(P, "A", "B")}));
  EXPECT_FALSE(Pairs.count({pairOf(P, "A", "B"), pairOf(P, "A", "R")}));
  EXPECT_TRUE(Pairs.count({pairOf(P, "__init_x", "R"), pairOf(P, "A", "B")}));
  for (const GroundTuple &T : G.sets)
    EXPECT_TRUE(G.witness.count(T));
}

TEST(Explore, AgreesWithEnumeration) {
  std::vector<Program> Programs;
  for (const std::string &Name : fixtureNames())
    Programs.push_back(loadFixture(Name));
  std::mt19937 Rng(3);
  for (int I = 0; I < 25; ++I)
    Programs.push_back(parse(randomProgram(Rng, {2, 9, true, true})));
  for (const Program &P : Programs)
    for (int Rank = 1; Rank <= 2; ++Rank) {
      OracleOptions O = options(2, Rank);
      GroundAbstractTrace E = groundAbstractTrace(P, enumerate(P, O), Rank);
      GroundAbstractTrace X = explore(P, O);
      EXPECT_EQ(E.rf, X.rf);
      EXPECT_EQ(E.so, X.so);
      EXPECT_EQ(E.sets, X.sets);
      EXPECT_EQ(E.stats.traces, X.stats.traces);
      EXPECT_EQ(E.stats.completedTraces, X.stats.completedTraces);
      EXPECT_EQ(E.stats.deadlockedTraces, X.stats.deadlockedTraces);
      EXPECT_EQ(E.stats.prunedTraces, X.stats.prunedTraces);
      EXPECT_EQ(E.stats.failedAsserts, X.stats.failedAsserts);
    }
}

TEST(Explore, RankTwoExampleOrderedPairs) {
  Program A = loadFixture("mot3_a"), B = loadFixture("mot3_b");
  auto GA = explore(A, options(2, 2, false)).rfTuples(2);
  auto GB = explore(B, options(2, 2, false)).rfTuples(2);
  RfTuple Fwd = {pairOf(A, "L1", "L2"), pairOf(A, "L1", "L4")};
  RfTuple Back = {pairOf(A, "L1", "L4"), pairOf(A, "L1", "L2")};
  RfTuple BackB = {pairOf(B, "L1", "L4"), pairOf(B, "L1", "L2")};
  EXPECT_TRUE(GA.count(Fwd));
  EXPECT_FALSE(GA.count(Back));
  EXPECT_TRUE(GB.count(BackB));
}

TEST(Explore, FailedAssertionsAreReported) {
  Program A = loadFixture("mot1_a"), B = loadFixture("mot1_b");
  EXPECT_EQ(explore(A, options(2, 1)).stats.failedAsserts,
            std::set<StmtId>{*A.findByName("L3")});
  EXPECT_TRUE(explore(B, options(2, 1)).stats.failedAsserts.empty());
}

TEST(Explore, DeadlocksAndLostWakeups) {
  Program Cross = parse(R"(
lock a; lock b;
thread main { create(u); lock(a); lock(b); unlock(b); unlock(a); join(u); }
thread u { lock(b); lock(a); unlock(a); unlock(b); }
)");
  GroundAbstractTrace G = explore(Cross, options(2, 1));
  EXPECT_GT(G.stats.deadlockedTraces, 0);
  EXPECT_GT(G.stats.completedTraces, 0);
  EXPECT_FALSE(G.stats.deadlockWitnesses.empty());

  Program Lost = parse(R"(
lock a; cond c;
thread main { create(u); lock(a); wait(c, a); unlock(a); join(u); }
thread u { lock(a); signal(c); unlock(a); }
)");
  GroundAbstractTrace L = explore(Lost, options(2, 1));
  EXPECT_GT(L.stats.deadlockedTraces, 0);
  EXPECT_GT(L.stats.completedTraces, 0);

  Program Guarded = loadFixture("mot2_b");
  EXPECT_EQ(explore(Guarded, options(2, 1)).stats.deadlockedTraces, 0);
}

TEST(Explore, LoopBoundPrunesSpinning) {
  Program P = parse("var f = 0;\nthread main { W: while (f == 0) {} }");
  GroundAbstractTrace G = explore(P, options(2, 1));
  EXPECT_EQ(G.stats.completedTraces, 0);
  EXPECT_EQ(G.stats.prunedTraces, 1);
  StaticAbstractTrace S = analyze(P);
  EXPECT_THROW(checkSoundness(S, G), OracleError);

  Program Hand = loadFixture("adhoc");
  GroundAbstractTrace H = explore(Hand, options(2, 1));
  EXPECT_GT(H.stats.completedTraces, 0);
  EXPECT_TRUE(H.rf.count(pairOf(Hand, "P1", "R")));
  EXPECT_FALSE(H.rf.count(pairOf(Hand, "__init_a", "R")));
}

TEST(Explore, BudgetExhaustion) {
  Program P = loadFixture("mot2_a");
  OracleOptions O = options(2, 1);
  O.budget = 5;
  GroundAbstractTrace G = explore(P, O);
  EXPECT_FALSE(G.complete);
  EXPECT_THROW(checkSoundness(analyze(P), G), OracleError);
  bool Complete = true;
  enumerate(P, O, &Complete);
  EXPECT_FALSE(Complete);
}

TEST(Soundness, FixturesHaveNoViolations) {
  for (const std::string &Name : fixtureNames()) {
    Program P = loadFixture(Name);
    SoundnessReport R = checkSoundness(analyze(P, {2, true}), explore(P, options(2, 2, false)));
    EXPECT_TRUE(R.ok()) << Name;
  }
}

TEST(Soundness, ReportsMissingEdgesAndMismatches) {
  Program P = loadFixture("mot1_a");
  StaticAbstractTrace S = analyze(P);
  GroundAbstractTrace G = explore(P, options(2, 1));
  S.mayRf.erase(pairOf(P, "L5", "L2"));
  SoundnessReport R = checkSoundness(S, G);
  EXPECT_EQ(R.missingRf, std::vector<RfEdge>{pairOf(P, "L5", "L2")});
  EXPECT_THROW(checkSoundness(analyze(P, {2, true}), G), OracleError);
  EXPECT_THROW(checkSoundness(analyze(loadFixture("mot1_b")), G), OracleError);
  EXPECT_THROW(explore(P, options(0, 1)), OracleError);
  EXPECT_THROW(explore(P, options(1, 4)), OracleError);
}
