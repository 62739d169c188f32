#include "ecdiff/facts.hpp"
#include "ecdiff/rules.hpp"

#include "fixtures.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace ecdiff;
using namespace ecdiff::testing;

namespace {

using NamePairs = std::set<std::pair<std::string, std::string>>;

NamePairs crossThread(const Program &P, const StmtPairSet &S) {
  StmtPairSet Out;
  for (auto &E : S)
    if (P.stmt(E.first).thread != P.stmt(E.second).thread)
      Out.insert(E);
  return labeled(P, Out);
}

/// Labeled edges on one variable.
NamePairs onVariable(const Program &P, const StmtPairSet &S, const std::string &Var) {
  StmtPairSet Out;
  for (auto &E : S)
    if (P.stmt(E.first).writes == Var)
      Out.insert(E);
  return labeled(P, Out);
}

RfTuple tuple(const Program &P, std::initializer_list<std::pair<const char *, const char *>> E) {
  RfTuple Out;
  for (auto &[A, B] : E)
    Out.push_back(pairOf(P, A, B));
  return Out;
}

bool inAccess(const FactBase &F, StmtId S) {
  for (auto &[V, X] : F.access)
    if (X == S)
      return true;
  return false;
}

} // namespace

TEST(Facts, BaseRelationsOfLockedProgram) {
  Program P = loadFixture("mot1_b");
  FactBase F = extractFacts(P);
  StmtId L1 = *P.findByName("L1"), L2 = *P.findByName("L2"), L5 = *P.findByName("L5");
  EXPECT_TRUE(F.st.count({L1, "t1"}));
  EXPECT_TRUE(F.po.count({L1, L2}));
  EXPECT_TRUE(F.load.count({L1, "x"}));
  EXPECT_TRUE(F.store.count({L1, "x"}));
  EXPECT_TRUE(F.inCS.count({L2, "a"}));
  EXPECT_TRUE(F.diffCS.count({L5, L2, "a"}));
  EXPECT_TRUE(F.sameCS.count({L1, L2, "a"}));
  EXPECT_TRUE(F.sameCS.count({L1, L1, "a"}));
  EXPECT_EQ(F.thrdCreate.size(), 2u);
  EXPECT_EQ(F.thrdJoin.size(), 2u);
  for (auto &[V, S] : F.access)
    EXPECT_EQ(V, "x");

  auto Rendered = F.render(P);
  EXPECT_EQ(Rendered.size(), baseRelations().size());
  EXPECT_TRUE(Rendered["DiffCS"].count({"L5", "L2", "a"}));
  EXPECT_EQ(F.toJson(P)["St"].size(), P.size());
}

TEST(Facts, SynchronizationIdiomFacts) {
  Program P = loadFixture("mot2_b");
  FactBase F = extractFacts(P);
  EXPECT_EQ(F.guardedSignalWait.size(), 1u);
  EXPECT_EQ(F.condWait.size(), 1u);
  EXPECT_EQ(F.condSignal.size(), 1u);
  Program Q = loadFixture("adhoc");
  EXPECT_EQ(extractFacts(Q).adhocOrder, StmtPairSet{pairOf(Q, "P2", "W")});
}

TEST(Rank1, MotivatingAtomicityViolation) {
  Program A = loadFixture("mot1_a"), B = loadFixture("mot1_b");
  StaticAbstractTrace TA = analyze(A), TB = analyze(B);
  NamePairs Must = {{"L1", "L2"}, {"L2", "L3"}, {"L1", "L3"}, {"L4", "L5"}};
  EXPECT_EQ(labeled(A, TA.mustHb), Must);
  EXPECT_EQ(labeled(B, TB.mustHb), Must);
  EXPECT_EQ(crossThread(A, TA.mayRf),
            (NamePairs{{"L4", "L1"}, {"L4", "L2"}, {"L5", "L1"}, {"L5", "L2"}}));
  EXPECT_EQ(crossThread(B, TB.mayRf), (NamePairs{{"L4", "L1"}, {"L4", "L2"}, {"L5", "L1"}}));
  // Both versions: L2 may read L1's store in the same thread.
  EXPECT_TRUE(TA.mayRf.count(pairOf(A, "L1", "L2")));
  EXPECT_TRUE(TB.mayRf.count(pairOf(B, "L1", "L2")));
  EXPECT_TRUE(TB.noRf.count(pairOf(B, "L5", "L2")));
}

TEST(Rank1, GuardedWaitForcesOrder) {
  Program B = loadFixture("mot2_b");
  StaticAbstractTrace T = analyze(B);
  for (const char *S : {"L4", "L5"})
    for (const char *D : {"L1", "L2", "L3"})
      EXPECT_TRUE(T.mustHb.count(pairOf(B, S, D))) << S << D;
  // Over the access universe MayHb adds no cross-thread order; L2 reads no
  // global, so it only shows up in MustHb.
  NamePairs May = crossThread(B, T.mayHb), Must = crossThread(B, T.mustHb);
  EXPECT_TRUE(std::includes(Must.begin(), Must.end(), May.begin(), May.end()));
  EXPECT_TRUE(Must.count({"L4", "L2"}));
  EXPECT_FALSE(May.count({"L4", "L2"}));
  EXPECT_FALSE(T.mayRf.count(pairOf(B, "L3", "L4")));

  Program A = loadFixture("mot2_a");
  StaticAbstractTrace TA = analyze(A);
  EXPECT_TRUE(TA.mayRf.count(pairOf(A, "L3", "L4")));
  EXPECT_TRUE(crossThread(A, TA.mayHb).count({"L1", "L4"}));
}

TEST(Rank1, SameEdgesInRankTwoExample) {
  NamePairs Expected = {{"L1", "L2"}, {"L1", "L4"}, {"L5", "L2"}};
  NamePairs Must = {{"L1", "L2"}, {"L1", "L4"}, {"L1", "L5"}, {"L4", "L5"}};
  for (const char *Name : {"mot3_a", "mot3_b"}) {
    Program P = loadFixture(Name);
    StaticAbstractTrace T = analyze(P);
    EXPECT_EQ(onVariable(P, T.mayRf, "x"), Expected) << Name;
    EXPECT_EQ(labeled(P, T.mustHb), Must) << Name;
  }
}

TEST(Rank1, BusyWaitOrdersHandOff) {
  Program P = loadFixture("adhoc");
  StaticAbstractTrace T = analyze(P);
  EXPECT_TRUE(T.mustHb.count(pairOf(P, "P1", "R")));
  EXPECT_TRUE(T.mayRf.count(pairOf(P, "P1", "R")));
  EXPECT_FALSE(T.mayRf.count(pairOf(P, "__init_a", "R")));
  Program Q = loadFixture("adhoc_racy");
  EXPECT_TRUE(analyze(Q).mayRf.count(pairOf(Q, "__init_a", "R")));
}

TEST(Rank2, OrderedPairsOfRankTwoExample) {
  Program A = loadFixture("mot3_a"), B = loadFixture("mot3_b");
  StaticAbstractTrace TA = analyze(A, {2, true}), TB = analyze(B, {2, true});
  RfTuple Fwd = tuple(A, {{"L1", "L2"}, {"L1", "L4"}});
  RfTuple Mid = tuple(A, {{"L1", "L4"}, {"L5", "L2"}});
  RfTuple Back = tuple(A, {{"L1", "L4"}, {"L1", "L2"}});
  EXPECT_TRUE(TA.mayRfSets.count(Fwd));
  EXPECT_TRUE(TA.mayRfSets.count(Mid));
  EXPECT_FALSE(TA.mayRfSets.count(Back));
  EXPECT_TRUE(TA.noRfs.count(Back));
  EXPECT_TRUE(TB.mayRfSets.count(tuple(B, {{"L1", "L4"}, {"L1", "L2"}})));
  // Two different stores cannot both feed one load event.
  EXPECT_FALSE(TA.mayRfSets.count(tuple(A, {{"L1", "L2"}, {"L5", "L2"}})));
}

TEST(Rank3, TriplesAreConsistentWithPairs) {
  for (const std::string &Name : fixtureNames()) {
    Program P = loadFixture(Name);
    StaticAbstractTrace T = analyze(P, {3, true});
    EXPECT_EQ(T.rank, 3);
    for (const RfTuple &E : T.tuples(3)) {
      EXPECT_TRUE(T.mayRfSets.count({E[0], E[1]})) << Name;
      EXPECT_TRUE(T.mayRfSets.count({E[1], E[2]})) << Name;
      EXPECT_TRUE(T.mayRfSets.count({E[0], E[2]})) << Name;
    }
    for (const RfTuple &E : T.tuples(2))
      for (const RfEdge &X : E)
        EXPECT_TRUE(T.mayRf.count(X)) << Name;
  }
}

TEST(Analysis, RaisingRankMatchesDirectAnalysis) {
  Program P = loadFixture("mot3_b");
  StaticAbstractTrace T = analyze(P);
  raiseRank(P, T, 3);
  StaticAbstractTrace D = analyze(P, {3, true});
  EXPECT_EQ(T.mayRfSets, D.mayRfSets);
  EXPECT_EQ(T.db, D.db);
}

TEST(Analysis, InvariantsOnFixturesAndRandomPrograms) {
  std::vector<Program> Programs;
  for (const std::string &Name : fixtureNames())
    Programs.push_back(loadFixture(Name));
  std::mt19937 Rng(5);
  for (int I = 0; I < 40; ++I)
    Programs.push_back(parse(randomProgram(Rng, {2 + I % 2, 12, true, true})));
  for (const Program &P : Programs) {
    StaticAbstractTrace T = analyze(P, {2, true});
    for (auto &E : T.mayRf)
      EXPECT_FALSE(T.noRf.count(E));
    for (auto &[A, B] : T.mustHb)
      if (inAccess(T.facts, A) && inAccess(T.facts, B))
        EXPECT_TRUE(T.mayHb.count({A, B}));
    for (auto &[S, L] : T.mayRf) {
      ASSERT_TRUE(P.stmt(S).writes);
      EXPECT_TRUE(P.stmt(L).reads.count(*P.stmt(S).writes));
      if (S == L)
        EXPECT_TRUE(T.facts.loopCarried.count({S, S}));
    }
  }
}

TEST(Analysis, AccessRestrictionKeepsReadFromEdges) {
  for (const std::string &Name : fixtureNames()) {
    Program P = loadFixture(Name);
    StaticAbstractTrace R = analyze(P, {2, true}), U = analyze(P, {2, false});
    EXPECT_EQ(R.mayRf, U.mayRf) << Name;
    EXPECT_EQ(R.mayRfSets, U.mayRfSets) << Name;
    EXPECT_LE(R.mayHb.size(), U.mayHb.size()) << Name;
  }
}

TEST(Analysis, DeterministicAcrossRuns) {
  Program P = loadFixture("mot2_b");
  StaticAbstractTrace A = analyze(P, {3, true}), B = analyze(parse(R"(
var x = 0;
var y = 0;
var out = 0;
var cBool = 0;
lock a;
cond c;
thread main { create(t1); create(t2); join(t1); join(t2); }
thread t1 { lock(a); if (!cBool) { wait(c, a); } L1: if (x == 0) { L2: assert(0); }
  L3: y = x + 1; unlock(a); }
thread t2 { lock(a); L4: out = y; L5: x = 4; cBool = 1; signal(c); unlock(a); }
)"), {3, true});
  EXPECT_EQ(A.db, B.db);
  EXPECT_EQ(A.fingerprint, B.fingerprint);
}

TEST(Analysis, DumpAliases) {
  Program P = loadFixture("mot1_a");
  StaticAbstractTrace T = analyze(P);
  EXPECT_EQ(dumpRelation(T, "mayRf").size(), T.mayRf.size());
  EXPECT_EQ(dumpRelation(T, "MustHb").size(), T.mustHb.size());
  EXPECT_EQ(dumpRelation(T, "Po").size(), T.facts.po.size());
  EXPECT_THROW(analyze(P, {4, true}), std::range_error);
}
