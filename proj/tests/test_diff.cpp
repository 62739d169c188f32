#include "ecdiff/diff.hpp"
#include "ecdiff/report.hpp"

#include "fixtures.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace ecdiff;
using namespace ecdiff::testing;

namespace {

using Rendered = std::set<std::string>;

Rendered render(const std::set<RfTuple> &S, const Program &P) {
  Rendered Out;
  for (const RfTuple &T : S)
    Out.insert(tupleText(T, P));
  return Out;
}

} // namespace

TEST(LabelMap, ParsesLinesAndComments) {
  LabelMap M = parseLabelMap("# header\nL1 -> M1\n\n  L2->M2   # trailing\n");
  EXPECT_EQ(M, (LabelMap{{"L1", "M1"}, {"L2", "M2"}}));
  EXPECT_THROW(parseLabelMap("L1 M1\n"), DiffError);
  EXPECT_THROW(parseLabelMap("L1 -> \n"), DiffError);
  EXPECT_THROW(readLabelMap("/nonexistent/map.txt"), DiffError);
}

TEST(Match, LabelsThenSequenceAlignment) {
  Program A = parse("var x = 0; var y = 0;\nthread main { L: x = 1; y = 2; x = y; }");
  Program B = parse("var x = 0; var y = 0;\nthread main { x = 5; L: x = 1; y = 2; x = y; }");
  Correspondence C = matchStatements(A, B);
  EXPECT_EQ(C.forward.at(*A.findByName("L")), *B.findByName("L"));
  EXPECT_EQ(C.forward.at(*A.findByName("main#3")), *B.findByName("main#4"));
  EXPECT_EQ(C.forward.at(*A.findByName("main#4")), *B.findByName("main#5"));
  EXPECT_EQ(C.unmatched2, std::set<StmtId>{*B.findByName("main#2")});
  EXPECT_TRUE(C.unmatched1.empty());
  for (auto &[X, Y] : C.forward)
    EXPECT_EQ(C.backward.at(Y), X);
}

TEST(Match, ExplicitMapOverridesAndValidates) {
  Program A = parse("var x = 0;\nthread main { A1: x = 1; A2: x = 2; }");
  Program B = parse("var x = 0;\nthread main { B1: x = 1; B2: x = 2; }");
  Correspondence C = matchStatements(A, B, {{"A1", "B2"}, {"A2", "B1"}});
  EXPECT_EQ(C.forward.at(*A.findByName("A1")), *B.findByName("B2"));
  EXPECT_EQ(C.forward.at(*A.findByName("A2")), *B.findByName("B1"));
  EXPECT_THROW(matchStatements(A, B, {{"Z", "B1"}}), DiffError);
  EXPECT_THROW(matchStatements(A, B, {{"A1", "Z"}}), DiffError);
  EXPECT_THROW(matchStatements(A, B, {{"A1", "B1"}, {"A2", "B1"}}), DiffError);
}

TEST(IterativeDiff, MotivatingPairs) {
  struct Case {
    const char *a, *b;
    int rank;
    Rendered d12, d21;
  };
  const Case Cases[] = {
      {"mot1_a", "mot1_b", 1, {"(L5,L2)"}, {}},
      {"mot2_a", "mot2_b", 1, {"(L3,L4)"}, {}},
      {"mot3_a", "mot3_b", 2, {}, {"[(L1,L4) -> (L1,L2)]"}},
  };
  for (const Case &C : Cases) {
    Program A = loadFixture(C.a), B = loadFixture(C.b);
    DiffReport R = iterativeDiff(A, B);
    EXPECT_EQ(R.rankFound, C.rank) << C.a;
    EXPECT_EQ(R.rankEvaluated, C.rank) << C.a;
    EXPECT_EQ(render(R.diff.delta12, A), C.d12) << C.a;
    EXPECT_EQ(render(R.diff.delta21, B), C.d21) << C.a;
  }
}

TEST(IterativeDiff, AddedStatementsArePatchLocal) {
  Program A = loadFixture("mot2_a"), B = loadFixture("mot2_b");
  DiffReport R = iterativeDiff(A, B);
  EXPECT_TRUE(R.diff.patchLocal12.empty());
  EXPECT_EQ(render(R.diff.patchLocal21, B), (Rendered{"(__init_cBool,t1#1)", "(t2#3,t1#1)"}));
}

TEST(IterativeDiff, SelfDiffIsEmptyAtEveryRank) {
  for (const std::string &Name : fixtureNames()) {
    Program P = loadFixture(Name);
    for (int K = 1; K <= 3; ++K) {
      DiffReport R = iterativeDiff(P, P, {K, true, {}});
      EXPECT_EQ(R.rankFound, 0) << Name;
      EXPECT_EQ(R.rankEvaluated, K) << Name;
      EXPECT_TRUE(R.diff.delta12.empty() && R.diff.delta21.empty()) << Name;
    }
  }
}

TEST(IterativeDiff, SwappingVersionsSwapsDeltas) {
  std::vector<std::pair<Program, Program>> Pairs;
  for (auto &[A, B] : fixturePairs())
    Pairs.emplace_back(loadFixture(A), loadFixture(B));
  std::mt19937 Rng(99);
  for (int I = 0; I < 15; ++I) {
    std::string S1 = randomProgram(Rng, {2, 10, true, true});
    std::string S2 = randomProgram(Rng, {2, 10, true, true});
    Pairs.emplace_back(parse(S1), parse(S2));
  }
  for (auto &[A, B] : Pairs) {
    DiffReport F = iterativeDiff(A, B), R = iterativeDiff(B, A);
    EXPECT_EQ(F.rankFound, R.rankFound);
    EXPECT_EQ(render(F.diff.delta12, A), render(R.diff.delta21, A));
    EXPECT_EQ(render(F.diff.delta21, B), render(R.diff.delta12, B));
    EXPECT_EQ(render(F.diff.patchLocal12, A), render(R.diff.patchLocal21, A));
  }
}

TEST(IterativeDiff, RenamedLabelsNeedTheMap) {
  Program A = loadFixture("mot1_a");
  std::string Src = R"(
var x = 0;
lock a;
thread main { create(t1); create(t2); join(t1); join(t2); }
thread t1 { lock(a); M1: x = x + 1; M2: if (x == 0) { M3: assert(0); } unlock(a); }
thread t2 { M4: x = 1; lock(a); M5: x = 0; unlock(a); }
)";
  Program B = parse(Src);
  LabelMap Map;
  for (int I = 1; I <= 5; ++I)
    Map.push_back({"L" + std::to_string(I), "M" + std::to_string(I)});
  DiffReport With = iterativeDiff(A, B, {3, true, Map});
  EXPECT_EQ(With.rankFound, 1);
  EXPECT_EQ(render(With.diff.delta12, A), (Rendered{"(L5,L2)"}));
  DiffReport Without = iterativeDiff(A, B, {1, true, {}});
  EXPECT_EQ(Without.rankFound, 0);
  EXPECT_FALSE(Without.diff.patchLocal12.empty());
}

TEST(IterativeDiff, RejectsBadRank) {
  Program P = loadFixture("mot1_a");
  EXPECT_THROW(iterativeDiff(P, P, {0, true, {}}), DiffError);
  EXPECT_THROW(iterativeDiff(P, P, {4, true, {}}), DiffError);
  StaticAbstractTrace T1 = analyze(P), T2 = analyze(P, {2, true});
  EXPECT_THROW(diffTraces(T1, T2, matchStatements(P, P)), DiffError);
}

TEST(Report, JsonSchema) {
  Program A = loadFixture("mot1_a"), B = loadFixture("mot1_b");
  nlohmann::json J = diffJson(iterativeDiff(A, B), A, B);
  EXPECT_EQ(J["rank_found"], 1);
  EXPECT_EQ(J["delta12"], nlohmann::json::parse(R"([[["L5","L2"]]])"));
  EXPECT_EQ(J["delta21"], nlohmann::json::array());
  for (const char *K : {"mayHb_p1", "mayHb_p2", "mayRf_p1", "mayRf_p2", "millis"})
    EXPECT_TRUE(J["stats"].contains(K)) << K;
  EXPECT_EQ(J["stats"]["mayRf_p1"], 6);
  EXPECT_EQ(J["stats"]["mayRf_p2"], 5);
}
