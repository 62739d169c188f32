//===- diff.cpp - Statement matching and rank iteration -------------------===//

#include "ecdiff/diff.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

namespace ecdiff {

LabelMap parseLabelMap(std::string_view Text) {
  LabelMap Out;
  std::istringstream In{std::string(Text)};
  std::string Line;
  for (int No = 1; std::getline(In, Line); ++No) {
    if (auto Hash = Line.find('#'); Hash != std::string::npos)
      Line.erase(Hash);
    if (Line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto Arrow = Line.find("->");
    std::istringstream Left(Line.substr(0, Arrow == std::string::npos ? Line.size() : Arrow));
    std::istringstream Right(Arrow == std::string::npos ? "" : Line.substr(Arrow + 2));
    std::string From, To, Extra;
    if (Arrow == std::string::npos || !(Left >> From) || (Left >> Extra) || !(Right >> To) ||
        (Right >> Extra))
      throw DiffError("map line " + std::to_string(No) + ": expected '<label> -> <label>'");
    Out.push_back({From, To});
  }
  return Out;
}

LabelMap readLabelMap(const std::string &Path) {
  std::ifstream In(Path);
  if (!In)
    throw DiffError("cannot open map file " + Path);
  std::ostringstream SS;
  SS << In.rdbuf();
  return parseLabelMap(SS.str());
}

namespace {

std::string signature(const Stmt &S) {
  std::string Sig(kindName(S.kind));
  Sig += "|" + S.target + "|" + S.mutex + "|";
  for (const std::string &R : S.reads)
    Sig += R + ",";
  Sig += "|" + S.writes.value_or("");
  return Sig;
}

void matchSequences(const Program &P1, const Program &P2, const std::vector<StmtId> &A,
                    const std::vector<StmtId> &B, Correspondence &C) {
  std::size_t N = A.size(), M = B.size();
  std::vector<std::vector<std::size_t>> L(N + 1, std::vector<std::size_t>(M + 1, 0));
  for (std::size_t I = N; I-- > 0;)
    for (std::size_t J = M; J-- > 0;)
      L[I][J] = signature(P1.stmt(A[I])) == signature(P2.stmt(B[J]))
                    ? L[I + 1][J + 1] + 1
                    : std::max(L[I + 1][J], L[I][J + 1]);
  for (std::size_t I = 0, J = 0; I < N && J < M;) {
    if (signature(P1.stmt(A[I])) == signature(P2.stmt(B[J]))) {
      C.forward[A[I]] = B[J];
      C.backward[B[J]] = A[I];
      ++I;
      ++J;
    } else if (L[I + 1][J] >= L[I][J + 1]) {
      ++I;
    } else {
      ++J;
    }
  }
}

} // namespace

Correspondence matchStatements(const Program &P1, const Program &P2, const LabelMap &Explicit) {
  Correspondence C;
  for (auto &[From, To] : Explicit) {
    auto A = P1.findByName(From);
    if (!A)
      throw DiffError("map refers to unknown statement " + From + " in the first program");
    auto B = P2.findByName(To);
    if (!B)
      throw DiffError("map refers to unknown statement " + To + " in the second program");
    if (auto It = C.backward.find(*B); It != C.backward.end() && It->second != *A)
      throw DiffError("map sends both " + P1.name(It->second) + " and " + From + " to " + To);
    if (auto It = C.forward.find(*A); It != C.forward.end() && It->second != *B)
      throw DiffError("map sends " + From + " to both " + P2.name(It->second) + " and " + To);
    C.forward[*A] = *B;
    C.backward[*B] = *A;
  }

  for (const Stmt &S : P1.stmts) {
    if (!S.label || C.forward.count(S.id))
      continue;
    auto B = P2.findByName(*S.label);
    if (B && P2.stmt(*B).label && !C.backward.count(*B)) {
      C.forward[S.id] = *B;
      C.backward[*B] = S.id;
    }
  }

  for (std::size_t T1 = 0; T1 < P1.threads.size(); ++T1) {
    auto T2 = P2.findThread(P1.threads[T1].name);
    if (!T2)
      continue;
    auto candidates = [](const Program &P, std::size_t T, const std::map<StmtId, StmtId> &Done) {
      std::vector<StmtId> Out;
      for (StmtId Id : P.threadStmts(T))
        if (!P.stmt(Id).label && !Done.count(Id))
          Out.push_back(Id);
      return Out;
    };
    matchSequences(P1, P2, candidates(P1, T1, C.forward), candidates(P2, *T2, C.backward), C);
  }

  for (const Stmt &S : P1.stmts)
    if (!C.forward.count(S.id))
      C.unmatched1.insert(S.id);
  for (const Stmt &S : P2.stmts)
    if (!C.backward.count(S.id))
      C.unmatched2.insert(S.id);
  return C;
}

std::optional<RfTuple> translateTuple(const RfTuple &T, const std::map<StmtId, StmtId> &M) {
  RfTuple Out;
  for (auto &[A, B] : T) {
    auto IA = M.find(A), IB = M.find(B);
    if (IA == M.end() || IB == M.end())
      return std::nullopt;
    Out.push_back({IA->second, IB->second});
  }
  return Out;
}

namespace {

void oneSide(const std::set<RfTuple> &Mine, const std::set<RfTuple> &Theirs,
             const std::map<StmtId, StmtId> &M, std::set<RfTuple> &Delta,
             std::set<RfTuple> &Local) {
  for (const RfTuple &T : Mine) {
    auto Other = translateTuple(T, M);
    if (!Other)
      Local.insert(T);
    else if (!Theirs.count(*Other))
      Delta.insert(T);
  }
}

} // namespace

TraceDiff diffTraces(const StaticAbstractTrace &T1, const StaticAbstractTrace &T2,
                     const Correspondence &C) {
  if (T1.rank != T2.rank)
    throw DiffError("cannot compare traces of rank " + std::to_string(T1.rank) + " and " +
                    std::to_string(T2.rank));
  TraceDiff D;
  auto S1 = T1.tuples(T1.rank), S2 = T2.tuples(T2.rank);
  oneSide(S1, S2, C.forward, D.delta12, D.patchLocal12);
  oneSide(S2, S1, C.backward, D.delta21, D.patchLocal21);
  return D;
}

DiffReport iterativeDiff(const Program &P1, const Program &P2, const DiffOptions &Opts) {
  if (Opts.maxRank < 1 || Opts.maxRank > 3)
    throw DiffError("maximum rank must be between 1 and 3");
  auto Start = std::chrono::steady_clock::now();
  DiffReport R;
  R.correspondence = matchStatements(P1, P2, Opts.explicitMap);

  AnalysisOptions AO;
  AO.accessRestriction = Opts.accessRestriction;
  auto F1 = std::async(std::launch::async, [&] { return analyze(P1, AO); });
  StaticAbstractTrace T2 = analyze(P2, AO);
  StaticAbstractTrace T1 = F1.get();
  R.stats.mayHb1 = T1.mayHb.size();
  R.stats.mayHb2 = T2.mayHb.size();
  R.stats.mayRf1 = T1.mayRf.size();
  R.stats.mayRf2 = T2.mayRf.size();

  for (int K = 1; K <= Opts.maxRank; ++K) {
    if (K > 1) {
      auto G = std::async(std::launch::async, [&] { raiseRank(P1, T1, K); });
      raiseRank(P2, T2, K);
      G.get();
    }
    R.rankEvaluated = K;
    R.diff = diffTraces(T1, T2, R.correspondence);
    if (!R.diff.delta12.empty() || !R.diff.delta21.empty()) {
      R.rankFound = K;
      break;
    }
  }
  R.stats.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - Start)
                       .count();
  return R;
}

} // namespace ecdiff
