#include "paths.hpp"

namespace ecdiff::testing {

namespace {

using Path = std::vector<StmtId>;

std::vector<Path> sequence(const Program &P, const std::vector<StmtId> &Body, int Unroll);

std::vector<Path> single(const Program &P, StmtId Id, int Unroll) {
  const Stmt &S = P.stmt(Id);
  std::vector<Path> Out;
  if (S.kind == StmtKind::If) {
    for (const auto *Branch : {&S.thenBody, &S.elseBody})
      for (Path &Tail : sequence(P, *Branch, Unroll)) {
        Tail.insert(Tail.begin(), Id);
        Out.push_back(std::move(Tail));
      }
    return Out;
  }
  if (S.kind == StmtKind::While) {
    // W (body W)^i for i = 0..Unroll.
    std::vector<Path> Iter = sequence(P, S.thenBody, Unroll);
    std::vector<Path> Current = {{Id}};
    for (int I = 0;; ++I) {
      Out.insert(Out.end(), Current.begin(), Current.end());
      if (I == Unroll)
        break;
      std::vector<Path> Next;
      for (const Path &Pre : Current)
        for (const Path &B : Iter) {
          Path N = Pre;
          N.insert(N.end(), B.begin(), B.end());
          N.push_back(Id);
          Next.push_back(std::move(N));
        }
      Current = std::move(Next);
    }
    return Out;
  }
  return {{Id}};
}

std::vector<Path> sequence(const Program &P, const std::vector<StmtId> &Body, int Unroll) {
  std::vector<Path> Out = {{}};
  for (StmtId Id : Body) {
    std::vector<Path> Next;
    for (const Path &Head : Out)
      for (const Path &Tail : single(P, Id, Unroll)) {
        Path N = Head;
        N.insert(N.end(), Tail.begin(), Tail.end());
        Next.push_back(std::move(N));
      }
    Out = std::move(Next);
  }
  return Out;
}

} // namespace

std::vector<std::vector<StmtId>> threadPaths(const Program &P, std::size_t Thread, int Unroll) {
  return sequence(P, P.threads[Thread].body, Unroll);
}

PathRelations pathRelations(const Program &P, int Unroll) {
  PathRelations Out;
  for (std::size_t T = 0; T < P.threads.size(); ++T) {
    auto Paths = threadPaths(P, T, Unroll);
    std::vector<StmtId> Stmts = P.threadStmts(T);
    std::set<StmtPair> Before; // a occurs strictly before b on some path
    for (const Path &Pa : Paths)
      for (std::size_t I = 0; I < Pa.size(); ++I)
        for (std::size_t J = I + 1; J < Pa.size(); ++J)
          Before.insert({Pa[I], Pa[J]});
    for (StmtId A : Stmts)
      for (StmtId B : Stmts) {
        bool AB = Before.count({A, B}), BA = Before.count({B, A});
        if (AB && BA)
          Out.loopCarried.insert({A, B});
        if (A == B)
          continue;
        if (AB && !BA)
          Out.po.insert({A, B});
        bool Dominates = true, PostDominates = true;
        for (const Path &Pa : Paths) {
          bool SeenA = false;
          for (StmtId X : Pa) {
            if (X == B && !SeenA)
              Dominates = false;
            SeenA |= X == A;
          }
          bool SeenALater = false;
          for (auto It = Pa.rbegin(); It != Pa.rend(); ++It) {
            if (*It == B && !SeenALater)
              PostDominates = false;
            SeenALater |= *It == A;
          }
        }
        if (Dominates && !BA)
          Out.dom.insert({A, B});
        if (PostDominates && !AB)
          Out.postDom.insert({A, B});
      }
  }
  return Out;
}

} // namespace ecdiff::testing
