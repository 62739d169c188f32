//===- structure.cpp - CFGs, dominance and critical sections --------------===//

#include "ecdiff/frontend.hpp"
#include "locksets.hpp"

#include <algorithm>

namespace ecdiff {

std::optional<std::size_t> Cfg::local(StmtId Id) const {
  for (std::size_t I = 0; I < nodes.size(); ++I)
    if (nodes[I] == Id)
      return I;
  return std::nullopt;
}

std::optional<Region> Structure::region(StmtId S, const std::string &Lock) const {
  auto It = regions.find({S, Lock});
  if (It == regions.end())
    return std::nullopt;
  return It->second;
}

bool Structure::sameCS(StmtId A, StmtId B, const std::string &Lock) const {
  auto RA = region(A, Lock), RB = region(B, Lock);
  return RA && RB && *RA == *RB;
}

bool Structure::diffCS(StmtId A, StmtId B, const std::string &Lock) const {
  auto RA = region(A, Lock), RB = region(B, Lock);
  return RA && RB && *RA != *RB;
}

//===----------------------------------------------------------------------===//
// Control flow
//===----------------------------------------------------------------------===//

namespace {

class CfgBuilder {
public:
  CfgBuilder(const Program &P, Cfg &G) : P(P), G(G) {}

  void run() {
    G.nodes = P.threadStmts(G.thread);
    for (std::size_t I = 0; I < G.nodes.size(); ++I)
      Local[G.nodes[I].value] = I;
    G.succ.assign(G.numNodes(), {});
    std::size_t First = sequence(P.threads[G.thread].body, G.exit());
    G.succ[G.entry()].push_back(First);
    findBackEdges();
  }

private:
  const Program &P;
  Cfg &G;
  std::map<std::uint32_t, std::size_t> Local;

  void edge(std::size_t From, std::size_t To) {
    auto &S = G.succ[From];
    if (std::find(S.begin(), S.end(), To) == S.end())
      S.push_back(To);
  }

  // Wires a statement list so that control continues at Next; returns the
  // node control enters first.
  std::size_t sequence(const std::vector<StmtId> &Body, std::size_t Next) {
    for (auto It = Body.rbegin(); It != Body.rend(); ++It)
      Next = single(*It, Next);
    return Next;
  }

  std::size_t single(StmtId Id, std::size_t Next) {
    const Stmt &S = P.stmt(Id);
    std::size_t N = Local.at(Id.value);
    switch (S.kind) {
    case StmtKind::If:
      edge(N, sequence(S.thenBody, Next));
      edge(N, sequence(S.elseBody, Next));
      break;
    case StmtKind::While:
      edge(N, sequence(S.thenBody, N));
      edge(N, Next);
      break;
    default:
      edge(N, Next);
      break;
    }
    return N;
  }

  void findBackEdges() {
    enum Color { White, Grey, Black };
    std::vector<Color> C(G.numNodes(), White);
    std::vector<std::pair<std::size_t, std::size_t>> Stack{{G.entry(), 0}};
    C[G.entry()] = Grey;
    while (!Stack.empty()) {
      auto &[N, I] = Stack.back();
      if (I == G.succ[N].size()) {
        C[N] = Black;
        Stack.pop_back();
        continue;
      }
      std::size_t M = G.succ[N][I++];
      if (C[M] == Grey)
        G.backEdges.insert({N, M});
      else if (C[M] == White) {
        C[M] = Grey;
        Stack.push_back({M, 0});
      }
    }
  }
};

using BitMatrix = std::vector<std::vector<bool>>;

/// Reach[a][b]: a path of length >= 1 leads from a to b.
BitMatrix reachability(const Cfg &G) {
  std::size_t N = G.numNodes();
  BitMatrix R(N, std::vector<bool>(N, false));
  for (std::size_t A = 0; A < N; ++A) {
    std::vector<std::size_t> Work(G.succ[A].begin(), G.succ[A].end());
    while (!Work.empty()) {
      std::size_t B = Work.back();
      Work.pop_back();
      if (R[A][B])
        continue;
      R[A][B] = true;
      for (std::size_t C : G.succ[B])
        if (!R[A][C])
          Work.push_back(C);
    }
  }
  return R;
}

/// D[n][m]: m dominates n (reflexive), over the given edge lists.
BitMatrix dominators(std::size_t N, std::size_t Root,
                     const std::vector<std::vector<std::size_t>> &Preds) {
  BitMatrix D(N, std::vector<bool>(N, true));
  D[Root].assign(N, false);
  D[Root][Root] = true;
  bool Changed = true;
  while (Changed) {
    Changed = false;
    for (std::size_t V = 0; V < N; ++V) {
      if (V == Root)
        continue;
      std::vector<bool> New(N, !Preds[V].empty());
      for (std::size_t U : Preds[V])
        for (std::size_t I = 0; I < N; ++I)
          New[I] = New[I] && D[U][I];
      New[V] = true;
      if (New != D[V]) {
        D[V] = std::move(New);
        Changed = true;
      }
    }
  }
  return D;
}

} // namespace

Cfg buildCfg(const Program &P, std::size_t Thread) {
  Cfg G;
  G.thread = Thread;
  CfgBuilder(P, G).run();
  return G;
}

Structure buildStructure(const Program &P) {
  Structure S;
  S.regions = detail::computeRegions(P);
  for (std::size_t T = 0; T < P.threads.size(); ++T) {
    Cfg G = buildCfg(P, T);
    std::size_t N = G.numNodes(), K = G.nodes.size();
    std::vector<std::vector<std::size_t>> Preds(N), Succs(N);
    for (std::size_t A = 0; A < N; ++A)
      for (std::size_t B : G.succ[A]) {
        Preds[B].push_back(A);
        Succs[A].push_back(B);
      }
    BitMatrix R = reachability(G);
    BitMatrix D = dominators(N, G.entry(), Preds);
    BitMatrix PD = dominators(N, G.exit(), Succs);
    for (std::size_t A = 0; A < K; ++A) {
      for (std::size_t B = 0; B < K; ++B) {
        StmtId SA = G.nodes[A], SB = G.nodes[B];
        if (R[A][B] && R[B][A])
          S.loopCarried.insert({SA, SB});
        if (A == B)
          continue;
        if (R[A][B] && !R[B][A])
          S.po.insert({SA, SB});
        if (D[B][A] && !R[B][A])
          S.dom.insert({SA, SB});
        if (PD[B][A] && !R[A][B])
          S.postDom.insert({SA, SB});
      }
    }
    S.cfgs.push_back(std::move(G));
  }
  return S;
}

//===----------------------------------------------------------------------===//
// Locksets
//===----------------------------------------------------------------------===//

namespace detail {
namespace {

/// Held locks with the site of the latest acquisition. The site is unknown
/// where paths holding the lock from different acquisitions merge; such
/// statements get no region for the lock.
using Held = std::map<std::string, std::optional<StmtId>>;

class LocksetWalker {
public:
  LocksetWalker(const Program &P, bool Strict) : P(P), Strict(Strict) {}

  CriticalSectionMap Regions;

  void thread(std::size_t T) {
    Held Out = sequence(P.threads[T].body, {});
    if (Strict && !Out.empty())
      throw FrontendError("lock " + Out.begin()->first + " is still held when thread " +
                          P.threads[T].name + " exits");
  }

private:
  const Program &P;
  bool Strict;

  [[noreturn]] void fail(const Stmt &S, const std::string &Msg) const {
    throw FrontendError(Msg + " (at " + P.name(S.id) + ")", S.line, S.column);
  }

  static std::string describe(const Held &H) {
    std::string Out;
    for (auto &[L, Site] : H)
      Out += (Out.empty() ? "" : ", ") + L;
    return "{" + Out + "}";
  }

  static bool sameLocks(const Held &A, const Held &B) {
    return std::equal(A.begin(), A.end(), B.begin(), B.end(),
                      [](auto &X, auto &Y) { return X.first == Y.first; });
  }

  /// Locks held on both sides; sites kept only where they agree.
  static Held meet(const Held &A, const Held &B) {
    Held Out;
    for (auto &[L, Site] : A) {
      auto It = B.find(L);
      if (It == B.end())
        continue;
      Out.emplace(L, It->second == Site ? Site : std::nullopt);
    }
    return Out;
  }

  Held sequence(const std::vector<StmtId> &Body, Held H) {
    for (StmtId Id : Body)
      H = single(P.stmt(Id), std::move(H));
    return H;
  }

  Held single(const Stmt &S, Held H) {
    for (auto &[L, Site] : H) {
      if (Site)
        Regions[{S.id, L}] = Region{S.thread, L, *Site};
      else
        Regions.erase({S.id, L});
    }
    switch (S.kind) {
    case StmtKind::Lock:
      if (H.count(S.target)) {
        if (Strict)
          fail(S, "lock " + S.target + " re-acquired while held");
        break;
      }
      H[S.target] = S.id;
      break;
    case StmtKind::Unlock:
      if (!H.count(S.target)) {
        if (Strict)
          fail(S, "unlock of " + S.target + " which is not held on every path");
        break;
      }
      H.erase(S.target);
      break;
    case StmtKind::Wait:
      if (!H.count(S.mutex))
        fail(S, "wait on " + S.target + " outside a region holding " + S.mutex);
      H[S.mutex] = S.id;
      break;
    case StmtKind::If: {
      Held Then = sequence(S.thenBody, H);
      Held Else = sequence(S.elseBody, H);
      if (Strict && !sameLocks(Then, Else))
        fail(S, "branches of the if leave different locks held: then-branch " +
                    describe(Then) + ", else-branch " + describe(Else));
      return meet(Then, Else);
    }
    case StmtKind::While: {
      // The state at the loop head only loses information, so this settles
      // after a few passes.
      for (;;) {
        Held Body = sequence(S.thenBody, H);
        if (Strict && !sameLocks(Body, H))
          fail(S, "loop body changes the held locks: " + describe(H) + " before, " +
                      describe(Body) + " after one iteration");
        Held Merged = meet(H, Body);
        if (Merged == H)
          break;
        H = std::move(Merged);
        for (auto &[L, Site] : H) {
          if (Site)
            Regions[{S.id, L}] = Region{S.thread, L, *Site};
          else
            Regions.erase({S.id, L});
        }
      }
      break;
    }
    default:
      break;
    }
    return H;
  }
};

} // namespace

void checkWaits(const Program &P) {
  LocksetWalker W(P, /*Strict=*/false);
  for (std::size_t T = 0; T < P.threads.size(); ++T)
    W.thread(T);
}

CriticalSectionMap computeRegions(const Program &P) {
  LocksetWalker W(P, /*Strict=*/true);
  for (std::size_t T = 0; T < P.threads.size(); ++T)
    W.thread(T);
  return W.Regions;
}

} // namespace detail
} // namespace ecdiff
