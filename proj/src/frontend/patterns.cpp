//===- patterns.cpp - Signal-wait and busy-wait idioms --------------------===//

#include "ecdiff/frontend.hpp"

#include <map>

namespace ecdiff {
namespace {

struct Parent {
  StmtId stmt;
  bool inThen = true;
};

std::map<std::uint32_t, Parent> parents(const Program &P) {
  std::map<std::uint32_t, Parent> Out;
  for (const Stmt &S : P.stmts) {
    for (StmtId C : S.thenBody)
      Out[C.value] = {S.id, true};
    for (StmtId C : S.elseBody)
      Out[C.value] = {S.id, false};
  }
  return Out;
}

/// Previous statement in the same statement list, if any.
std::optional<StmtId> previousSibling(const Program &P,
                                      const std::map<std::uint32_t, Parent> &Up, StmtId Id) {
  const std::vector<StmtId> *List = nullptr;
  auto It = Up.find(Id.value);
  if (It == Up.end()) {
    List = &P.threads[P.stmt(Id).thread].body;
  } else {
    const Stmt &Par = P.stmt(It->second.stmt);
    List = It->second.inThen ? &Par.thenBody : &Par.elseBody;
  }
  for (std::size_t I = 1; I < List->size(); ++I)
    if ((*List)[I] == Id)
      return (*List)[I - 1];
  return std::nullopt;
}

bool truthy(const Expr &E, const std::string &Var, std::int64_t Value) {
  return evaluate(E, [&](const std::string &N) { return N == Var ? Value : 0; }) != 0;
}

std::vector<const Stmt *> storesTo(const Program &P, const std::string &Var) {
  std::vector<const Stmt *> Out;
  for (const Stmt &S : P.stmts)
    if (!S.synthesized && S.writes == Var)
      Out.push_back(&S);
  return Out;
}

bool inLoop(const Structure &S, StmtId Id) { return S.loopCarried.count({Id, Id}) != 0; }

void guardedWaits(const Program &P, const Structure &St, SyncPatterns &Out) {
  auto Up = parents(P);
  for (const std::string &C : P.conds) {
    std::vector<const Stmt *> Waits, Signals;
    for (const Stmt &S : P.stmts) {
      if (S.kind == StmtKind::Wait && S.target == C)
        Waits.push_back(&S);
      if (S.kind == StmtKind::Signal && S.target == C)
        Signals.push_back(&S);
    }
    if (Waits.empty() || Signals.size() != 1)
      continue;
    const Stmt &Sig = *Signals.front();
    if (inLoop(St, Sig.id))
      continue;

    // Every wait must sit alone under `if (guard(g))` with no else branch.
    std::optional<std::string> Flag;
    std::vector<const Stmt *> Guards;
    bool Ok = true;
    for (const Stmt *W : Waits) {
      auto It = Up.find(W->id.value);
      if (It == Up.end() || !It->second.inThen) {
        Ok = false;
        break;
      }
      const Stmt &If = P.stmt(It->second.stmt);
      if (If.kind != StmtKind::If || If.thenBody.size() != 1 || !If.elseBody.empty() ||
          If.reads.size() != 1 || inLoop(St, If.id) ||
          (Flag && *Flag != *If.reads.begin())) {
        Ok = false;
        break;
      }
      Flag = *If.reads.begin();
      Guards.push_back(&If);
    }
    if (!Ok)
      continue;

    // The only store to the flag comes right before the signal and closes
    // the guard.
    auto Prev = previousSibling(P, Up, Sig.id);
    auto Stores = storesTo(P, *Flag);
    if (!Prev || Stores.size() != 1 || Stores.front()->id != *Prev)
      continue;
    auto Stored = Stores.front()->expr->constantValue();
    if (!Stored || *Stored == 0)
      continue;
    const Global *G = P.findGlobal(*Flag);
    for (const Stmt *If : Guards)
      if (!truthy(*If->expr, *Flag, G->init) || truthy(*If->expr, *Flag, *Stored))
        Ok = false;
    if (!Ok)
      continue;
    for (const Stmt *W : Waits)
      Out.guardedWait.insert({Sig.id, W->id});
  }
}

void busyWaits(const Program &P, const Structure &St, SyncPatterns &Out) {
  for (const Stmt &Loop : P.stmts) {
    if (Loop.kind != StmtKind::While || !Loop.thenBody.empty() || Loop.reads.size() != 1)
      continue;
    const std::string &Flag = *Loop.reads.begin();
    auto Stores = storesTo(P, Flag);
    if (Stores.size() != 1)
      continue;
    const Stmt &Store = *Stores.front();
    if (Store.thread == Loop.thread || inLoop(St, Store.id))
      continue;
    auto V = Store.expr->constantValue();
    const Global *G = P.findGlobal(Flag);
    if (!V || !truthy(*Loop.expr, Flag, G->init) || truthy(*Loop.expr, Flag, *V))
      continue;
    Out.adhoc.insert({Store.id, Loop.id});
  }
}

} // namespace

SyncPatterns detectSyncPatterns(const Program &P, const Structure &S) {
  SyncPatterns Out;
  guardedWaits(P, S, Out);
  busyWaits(P, S, Out);
  return Out;
}

} // namespace ecdiff
