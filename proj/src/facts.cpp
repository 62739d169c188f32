//===- facts.cpp - Fact extraction ----------------------------------------===//

#include "ecdiff/facts.hpp"

namespace ecdiff {

const std::map<std::string, std::size_t> &baseRelations() {
  static const std::map<std::string, std::size_t> Arities = {
      {"St", 2},        {"Po", 2},         {"Dom", 2},         {"PostDom", 2},
      {"ThrdCreate", 3}, {"ThrdJoin", 3},  {"CondWait", 2},    {"CondSignal", 2},
      {"Load", 2},      {"Store", 2},      {"InCS", 2},        {"SameCS", 3},
      {"DiffCS", 3},    {"Access", 2},     {"GuardedSignalWait", 2},
      {"AdhocOrder", 2}, {"LoopCarried", 2}};
  return Arities;
}

FactBase extractFacts(const Program &P, const Structure &S, const SyncPatterns &Patterns) {
  FactBase F;
  F.po = S.po;
  F.dom = S.dom;
  F.postDom = S.postDom;
  F.loopCarried = S.loopCarried;
  F.guardedSignalWait = Patterns.guardedWait;
  F.adhocOrder = Patterns.adhoc;

  for (const Stmt &X : P.stmts) {
    const std::string &Thread = P.threads[X.thread].name;
    F.st.insert({X.id, Thread});
    switch (X.kind) {
    case StmtKind::Create:
      F.thrdCreate.insert({Thread, X.id, X.target});
      break;
    case StmtKind::Join:
      F.thrdJoin.insert({Thread, X.id, X.target});
      break;
    case StmtKind::Wait:
      F.condWait.insert({X.id, X.target});
      break;
    case StmtKind::Signal:
      F.condSignal.insert({X.id, X.target});
      break;
    default:
      break;
    }
    for (const std::string &V : X.reads) {
      F.load.insert({X.id, V});
      F.access.insert({V, X.id});
    }
    if (X.writes) {
      F.store.insert({X.id, *X.writes});
      F.access.insert({*X.writes, X.id});
    }
  }

  std::map<std::string, std::vector<std::pair<StmtId, Region>>> ByLock;
  for (auto &[Key, R] : S.regions) {
    F.inCS.insert({Key.first, Key.second});
    ByLock[Key.second].push_back({Key.first, R});
  }
  for (auto &[Lock, Members] : ByLock)
    for (auto &[A, RA] : Members)
      for (auto &[B, RB] : Members)
        (RA == RB ? F.sameCS : F.diffCS).insert({A, B, Lock});
  return F;
}

FactBase extractFacts(const Program &P) {
  Structure S = buildStructure(P);
  return extractFacts(P, S, detectSyncPatterns(P, S));
}

std::map<std::string, std::set<datalog::Tuple>> FactBase::render(const Program &P) const {
  std::map<std::string, std::set<datalog::Tuple>> Out;
  for (auto &[Name, Arity] : baseRelations())
    Out[Name];
  auto n = [&](StmtId Id) { return P.name(Id); };
  auto pairs = [&](const char *Rel, const StmtPairSet &Set) {
    for (auto &[A, B] : Set)
      Out[Rel].insert({n(A), n(B)});
  };
  auto stmtName = [&](const char *Rel, const StmtVarSet &Set) {
    for (auto &[A, V] : Set)
      Out[Rel].insert({n(A), V});
  };
  auto threadEdges = [&](const char *Rel, const ThreadEdgeSet &Set) {
    for (auto &[T1, S, T2] : Set)
      Out[Rel].insert({T1, n(S), T2});
  };
  auto triples = [&](const char *Rel, const StmtStmtNameSet &Set) {
    for (auto &[A, B, L] : Set)
      Out[Rel].insert({n(A), n(B), L});
  };
  stmtName("St", st);
  pairs("Po", po);
  pairs("Dom", dom);
  pairs("PostDom", postDom);
  threadEdges("ThrdCreate", thrdCreate);
  threadEdges("ThrdJoin", thrdJoin);
  stmtName("CondWait", condWait);
  stmtName("CondSignal", condSignal);
  stmtName("Load", load);
  stmtName("Store", store);
  stmtName("InCS", inCS);
  triples("SameCS", sameCS);
  triples("DiffCS", diffCS);
  for (auto &[V, S] : access)
    Out["Access"].insert({V, n(S)});
  pairs("GuardedSignalWait", guardedSignalWait);
  pairs("AdhocOrder", adhocOrder);
  pairs("LoopCarried", loopCarried);
  return Out;
}

datalog::Database FactBase::toDatabase(const Program &P) const {
  datalog::Database Db;
  for (auto &[Name, Arity] : baseRelations())
    Db.declare(Name, Arity);
  for (auto &[Name, Tuples] : render(P))
    for (const auto &T : Tuples)
      Db.insert(Name, T);
  return Db;
}

nlohmann::json FactBase::toJson(const Program &P) const {
  nlohmann::json J = nlohmann::json::object();
  for (auto &[Name, Tuples] : render(P)) {
    nlohmann::json Rows = nlohmann::json::array();
    for (const auto &T : Tuples)
      Rows.push_back(T);
    J[Name] = std::move(Rows);
  }
  return J;
}

} // namespace ecdiff
