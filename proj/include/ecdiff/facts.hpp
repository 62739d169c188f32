//===- facts.hpp - Base relations extracted from a program ------*- C++ -*-===//

#pragma once

#include "ecdiff/datalog.hpp"
#include "ecdiff/frontend.hpp"

#include <json.hpp>

#include <tuple>

namespace ecdiff {

using StmtVarSet = std::set<std::pair<StmtId, std::string>>;
using StmtStmtNameSet = std::set<std::tuple<StmtId, StmtId, std::string>>;
using ThreadEdgeSet = std::set<std::tuple<std::string, StmtId, std::string>>;

/// Base relations of one program. Threads, globals, locks and condition
/// variables appear by name; statements by id.
struct FactBase {
  StmtVarSet st;           // St(stmt, thread)
  StmtPairSet po;          // Po(s1, s2)
  StmtPairSet dom;         // Dom(s1, s2)
  StmtPairSet postDom;     // PostDom(s1, s2)
  ThreadEdgeSet thrdCreate; // ThrdCreate(parent, stmt, child)
  ThreadEdgeSet thrdJoin;   // ThrdJoin(parent, stmt, child)
  StmtVarSet condWait;     // CondWait(stmt, cond)
  StmtVarSet condSignal;   // CondSignal(stmt, cond)
  StmtVarSet load;         // Load(stmt, var)
  StmtVarSet store;        // Store(stmt, var)
  StmtVarSet inCS;         // InCS(stmt, lock)
  StmtStmtNameSet sameCS;  // SameCS(s1, s2, lock)
  StmtStmtNameSet diffCS;  // DiffCS(s1, s2, lock)
  std::set<std::pair<std::string, StmtId>> access; // Access(var, stmt)
  StmtPairSet guardedSignalWait; // GuardedSignalWait(signal, wait)
  StmtPairSet adhocOrder;        // AdhocOrder(store, loop)
  StmtPairSet loopCarried;       // LoopCarried(s1, s2)

  /// Relation name -> tuples with statements rendered by Program::name.
  std::map<std::string, std::set<datalog::Tuple>> render(const Program &P) const;
  datalog::Database toDatabase(const Program &P) const;
  nlohmann::json toJson(const Program &P) const;

  friend bool operator==(const FactBase &, const FactBase &) = default;
};

/// Names and arities of every base relation.
const std::map<std::string, std::size_t> &baseRelations();

FactBase extractFacts(const Program &P, const Structure &S, const SyncPatterns &Patterns);
FactBase extractFacts(const Program &P);

} // namespace ecdiff
