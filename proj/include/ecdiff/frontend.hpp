//===- frontend.hpp - Concurrent mini-language frontend --------*- C++ -*-===//
//
// Parsing of `.cp` programs, per-thread control-flow graphs, structural
// relations (program order, dominance, critical sections) and detection of
// the signal-wait / busy-wait synchronization idioms.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecdiff {

/// Tool-assigned statement identifier. Dense, assigned in textual order with
/// the synthesized initialization stores first.
struct StmtId {
  std::uint32_t value = 0;
  friend auto operator<=>(StmtId, StmtId) = default;
};

using StmtPair = std::pair<StmtId, StmtId>;
using StmtPairSet = std::set<StmtPair>;

/// Error raised for malformed programs. Line/column are 1-based, 0 when the
/// error is not tied to a source position.
class FrontendError : public std::runtime_error {
public:
  FrontendError(const std::string &Msg, int Line = 0, int Column = 0);
  int line() const { return Line; }
  int column() const { return Column; }

private:
  int Line;
  int Column;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Var, Not, Neg, Binary };
  enum class Op { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge };

  Kind kind = Kind::Const;
  std::int64_t value = 0; // Const
  std::string name;       // Var
  Op op = Op::Add;        // Binary
  ExprPtr lhs;            // Binary, or the operand of Not/Neg
  ExprPtr rhs;

  static ExprPtr constant(std::int64_t V);
  static ExprPtr variable(std::string Name);
  static ExprPtr unary(Kind K, ExprPtr Operand);
  static ExprPtr binary(Op O, ExprPtr L, ExprPtr R);

  /// Globals mentioned anywhere in the expression.
  void collectReads(std::set<std::string> &Out) const;
  /// Constant value if the expression mentions no globals.
  std::optional<std::int64_t> constantValue() const;
  std::string str() const;
};

/// Evaluates with wrap-around integer arithmetic; comparisons and `!` yield
/// 0 or 1.
std::int64_t evaluate(const Expr &E,
                      const std::function<std::int64_t(const std::string &)> &Lookup);

enum class StmtKind {
  Assign,
  Lock,
  Unlock,
  Signal,
  Wait,
  Create,
  Join,
  Assert,
  Skip,
  If,
  While
};

std::string_view kindName(StmtKind K);

struct Stmt {
  StmtId id;
  std::optional<std::string> label;
  StmtKind kind = StmtKind::Skip;
  std::size_t thread = 0;     // index into Program::threads
  std::size_t indexInThread = 0;
  /// Assign: target global. Lock/Unlock: lock. Signal/Wait: condition
  /// variable. Create/Join: thread name.
  std::string target;
  std::string mutex; // Wait only
  ExprPtr expr;      // Assign rhs, Assert/If/While condition
  std::vector<StmtId> thenBody; // If then-branch, While body
  std::vector<StmtId> elseBody;
  std::set<std::string> reads;
  std::optional<std::string> writes;
  bool synthesized = false; // initialization store
  int line = 0;
  int column = 0;
};

struct Global {
  std::string name;
  std::int64_t init = 0;
};

struct ThreadDef {
  std::string name;
  std::vector<StmtId> body;
};

/// A parsed program. Statements live in one flat table indexed by StmtId;
/// compound statements refer to their children by id.
struct Program {
  std::vector<Global> globals;
  std::vector<std::string> locks;
  std::vector<std::string> conds;
  std::vector<ThreadDef> threads;
  std::size_t entry = 0;
  std::vector<Stmt> stmts;

  const Stmt &stmt(StmtId Id) const { return stmts.at(Id.value); }
  std::size_t size() const { return stmts.size(); }
  /// User label when present, else `<thread name>#<index>`.
  std::string name(StmtId Id) const;
  std::optional<StmtId> findByName(std::string_view Name) const;
  std::optional<std::size_t> findThread(std::string_view Name) const;
  const Global *findGlobal(std::string_view Name) const;
  /// Statements of one thread in textual (pre-)order.
  std::vector<StmtId> threadStmts(std::size_t Thread) const;
  /// Stable digest of the program's shape used to tie analysis artifacts
  /// to one program.
  std::string fingerprint() const;
};

/// Parses `.cp` source text. Besides syntax this checks names, label
/// uniqueness, thread creation discipline and that every `wait` holds the
/// mutex it names.
Program parse(std::string_view Source);
Program parseFile(const std::string &Path);

/// Control-flow graph of one thread. Local node ids 0..n-1 correspond to
/// `nodes`; `entry()` and `exit()` are virtual.
struct Cfg {
  std::size_t thread = 0;
  std::vector<StmtId> nodes;
  std::vector<std::vector<std::size_t>> succ;
  std::set<std::pair<std::size_t, std::size_t>> backEdges;

  std::size_t entry() const { return nodes.size(); }
  std::size_t exit() const { return nodes.size() + 1; }
  std::size_t numNodes() const { return nodes.size() + 2; }
  std::optional<std::size_t> local(StmtId Id) const;
};

/// Critical-section region: the acquisition site identifies it (the lock
/// statement, or the `wait` that re-acquired the mutex).
struct Region {
  std::size_t thread = 0;
  std::string lock;
  StmtId site;
  friend auto operator<=>(const Region &, const Region &) = default;
};

using CriticalSectionMap = std::map<std::pair<StmtId, std::string>, Region>;

struct Structure {
  std::vector<Cfg> cfgs;
  CriticalSectionMap regions;
  StmtPairSet po;
  StmtPairSet dom;
  StmtPairSet postDom;
  /// s1 reaches s2 and s2 reaches s1 (s1 == s2 when s1 sits on a cycle).
  StmtPairSet loopCarried;

  std::optional<Region> region(StmtId S, const std::string &Lock) const;
  bool sameCS(StmtId A, StmtId B, const std::string &Lock) const;
  bool diffCS(StmtId A, StmtId B, const std::string &Lock) const;
};

Structure buildStructure(const Program &P);

/// Builds the CFG of a single thread. Exposed for the structural tests.
Cfg buildCfg(const Program &P, std::size_t Thread);

struct SyncPatterns {
  StmtPairSet guardedWait; // (signal, wait)
  StmtPairSet adhoc;       // (flag store, busy-wait loop)
};

SyncPatterns detectSyncPatterns(const Program &P, const Structure &S);

} // namespace ecdiff

template <> struct std::hash<ecdiff::StmtId> {
  std::size_t operator()(ecdiff::StmtId Id) const noexcept {
    return std::hash<std::uint32_t>()(Id.value);
  }
};
