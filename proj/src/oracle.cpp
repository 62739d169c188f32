//===- oracle.cpp - Interleaving enumeration and ground truth -------------===//

#include "ecdiff/oracle.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace ecdiff {

std::set<RfTuple> GroundAbstractTrace::rfTuples(int K) const {
  std::set<RfTuple> Out;
  for (const GroundTuple &T : sets) {
    if (static_cast<int>(T.size()) != K)
      continue;
    RfTuple E;
    for (const GroundEdge &G : T) {
      if (G.kind != GroundEdge::Kind::Rf)
        break;
      E.push_back({G.from, G.to});
    }
    if (E.size() == T.size())
      Out.insert(std::move(E));
  }
  return Out;
}

namespace {

constexpr std::uint32_t End = 0xffffffffu;

enum class Status : std::uint8_t { NotCreated, Running, Waiting, Woken, Finished };

struct Instr {
  const Stmt *stmt = nullptr;
  std::uint32_t next = End; // fall-through, then-branch, or loop body
  std::uint32_t alt = End;  // else-branch or loop exit
  std::uint32_t loopSlot = 0;
};

struct State {
  std::vector<std::int64_t> vals;
  std::vector<std::uint32_t> pc;
  std::vector<Status> status;
  std::vector<std::uint16_t> counters;
  std::vector<std::int32_t> owner;
  std::vector<std::int32_t> lastWriter;
  std::vector<std::uint64_t> stored;

  std::string key() const {
    std::string K;
    auto put = [&K](const auto &V) {
      K.append(reinterpret_cast<const char *>(V.data()), V.size() * sizeof(V[0]));
    };
    put(vals);
    put(pc);
    put(status);
    put(counters);
    put(owner);
    put(lastWriter);
    put(stored);
    return K;
  }
};

struct StepResult {
  State next;
  std::optional<StmtId> event;
  std::vector<GroundEdge> edges;
  bool assertFailed = false;
};

/// Executable form of a program.
class Machine {
public:
  Machine(const Program &P, const OracleOptions &Opts) : P(P), Opts(Opts) {
    for (std::size_t I = 0; I < P.globals.size(); ++I)
      VarIndex[P.globals[I].name] = I;
    for (std::size_t I = 0; I < P.locks.size(); ++I)
      LockIndex[P.locks[I]] = I;
    for (const Stmt &S : P.stmts)
      if (S.writes) {
        StoreBit[S.id.value] = NumStores++;
        StoresOf[VarIndex.at(*S.writes)].push_back(S.id);
      }
    Code.resize(P.threads.size());
    for (std::size_t T = 0; T < P.threads.size(); ++T) {
      Index.clear();
      for (StmtId Id : P.threadStmts(T)) {
        Index[Id.value] = static_cast<std::uint32_t>(Code[T].size());
        Instr I;
        I.stmt = &P.stmt(Id);
        if (I.stmt->kind == StmtKind::While)
          I.loopSlot = static_cast<std::uint32_t>(NumSlots++);
        Code[T].push_back(I);
      }
      Start.push_back(wire(T, P.threads[T].body, End));
    }
  }

  State initial() const {
    State S;
    S.vals.assign(P.globals.size(), 0);
    S.pc.assign(P.threads.size(), End);
    S.status.assign(P.threads.size(), Status::NotCreated);
    S.counters.assign(NumSlots, 0);
    S.owner.assign(P.locks.size(), -1);
    S.lastWriter.assign(P.globals.size(), -1);
    if (Opts.storeOrder)
      S.stored.assign((NumStores + 63) / 64, 0);
    S.pc[P.entry] = Start[P.entry];
    S.status[P.entry] = Start[P.entry] == End ? Status::Finished : Status::Running;
    return S;
  }

  std::size_t numThreads() const { return P.threads.size(); }

  std::optional<StepResult> step(const State &S, std::size_t T) const {
    switch (S.status[T]) {
    case Status::NotCreated:
    case Status::Waiting:
    case Status::Finished:
      return std::nullopt;
    case Status::Woken: {
      const Instr &W = Code[T][S.pc[T]];
      std::size_t L = LockIndex.at(W.stmt->mutex);
      if (S.owner[L] >= 0)
        return std::nullopt;
      StepResult R{S, std::nullopt, {}, false};
      R.next.owner[L] = static_cast<std::int32_t>(T);
      R.next.status[T] = Status::Running;
      advance(R.next, T, W.next);
      return R;
    }
    case Status::Running:
      break;
    }

    const Instr &I = Code[T][S.pc[T]];
    const Stmt &X = *I.stmt;
    StepResult R{S, X.id, {}, false};
    State &N = R.next;
    auto value = [&](const Expr &E) {
      return evaluate(E, [&](const std::string &V) { return S.vals[VarIndex.at(V)]; });
    };
    auto loads = [&] {
      for (const std::string &V : X.reads) {
        std::int32_t W = S.lastWriter[VarIndex.at(V)];
        if (W >= 0)
          R.edges.push_back({GroundEdge::Kind::Rf, StmtId{static_cast<std::uint32_t>(W)}, X.id});
      }
    };

    switch (X.kind) {
    case StmtKind::Assign: {
      loads();
      std::size_t V = VarIndex.at(X.target);
      N.vals[V] = value(*X.expr);
      if (Opts.storeOrder) {
        for (StmtId Prev : StoresOf.at(V)) {
          std::size_t Bit = StoreBit.at(Prev.value);
          if (Prev != X.id && (S.stored[Bit / 64] >> (Bit % 64) & 1))
            R.edges.push_back({GroundEdge::Kind::So, Prev, X.id});
        }
        std::size_t Bit = StoreBit.at(X.id.value);
        N.stored[Bit / 64] |= std::uint64_t(1) << (Bit % 64);
      }
      N.lastWriter[V] = static_cast<std::int32_t>(X.id.value);
      advance(N, T, I.next);
      break;
    }
    case StmtKind::Lock: {
      std::size_t L = LockIndex.at(X.target);
      if (S.owner[L] >= 0)
        return std::nullopt;
      N.owner[L] = static_cast<std::int32_t>(T);
      advance(N, T, I.next);
      break;
    }
    case StmtKind::Unlock:
      N.owner[LockIndex.at(X.target)] = -1;
      advance(N, T, I.next);
      break;
    case StmtKind::Wait:
      N.owner[LockIndex.at(X.mutex)] = -1;
      N.status[T] = Status::Waiting;
      break;
    case StmtKind::Signal:
      for (std::size_t U = 0; U < S.status.size(); ++U)
        if (S.status[U] == Status::Waiting && Code[U][S.pc[U]].stmt->target == X.target)
          N.status[U] = Status::Woken;
      advance(N, T, I.next);
      break;
    case StmtKind::Create: {
      std::size_t C = *P.findThread(X.target);
      N.pc[C] = Start[C];
      N.status[C] = Start[C] == End ? Status::Finished : Status::Running;
      advance(N, T, I.next);
      break;
    }
    case StmtKind::Join:
      if (S.status[*P.findThread(X.target)] != Status::Finished)
        return std::nullopt;
      advance(N, T, I.next);
      break;
    case StmtKind::Assert:
      loads();
      R.assertFailed = value(*X.expr) == 0;
      advance(N, T, I.next);
      break;
    case StmtKind::Skip:
      advance(N, T, I.next);
      break;
    case StmtKind::If:
      loads();
      advance(N, T, value(*X.expr) != 0 ? I.next : I.alt);
      break;
    case StmtKind::While: {
      std::size_t Slot = I.loopSlot;
      if (value(*X.expr) != 0) {
        if (S.counters[Slot] >= Opts.loopBound)
          return std::nullopt;
        loads();
        ++N.counters[Slot];
        advance(N, T, I.next);
      } else {
        loads();
        N.counters[Slot] = 0;
        advance(N, T, I.alt);
      }
      break;
    }
    }
    return R;
  }

  /// Thread stopped at an exhausted loop whose condition still holds.
  bool atLoopBound(const State &S, std::size_t T) const {
    if (S.status[T] != Status::Running)
      return false;
    const Instr &I = Code[T][S.pc[T]];
    return I.stmt->kind == StmtKind::While && S.counters[I.loopSlot] >= Opts.loopBound;
  }

  bool allDone(const State &S) const {
    return std::all_of(S.status.begin(), S.status.end(), [](Status St) {
      return St == Status::Finished || St == Status::NotCreated;
    });
  }

  std::string describe(const State &S) const {
    static const char *Names[] = {"not created", "running", "waiting", "woken", "finished"};
    std::string Out;
    for (std::size_t T = 0; T < S.status.size(); ++T) {
      if (S.status[T] == Status::Finished || S.status[T] == Status::NotCreated)
        continue;
      Out += (Out.empty() ? "" : ", ") + P.threads[T].name + " " +
             Names[static_cast<int>(S.status[T])] + " at " +
             P.name(Code[T][S.pc[T]].stmt->id);
    }
    return Out;
  }

private:
  const Program &P;
  const OracleOptions &Opts;
  std::map<std::string, std::size_t> VarIndex;
  std::map<std::string, std::size_t> LockIndex;
  std::map<std::uint32_t, std::size_t> StoreBit;
  std::map<std::size_t, std::vector<StmtId>> StoresOf;
  std::size_t NumStores = 0;
  std::size_t NumSlots = 0;
  std::vector<std::vector<Instr>> Code;
  std::vector<std::uint32_t> Start;
  std::map<std::uint32_t, std::uint32_t> Index;

  void advance(State &S, std::size_t T, std::uint32_t To) const {
    S.pc[T] = To;
    if (To == End)
      S.status[T] = Status::Finished;
  }

  std::uint32_t wire(std::size_t T, const std::vector<StmtId> &Body, std::uint32_t Next) {
    for (auto It = Body.rbegin(); It != Body.rend(); ++It) {
      std::uint32_t N = Index.at(It->value);
      Instr &I = Code[T][N];
      switch (I.stmt->kind) {
      case StmtKind::If:
        I.next = wire(T, I.stmt->thenBody, Next);
        I.alt = wire(T, I.stmt->elseBody, Next);
        break;
      case StmtKind::While:
        I.next = wire(T, I.stmt->thenBody, N);
        I.alt = Next;
        break;
      default:
        I.next = Next;
        break;
      }
      Next = N;
    }
    return Next;
  }
};

//===----------------------------------------------------------------------===//
// Ordered tuples of edge ids, packed three 21-bit slots to a word.
//===----------------------------------------------------------------------===//

constexpr int SlotBits = 21;
constexpr std::uint64_t SlotMask = (std::uint64_t(1) << SlotBits) - 1;

int tupleLength(std::uint64_t T) {
  int N = 0;
  while (N < 3 && ((T >> (SlotBits * N)) & SlotMask))
    ++N;
  return N;
}

std::uint32_t slot(std::uint64_t T, int I) {
  return static_cast<std::uint32_t>((T >> (SlotBits * I)) & SlotMask) - 1;
}

std::uint64_t pack(const std::vector<std::uint32_t> &Ids) {
  std::uint64_t T = 0;
  for (std::size_t I = 0; I < Ids.size(); ++I)
    T |= std::uint64_t(Ids[I] + 1) << (SlotBits * I);
  return T;
}

/// Adds to Out every tuple formed by an ordered selection of distinct
/// edges of Group followed by a tuple of Suffix (or nothing).
void extend(const std::vector<std::uint32_t> &Group, const std::vector<std::uint64_t> &Suffix,
            int Rank, std::unordered_set<std::uint64_t> &Out) {
  std::vector<std::uint32_t> Chosen;
  std::function<void()> Rec = [&] {
    if (!Chosen.empty()) {
      Out.insert(pack(Chosen));
      for (std::uint64_t T : Suffix) {
        int Len = tupleLength(T);
        if (Len + static_cast<int>(Chosen.size()) > Rank)
          continue;
        bool Clash = false;
        for (int I = 0; I < Len && !Clash; ++I)
          Clash = std::find(Chosen.begin(), Chosen.end(), slot(T, I)) != Chosen.end();
        if (!Clash)
          Out.insert(pack(Chosen) | T << (SlotBits * Chosen.size()));
      }
    }
    if (static_cast<int>(Chosen.size()) == Rank)
      return;
    for (std::uint32_t E : Group) {
      if (std::find(Chosen.begin(), Chosen.end(), E) != Chosen.end())
        continue;
      Chosen.push_back(E);
      Rec();
      Chosen.pop_back();
    }
  };
  Rec();
}

class EdgeTable {
public:
  std::uint32_t id(const GroundEdge &E) {
    auto [It, Inserted] = Ids.emplace(E, static_cast<std::uint32_t>(Edges.size()));
    if (Inserted) {
      if (Edges.size() >= SlotMask)
        throw OracleError("too many distinct edges for the tuple encoding");
      Edges.push_back(E);
    }
    return It->second;
  }
  const GroundEdge &operator[](std::uint32_t I) const { return Edges[I]; }

private:
  std::map<GroundEdge, std::uint32_t> Ids;
  std::vector<GroundEdge> Edges;
};

void collect(GroundAbstractTrace &G, const EdgeTable &Edges,
             const std::unordered_set<std::uint64_t> &Tuples) {
  for (std::uint64_t T : Tuples) {
    GroundTuple Out;
    for (int I = 0, N = tupleLength(T); I < N; ++I)
      Out.push_back(Edges[slot(T, I)]);
    G.sets.insert(std::move(Out));
  }
  for (const GroundTuple &T : G.sets)
    for (const GroundEdge &E : T)
      (E.kind == GroundEdge::Kind::Rf ? G.rf : G.so).insert({E.from, E.to});
}

} // namespace

//===----------------------------------------------------------------------===//
// Unmemoized enumeration
//===----------------------------------------------------------------------===//

std::vector<GroundTrace> enumerate(const Program &P, const OracleOptions &Opts,
                                   bool *Complete) {
  if (Opts.loopBound < 1)
    throw OracleError("loop bound must be at least 1");
  Machine M(P, Opts);
  std::vector<GroundTrace> Out;
  GroundTrace Path;
  bool Full = true;
  std::function<void(const State &)> Dfs = [&](const State &S) {
    if (!Full)
      return;
    bool Any = false;
    for (std::size_t T = 0; T < M.numThreads(); ++T) {
      auto R = M.step(S, T);
      if (!R)
        continue;
      Any = true;
      std::size_t Events = Path.events.size(), Edges = Path.edges.size(),
                  Fails = Path.failedAsserts.size();
      if (R->event) {
        Path.events.push_back(*R->event);
        for (const GroundEdge &E : R->edges)
          Path.edges.push_back({Events, E});
        if (R->assertFailed)
          Path.failedAsserts.push_back(*R->event);
      }
      Dfs(R->next);
      Path.events.resize(Events);
      Path.edges.resize(Edges);
      Path.failedAsserts.resize(Fails);
    }
    if (Any)
      return;
    if (Out.size() >= Opts.budget) {
      Full = false;
      return;
    }
    GroundTrace T = Path;
    T.completed = M.allDone(S);
    if (!T.completed) {
      for (std::size_t U = 0; U < M.numThreads(); ++U)
        T.loopPruned = T.loopPruned || M.atLoopBound(S, U);
      T.deadlocked = !T.loopPruned;
    }
    Out.push_back(std::move(T));
  };
  Dfs(M.initial());
  if (Complete)
    *Complete = Full;
  return Out;
}

GroundAbstractTrace groundAbstractTrace(const Program &P, const std::vector<GroundTrace> &Traces,
                                        int Rank) {
  if (Rank < 1 || Rank > 3)
    throw OracleError("rank must be between 1 and 3");
  GroundAbstractTrace G;
  G.rank = Rank;
  G.fingerprint = P.fingerprint();
  EdgeTable Edges;
  for (std::size_t Id = 0; Id < Traces.size(); ++Id) {
    const GroundTrace &T = Traces[Id];
    std::map<std::size_t, std::vector<std::uint32_t>> Groups;
    for (auto &[Pos, E] : T.edges)
      Groups[Pos].push_back(Edges.id(E));
    std::unordered_set<std::uint64_t> Suffix;
    for (auto It = Groups.rbegin(); It != Groups.rend(); ++It) {
      std::vector<std::uint64_t> Prev(Suffix.begin(), Suffix.end());
      extend(It->second, Prev, Rank, Suffix);
    }
    GroundAbstractTrace Local;
    collect(Local, Edges, Suffix);
    for (const GroundTuple &Tup : Local.sets)
      if (G.sets.insert(Tup).second)
        G.witness[Tup] = Id;
    G.rf.insert(Local.rf.begin(), Local.rf.end());
    G.so.insert(Local.so.begin(), Local.so.end());

    G.stats.traces += 1;
    G.stats.completedTraces += T.completed;
    G.stats.deadlockedTraces += T.deadlocked;
    G.stats.prunedTraces += T.loopPruned;
    G.stats.failedAsserts.insert(T.failedAsserts.begin(), T.failedAsserts.end());
  }
  return G;
}

//===----------------------------------------------------------------------===//
// Memoized exploration
//===----------------------------------------------------------------------===//

namespace {

struct NodeInfo {
  std::vector<std::uint64_t> suffix; // sorted
  double traces = 0, completed = 0, deadlocked = 0, pruned = 0;
  bool done = false;
};

class Explorer {
public:
  Explorer(const Program &P, const OracleOptions &Opts) : M(P, Opts), Opts(Opts) {}

  GroundAbstractTrace run(const Program &P) {
    GroundAbstractTrace G;
    G.rank = Opts.rank;
    G.fingerprint = P.fingerprint();
    const NodeInfo &Root = visit(M.initial());
    std::unordered_set<std::uint64_t> All(Root.suffix.begin(), Root.suffix.end());
    collect(G, Edges, All);
    G.complete = !Exhausted;
    G.stats.states = Memo.size();
    G.stats.traces = Root.traces;
    G.stats.completedTraces = Root.completed;
    G.stats.deadlockedTraces = Root.deadlocked;
    G.stats.prunedTraces = Root.pruned;
    G.stats.deadlockWitnesses = Witnesses;
    G.stats.failedAsserts = Failed;
    return G;
  }

private:
  Machine M;
  const OracleOptions &Opts;
  EdgeTable Edges;
  std::unordered_map<std::string, NodeInfo> Memo;
  std::vector<std::string> Witnesses;
  std::set<StmtId> Failed;
  bool Exhausted = false;
  NodeInfo Cutoff;

  const NodeInfo &visit(const State &S) {
    std::string Key = S.key();
    auto Found = Memo.find(Key);
    if (Found != Memo.end()) {
      if (!Found->second.done)
        throw OracleError("state graph has a cycle");
      return Found->second;
    }
    if (Memo.size() >= Opts.budget) {
      Exhausted = true;
      return Cutoff;
    }
    Memo.emplace(Key, NodeInfo{});

    NodeInfo Info;
    std::unordered_set<std::uint64_t> Suffix;
    bool Any = false;
    for (std::size_t T = 0; T < M.numThreads(); ++T) {
      auto R = M.step(S, T);
      if (!R)
        continue;
      Any = true;
      if (R->assertFailed)
        Failed.insert(*R->event);
      std::vector<std::uint32_t> Group;
      for (const GroundEdge &E : R->edges)
        Group.push_back(Edges.id(E));
      const NodeInfo &Child = visit(R->next);
      Suffix.insert(Child.suffix.begin(), Child.suffix.end());
      if (!Group.empty())
        extend(Group, Child.suffix, Opts.rank, Suffix);
      Info.traces += Child.traces;
      Info.completed += Child.completed;
      Info.deadlocked += Child.deadlocked;
      Info.pruned += Child.pruned;
    }
    if (!Any) {
      Info.traces = 1;
      if (M.allDone(S)) {
        Info.completed = 1;
      } else {
        bool Pruned = false;
        for (std::size_t U = 0; U < M.numThreads(); ++U)
          Pruned = Pruned || M.atLoopBound(S, U);
        if (Pruned) {
          Info.pruned = 1;
        } else {
          Info.deadlocked = 1;
          if (Witnesses.size() < 5)
            Witnesses.push_back(M.describe(S));
        }
      }
    }
    Info.suffix.assign(Suffix.begin(), Suffix.end());
    std::sort(Info.suffix.begin(), Info.suffix.end());
    Info.done = true;
    NodeInfo &Slot = Memo.at(Key);
    Slot = std::move(Info);
    return Slot;
  }
};

} // namespace

GroundAbstractTrace explore(const Program &P, const OracleOptions &Opts) {
  if (Opts.loopBound < 1)
    throw OracleError("loop bound must be at least 1");
  if (Opts.rank < 1 || Opts.rank > 3)
    throw OracleError("rank must be between 1 and 3");
  return Explorer(P, Opts).run(P);
}

SoundnessReport checkSoundness(const StaticAbstractTrace &Static,
                               const GroundAbstractTrace &Ground) {
  if (Static.fingerprint != Ground.fingerprint)
    throw OracleError("static and ground traces belong to different programs");
  if (Static.rank != Ground.rank)
    throw OracleError("static trace has rank " + std::to_string(Static.rank) +
                      " but ground trace has rank " + std::to_string(Ground.rank));
  if (!Ground.complete)
    throw OracleError("incomplete ground truth: exploration budget exhausted");
  if (Ground.stats.completedTraces + Ground.stats.deadlockedTraces == 0)
    throw OracleError("incomplete ground truth: every schedule hit the loop bound");
  SoundnessReport R;
  for (const RfEdge &E : Ground.rf)
    if (!Static.mayRf.count(E))
      R.missingRf.push_back(E);
  for (int K = 2; K <= Ground.rank; ++K) {
    auto Covered = Static.tuples(K);
    for (const RfTuple &T : Ground.rfTuples(K))
      if (!Covered.count(T))
        R.missingTuples.push_back(T);
  }
  return R;
}

} // namespace ecdiff
