//===- engine.cpp - Semi-naive evaluation over interned tuples ------------===//

#include "ecdiff/datalog.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace ecdiff::datalog {

constexpr std::size_t MaxArity = 8;
using Key = std::array<std::uint32_t, MaxArity>;

struct KeyHash {
  std::size_t operator()(const Key &K) const noexcept {
    std::uint64_t H = 1469598103934665603ull;
    for (std::uint32_t V : K) {
      H ^= V;
      H *= 1099511628211ull;
    }
    return static_cast<std::size_t>(H ^ (H >> 29));
  }
};

namespace detail {

struct Relation {
  std::size_t arity = 0;
  std::vector<std::uint32_t> rows; // row-major, `arity` symbols per row
  std::unordered_set<Key, KeyHash> keys;

  struct Index {
    std::size_t upTo = 0;
    std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> buckets;
  };
  std::map<std::uint32_t, Index> indexes; // by bound-column mask

  std::size_t size() const { return rows.size() / arity; }
  const std::uint32_t *row(std::size_t I) const { return rows.data() + I * arity; }

  Key project(const std::uint32_t *Row, std::uint32_t Mask) const {
    Key K{};
    for (std::size_t C = 0; C < arity; ++C)
      if (Mask & (1u << C))
        K[C] = Row[C];
    return K;
  }

  bool insert(const Key &K) {
    if (!keys.insert(K).second)
      return false;
    rows.insert(rows.end(), K.begin(), K.begin() + arity);
    return true;
  }

  const Index &index(std::uint32_t Mask) {
    Index &Ix = indexes[Mask];
    for (std::size_t N = size(); Ix.upTo < N; ++Ix.upTo)
      Ix.buckets[project(row(Ix.upTo), Mask)].push_back(static_cast<std::uint32_t>(Ix.upTo));
    return Ix;
  }
};

struct Store {
  std::vector<std::string> symbols;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::map<std::string, Relation> relations;

  std::uint32_t intern(const std::string &S) {
    auto [It, Inserted] = ids.emplace(S, static_cast<std::uint32_t>(symbols.size()));
    if (Inserted)
      symbols.push_back(S);
    return It->second;
  }

  std::optional<std::uint32_t> lookup(const std::string &S) const {
    auto It = ids.find(S);
    if (It == ids.end())
      return std::nullopt;
    return It->second;
  }

  Relation &declare(const std::string &Name, std::size_t Arity) {
    if (Arity == 0 || Arity > MaxArity)
      throw DatalogError("relation " + Name + " has unsupported arity " +
                         std::to_string(Arity));
    auto [It, Inserted] = relations.try_emplace(Name);
    if (Inserted)
      It->second.arity = Arity;
    else if (It->second.arity != Arity)
      throw DatalogError("arity mismatch for relation " + Name + ": " +
                         std::to_string(It->second.arity) + " vs " + std::to_string(Arity));
    return It->second;
  }

  const Relation &get(const std::string &Name) const {
    auto It = relations.find(Name);
    if (It == relations.end())
      throw DatalogError("unknown relation " + Name);
    return It->second;
  }
};

} // namespace detail

using detail::Relation;
using detail::Store;

//===----------------------------------------------------------------------===//
// Database
//===----------------------------------------------------------------------===//

Database::Database() : Impl(std::make_unique<Store>()) {}
Database::Database(const Database &Other) : Impl(std::make_unique<Store>(*Other.Impl)) {
  for (auto &[Name, R] : Impl->relations)
    R.indexes.clear();
}
Database &Database::operator=(const Database &Other) {
  if (this != &Other)
    *this = Database(Other);
  return *this;
}
Database::Database(Database &&) noexcept = default;
Database &Database::operator=(Database &&) noexcept = default;
Database::~Database() = default;

void Database::declare(const std::string &Relation, std::size_t Arity) {
  Impl->declare(Relation, Arity);
}

bool Database::insert(const std::string &Name, const Tuple &T) {
  Relation &R = Impl->declare(Name, T.size());
  Key K{};
  for (std::size_t I = 0; I < T.size(); ++I)
    K[I] = Impl->intern(T[I]);
  return R.insert(K);
}

bool Database::contains(const std::string &Name, const Tuple &T) const {
  auto It = Impl->relations.find(Name);
  if (It == Impl->relations.end() || It->second.arity != T.size())
    return false;
  Key K{};
  for (std::size_t I = 0; I < T.size(); ++I) {
    auto Id = Impl->lookup(T[I]);
    if (!Id)
      return false;
    K[I] = *Id;
  }
  return It->second.keys.count(K) != 0;
}

bool Database::hasRelation(const std::string &Name) const {
  return Impl->relations.count(Name) != 0;
}

std::size_t Database::arity(const std::string &Name) const { return Impl->get(Name).arity; }

std::size_t Database::size(const std::string &Name) const { return Impl->get(Name).size(); }

std::set<Tuple> Database::tuples(const std::string &Name) const {
  const Relation &R = Impl->get(Name);
  std::set<Tuple> Out;
  for (std::size_t I = 0; I < R.size(); ++I) {
    const std::uint32_t *Row = R.row(I);
    Tuple T;
    for (std::size_t C = 0; C < R.arity; ++C)
      T.push_back(Impl->symbols[Row[C]]);
    Out.insert(std::move(T));
  }
  return Out;
}

std::vector<std::string> Database::relations() const {
  std::vector<std::string> Out;
  for (auto &[Name, R] : Impl->relations)
    Out.push_back(Name);
  return Out;
}

bool operator==(const Database &A, const Database &B) {
  if (A.relations() != B.relations())
    return false;
  for (const std::string &Name : A.relations())
    if (A.arity(Name) != B.arity(Name) || A.size(Name) != B.size(Name) ||
        A.tuples(Name) != B.tuples(Name))
      return false;
  return true;
}

//===----------------------------------------------------------------------===//
// Stratification
//===----------------------------------------------------------------------===//

std::vector<std::vector<std::string>> stratify(const RuleProgram &RP) {
  std::vector<std::string> Names;
  std::map<std::string, std::size_t> Id;
  for (auto &[Name, Arity] : RP.arities()) {
    Id[Name] = Names.size();
    Names.push_back(Name);
  }
  std::size_t N = Names.size();
  // Edges body -> head; Negative marks edges through a negated atom.
  std::vector<std::set<std::size_t>> Adj(N);
  std::set<std::pair<std::size_t, std::size_t>> Negative;
  for (const Rule &R : RP.rules()) {
    std::size_t H = Id.at(R.head.relation);
    for (const Atom &A : R.body) {
      std::size_t B = Id.at(A.relation);
      Adj[B].insert(H);
      if (A.negated)
        Negative.insert({B, H});
    }
  }

  // Tarjan's algorithm; components come out dependents-first.
  std::vector<int> Index(N, -1), Low(N, 0), Comp(N, -1);
  std::vector<bool> OnStack(N, false);
  std::vector<std::size_t> Stack;
  std::vector<std::vector<std::size_t>> Comps;
  int Counter = 0;
  std::function<void(std::size_t)> Visit = [&](std::size_t V) {
    Index[V] = Low[V] = Counter++;
    Stack.push_back(V);
    OnStack[V] = true;
    for (std::size_t W : Adj[V]) {
      if (Index[W] < 0) {
        Visit(W);
        Low[V] = std::min(Low[V], Low[W]);
      } else if (OnStack[W]) {
        Low[V] = std::min(Low[V], Index[W]);
      }
    }
    if (Low[V] == Index[V]) {
      std::vector<std::size_t> C;
      std::size_t W;
      do {
        W = Stack.back();
        Stack.pop_back();
        OnStack[W] = false;
        Comp[W] = static_cast<int>(Comps.size());
        C.push_back(W);
      } while (W != V);
      Comps.push_back(std::move(C));
    }
  };
  for (std::size_t V = 0; V < N; ++V)
    if (Index[V] < 0)
      Visit(V);

  for (auto [B, H] : Negative) {
    if (Comp[B] != Comp[H])
      continue;
    // Report one cycle: the negative edge plus a path back inside the SCC.
    std::vector<std::size_t> Parent(N, N);
    std::deque<std::size_t> Work{H};
    Parent[H] = H;
    while (!Work.empty() && Parent[B] == N) {
      std::size_t V = Work.front();
      Work.pop_front();
      for (std::size_t W : Adj[V])
        if (Comp[W] == Comp[H] && Parent[W] == N) {
          Parent[W] = V;
          Work.push_back(W);
        }
    }
    std::vector<std::string> Path;
    for (std::size_t V = B; V != H; V = Parent[V])
      Path.push_back(Names[V]);
    Path.push_back(Names[H]);
    std::reverse(Path.begin(), Path.end());
    std::string Cycle = Names[B] + " -> !" + Path.front();
    for (std::size_t I = 1; I < Path.size(); ++I)
      Cycle += " -> " + Path[I];
    throw DatalogError("not stratifiable: negation inside the cycle " + Cycle);
  }

  std::set<std::string> Derived = RP.derivedRelations();
  std::vector<std::vector<std::string>> Strata;
  for (auto It = Comps.rbegin(); It != Comps.rend(); ++It) {
    std::vector<std::string> S;
    for (std::size_t V : *It)
      if (Derived.count(Names[V]))
        S.push_back(Names[V]);
    if (S.empty())
      continue;
    std::sort(S.begin(), S.end());
    Strata.push_back(std::move(S));
  }
  return Strata;
}

//===----------------------------------------------------------------------===//
// Evaluation
//===----------------------------------------------------------------------===//

namespace {

struct Arg {
  enum class Kind { Const, Var, Wildcard } kind = Kind::Wildcard;
  std::uint32_t value = 0; // symbol id or variable slot
};

struct CompiledAtom {
  Relation *rel = nullptr;
  std::vector<Arg> args;
  bool recursive = false; // relation defined in the current stratum
};

struct Filter {
  enum class Kind { Negation, Inequality } kind;
  std::size_t atom = 0;  // negated atom index
  Arg lhs, rhs;          // inequality sides
};

struct Step {
  std::size_t atom = 0; // index into positives
  std::uint32_t mask = 0;
  std::vector<std::pair<std::size_t, Arg>> keyArgs; // column -> source
  std::vector<std::pair<std::size_t, std::uint32_t>> binds; // column -> slot
  std::vector<std::pair<std::size_t, std::uint32_t>> checks; // repeated vars
  std::vector<Filter> filters;
};

struct Plan {
  std::optional<std::size_t> delta; // positive atom reading only new rows
  std::vector<Step> steps;
  std::vector<Filter> initialFilters;
};

struct CompiledRule {
  Relation *head = nullptr;
  std::vector<Arg> headArgs;
  std::vector<CompiledAtom> positives;
  std::vector<CompiledAtom> negatives;
  std::vector<std::pair<Arg, Arg>> inequalities;
  std::size_t numVars = 0;
  std::vector<Plan> plans; // one per recursive positive atom, or one full plan
};

class Evaluator {
public:
  Evaluator(Store &S, const RuleProgram &RP) : S(S), RP(RP) {}

  void run() {
    for (const auto &Stratum : stratify(RP))
      evaluateStratum(std::set<std::string>(Stratum.begin(), Stratum.end()));
  }

private:
  Store &S;
  const RuleProgram &RP;

  // Row ranges of the relations in the current stratum for this round.
  std::map<const Relation *, std::pair<std::size_t, std::size_t>> DeltaRange;
  std::map<Relation *, std::vector<Key>> Pending;

  Arg compileTerm(const Term &T, std::map<std::string, std::uint32_t> &Slots) {
    Arg A;
    switch (T.kind) {
    case Term::Kind::Const:
      A.kind = Arg::Kind::Const;
      A.value = S.intern(T.text);
      break;
    case Term::Kind::Var: {
      A.kind = Arg::Kind::Var;
      auto [It, Inserted] =
          Slots.emplace(T.text, static_cast<std::uint32_t>(Slots.size()));
      A.value = It->second;
      break;
    }
    case Term::Kind::Wildcard:
      break;
    }
    return A;
  }

  CompiledRule compile(const Rule &R, const std::set<std::string> &Stratum) {
    CompiledRule C;
    std::map<std::string, std::uint32_t> Slots;
    auto atom = [&](const Atom &A) {
      CompiledAtom CA;
      CA.rel = &S.relations.at(A.relation);
      CA.recursive = Stratum.count(A.relation) != 0;
      for (const Term &T : A.args)
        CA.args.push_back(compileTerm(T, Slots));
      return CA;
    };
    for (const Atom &A : R.body)
      if (!A.negated)
        C.positives.push_back(atom(A));
    for (const Atom &A : R.body)
      if (A.negated)
        C.negatives.push_back(atom(A));
    for (const Inequality &I : R.constraints)
      C.inequalities.push_back({compileTerm(I.lhs, Slots), compileTerm(I.rhs, Slots)});
    C.head = &S.relations.at(R.head.relation);
    for (const Term &T : R.head.args)
      C.headArgs.push_back(compileTerm(T, Slots));
    C.numVars = Slots.size();

    bool AnyRecursive = false;
    for (std::size_t I = 0; I < C.positives.size(); ++I)
      if (C.positives[I].recursive) {
        AnyRecursive = true;
        C.plans.push_back(plan(C, I));
      }
    if (!AnyRecursive)
      C.plans.push_back(plan(C, std::nullopt));
    return C;
  }

  Plan plan(const CompiledRule &C, std::optional<std::size_t> Delta) {
    Plan P;
    P.delta = Delta;
    std::vector<std::size_t> Order;
    if (Delta)
      Order.push_back(*Delta);
    for (std::size_t I = 0; I < C.positives.size(); ++I)
      if (!Delta || I != *Delta)
        Order.push_back(I);

    std::vector<bool> Bound(C.numVars, false);
    std::vector<bool> NegDone(C.negatives.size(), false);
    std::vector<bool> IneqDone(C.inequalities.size(), false);
    auto isBound = [&](const Arg &A) { return A.kind != Arg::Kind::Var || Bound[A.value]; };
    auto readyFilters = [&]() {
      std::vector<Filter> Out;
      for (std::size_t N = 0; N < C.negatives.size(); ++N) {
        if (NegDone[N])
          continue;
        const auto &Args = C.negatives[N].args;
        if (std::all_of(Args.begin(), Args.end(), isBound)) {
          NegDone[N] = true;
          Out.push_back({Filter::Kind::Negation, N, {}, {}});
        }
      }
      for (std::size_t Q = 0; Q < C.inequalities.size(); ++Q) {
        auto &[L, R] = C.inequalities[Q];
        if (!IneqDone[Q] && isBound(L) && isBound(R)) {
          IneqDone[Q] = true;
          Out.push_back({Filter::Kind::Inequality, 0, L, R});
        }
      }
      return Out;
    };

    P.initialFilters = readyFilters();
    for (std::size_t A : Order) {
      Step St;
      St.atom = A;
      const auto &Args = C.positives[A].args;
      std::vector<bool> BoundHere(C.numVars, false);
      for (std::size_t Col = 0; Col < Args.size(); ++Col) {
        const Arg &X = Args[Col];
        if (X.kind == Arg::Kind::Wildcard)
          continue;
        if (isBound(X)) {
          St.mask |= 1u << Col;
          St.keyArgs.push_back({Col, X});
        } else if (BoundHere[X.value]) {
          St.checks.push_back({Col, X.value});
        } else {
          BoundHere[X.value] = true;
          St.binds.push_back({Col, X.value});
        }
      }
      for (std::size_t V = 0; V < C.numVars; ++V)
        if (BoundHere[V])
          Bound[V] = true;
      St.filters = readyFilters();
      P.steps.push_back(std::move(St));
    }
    return P;
  }

  bool passes(const CompiledRule &C, const std::vector<Filter> &Fs,
              const std::vector<std::uint32_t> &Env) {
    auto value = [&](const Arg &A) {
      return A.kind == Arg::Kind::Const ? A.value : Env[A.value];
    };
    for (const Filter &F : Fs) {
      if (F.kind == Filter::Kind::Inequality) {
        if (value(F.lhs) == value(F.rhs))
          return false;
        continue;
      }
      const CompiledAtom &N = C.negatives[F.atom];
      Key K{};
      std::uint32_t Mask = 0;
      for (std::size_t Col = 0; Col < N.args.size(); ++Col)
        if (N.args[Col].kind != Arg::Kind::Wildcard) {
          K[Col] = value(N.args[Col]);
          Mask |= 1u << Col;
        }
      bool Present;
      if (Mask == (1u << N.args.size()) - 1)
        Present = N.rel->keys.count(K) != 0;
      else if (Mask == 0)
        Present = N.rel->size() != 0;
      else {
        const auto &Ix = N.rel->index(Mask);
        Present = Ix.buckets.count(K) != 0;
      }
      if (Present)
        return false;
    }
    return true;
  }

  std::pair<std::size_t, std::size_t> rangeFor(const CompiledAtom &A, const Plan &P,
                                               std::size_t Position) {
    if (!A.recursive)
      return {0, A.rel->size()};
    auto [Begin, End] = DeltaRange.at(A.rel);
    if (P.delta && Position == *P.delta)
      return {Begin, End};
    if (P.delta && Position < *P.delta)
      return {0, Begin};
    return {0, End};
  }

  void join(const CompiledRule &C, const Plan &P, std::size_t StepNo,
            std::vector<std::uint32_t> &Env) {
    if (StepNo == P.steps.size()) {
      Key K{};
      for (std::size_t Col = 0; Col < C.headArgs.size(); ++Col) {
        const Arg &A = C.headArgs[Col];
        K[Col] = A.kind == Arg::Kind::Const ? A.value : Env[A.value];
      }
      if (!C.head->keys.count(K))
        Pending[C.head].push_back(K);
      return;
    }
    const Step &St = P.steps[StepNo];
    const CompiledAtom &A = C.positives[St.atom];
    auto [Lo, Hi] = rangeFor(A, P, St.atom);
    if (Lo >= Hi)
      return;

    auto visit = [&](std::size_t RowId) {
      const std::uint32_t *Row = A.rel->row(RowId);
      for (auto [Col, Slot] : St.binds)
        Env[Slot] = Row[Col];
      for (auto [Col, Slot] : St.checks)
        if (Row[Col] != Env[Slot])
          return;
      if (!passes(C, St.filters, Env))
        return;
      join(C, P, StepNo + 1, Env);
    };

    if (St.mask == 0) {
      for (std::size_t R = Lo; R < Hi; ++R)
        visit(R);
      return;
    }
    Key K{};
    for (auto &[Col, X] : St.keyArgs)
      K[Col] = X.kind == Arg::Kind::Const ? X.value : Env[X.value];
    const auto &Ix = A.rel->index(St.mask);
    auto It = Ix.buckets.find(K);
    if (It == Ix.buckets.end())
      return;
    const auto &Ids = It->second;
    for (auto I = std::lower_bound(Ids.begin(), Ids.end(), Lo); I != Ids.end() && *I < Hi; ++I)
      visit(*I);
  }

  void evaluateStratum(const std::set<std::string> &Stratum) {
    std::vector<CompiledRule> Rules;
    for (const Rule &R : RP.rules())
      if (Stratum.count(R.head.relation))
        Rules.push_back(compile(R, Stratum));

    DeltaRange.clear();
    for (const std::string &Name : Stratum) {
      Relation &R = S.relations.at(Name);
      DeltaRange[&R] = {0, R.size()};
    }
    bool First = true;
    for (;;) {
      Pending.clear();
      for (const CompiledRule &C : Rules) {
        for (const Plan &P : C.plans) {
          if (!First && !P.delta)
            continue;
          std::vector<std::uint32_t> Env(C.numVars, 0);
          if (!passes(C, P.initialFilters, Env))
            continue;
          join(C, P, 0, Env);
        }
      }
      // Rules without recursive atoms saw everything in the first round.
      First = false;
      bool Changed = false;
      for (auto &[Rel, Keys] : Pending)
        for (const Key &K : Keys)
          Changed |= Rel->insert(K);
      for (auto &[Rel, Range] : DeltaRange)
        Range = {Range.second, Rel->size()};
      if (!Changed)
        break;
    }
  }
};

} // namespace

Database evaluate(const Database &Facts, const RuleProgram &RP) {
  Database Db(Facts);
  for (auto &[Name, Arity] : RP.arities())
    Db.declare(Name, Arity);
  Evaluator(Db.store(), RP).run();
  return Db;
}

std::vector<Tuple> query(const Database &Db, const std::string &Relation,
                         const std::vector<std::optional<std::string>> &Pattern) {
  if (!Db.hasRelation(Relation))
    throw DatalogError("unknown relation " + Relation);
  if (!Pattern.empty() && Pattern.size() != Db.arity(Relation))
    throw DatalogError("pattern arity " + std::to_string(Pattern.size()) +
                       " does not match relation " + Relation);
  std::vector<Tuple> Out;
  for (const Tuple &T : Db.tuples(Relation)) {
    bool Match = true;
    for (std::size_t I = 0; I < Pattern.size() && Match; ++I)
      Match = !Pattern[I] || *Pattern[I] == T[I];
    if (Match)
      Out.push_back(T);
  }
  return Out;
}

} // namespace ecdiff::datalog
