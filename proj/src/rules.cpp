//===- rules.cpp - Rule programs and the static analysis driver -----------===//

#include "ecdiff/rules.hpp"

#include <unordered_map>

namespace ecdiff {

namespace {

const char *Rank1Text = R"(
MustHb(a, b) :- Po(a, b).
MustHb(c, s) :- ThrdCreate(_, c, t), St(s, t).
MustHb(s, j) :- ThrdJoin(_, j, t), St(s, t).
MustHb(a, b) :- GuardedSignalWait(a, b).
MustHb(a, b) :- AdhocOrder(a, b).
MustHb(a, c) :- MustHb(a, b), MustHb(b, c).

// s1 has executed whenever s2 executes.
MustPrecede(a, b) :- Dom(a, b).
MustPrecede(c, s) :- ThrdCreate(_, c, t), St(s, t).
MustPrecede(w, s) :- AdhocOrder(w, l), Dom(l, s).
MustPrecede(a, c) :- MustPrecede(a, b), MustPrecede(b, c).

MayHb(a, b) :- MustHb(a, b), U(a), U(b).
MayHb(a, b) :- U(a), U(b), St(a, t1), St(b, t2), t1 != t2, !MustHb(b, a).
MayHb(a, b) :- LoopCarried(a, b), U(a), U(b).
MayHb(a, c) :- MayHb(a, b), MayHb(b, c), a != c, !MustHb(c, a).

CoveredStore(s1, v, l) :- Store(s1, v), Store(s2, v), PostDom(s2, s1), SameCS(s1, s2, l).
CoveredLoad(s2, v, l) :- Store(s1, v), Load(s2, v), Dom(s1, s2), SameCS(s1, s2, l).

NoRf(s1, s2) :- Store(s1, v), Store(s3, v), Load(s2, v), MustHb(s1, s3), MustHb(s3, s2),
                MustPrecede(s3, s2).
NoRf(s1, s2) :- Store(s1, v), Load(s2, v), MayHb(s1, s2), CoveredLoad(s2, v, l),
                DiffCS(s1, s2, l).
NoRf(s1, s2) :- Store(s1, v), Load(s2, v), MayHb(s1, s2), CoveredStore(s1, v, l),
                DiffCS(s1, s2, l).

MayRf(s1, s2) :- Store(s1, v), Load(s2, v), MayHb(s1, s2), !NoRf(s1, s2).
)";

const char *Rank2Text = R"(
NoRfs(s1, s3, s2, s3) :- MayRf(s1, s3), MayRf(s2, s3), Store(s1, v), Store(s2, v), s1 != s2,
                         !LoopCarried(s3, s3).
NoRfs(s1, s2, s3, s4) :- MayRf(s1, s2), MayRf(s3, s4), MustHb(s2, s3), MustHb(s4, s1).
NoRfs(s1, s2, s3, s4) :- MayRf(s1, s2), MayRf(s3, s4), Store(s1, v), Store(s3, v),
                         SameCS(s1, s4, l), SameCS(s2, s3, l), DiffCS(s1, s2, l),
                         !LoopCarried(s1, s1), !LoopCarried(s2, s2), !LoopCarried(s3, s3),
                         !LoopCarried(s4, s4).
NoRfs(s1, s2, s1, s4) :- MayRf(s1, s2), MayRf(s1, s4), Store(s1, v), Store(s3, v),
                         PostDom(s3, s2), SameCS(s2, s3, l), DiffCS(s2, s4, l),
                         !LoopCarried(s1, s1).

MayRfs(s1, s2, s3, s4) :- MayRf(s1, s2), MayRf(s3, s4), s1 != s3, !NoRfs(s1, s2, s3, s4).
MayRfs(s1, s2, s3, s4) :- MayRf(s1, s2), MayRf(s3, s4), s2 != s4, !NoRfs(s1, s2, s3, s4).
)";

const char *Rank3Text = R"(
NoRfs3(a1, b1, a2, b2, a3, b3) :- MayRfs(a1, b1, a2, b2), MayRfs(a2, b2, a3, b3),
                                  MayRfs(a1, b1, a3, b3),
                                  MustHb(b1, a2), MustHb(b2, a3), MustHb(b3, a1).
NoRfs3(a1, b1, a2, b2, a3, b3) :- MayRfs(a1, b1, a2, b2), MayRfs(a2, b2, a3, b3),
                                  MayRfs(a1, b1, a3, b3),
                                  MustHb(b1, a3), MustHb(b3, a2), MustHb(b2, a1).
MayRfs3(a1, b1, a2, b2, a3, b3) :- MayRfs(a1, b1, a2, b2), MayRfs(a2, b2, a3, b3),
                                   MayRfs(a1, b1, a3, b3), !NoRfs3(a1, b1, a2, b2, a3, b3).
)";

std::string replaceAll(std::string S, const std::string &From, const std::string &To) {
  for (std::size_t Pos = S.find(From); Pos != std::string::npos;
       Pos = S.find(From, Pos + To.size()))
    S.replace(Pos, From.size(), To);
  return S;
}

class Names {
public:
  explicit Names(const Program &P) {
    for (const Stmt &S : P.stmts)
      ById.emplace(P.name(S.id), S.id);
  }

  StmtId operator()(const std::string &N) const {
    auto It = ById.find(N);
    if (It == ById.end())
      throw InvariantError("derived tuple mentions unknown statement " + N);
    return It->second;
  }

  StmtPairSet pairs(const datalog::Database &Db, const std::string &Rel) const {
    StmtPairSet Out;
    for (const auto &T : Db.tuples(Rel))
      Out.insert({(*this)(T[0]), (*this)(T[1])});
    return Out;
  }

  std::set<RfTuple> edgeTuples(const datalog::Database &Db, const std::string &Rel) const {
    std::set<RfTuple> Out;
    for (const auto &T : Db.tuples(Rel)) {
      RfTuple E;
      for (std::size_t I = 0; I + 1 < T.size(); I += 2)
        E.push_back({(*this)(T[I]), (*this)(T[I + 1])});
      Out.insert(std::move(E));
    }
    return Out;
  }

private:
  std::unordered_map<std::string, StmtId> ById;
};

void checkDisjoint(const StaticAbstractTrace &T) {
  for (const RfEdge &E : T.mayRf)
    if (T.noRf.count(E))
      throw InvariantError("MayRf and NoRf overlap");
  for (const RfTuple &E : T.noRfs)
    if (T.mayRfSets.count(E))
      throw InvariantError("MayRfs and NoRfs overlap");
}

} // namespace

std::set<RfTuple> StaticAbstractTrace::tuples(int K) const {
  std::set<RfTuple> Out;
  if (K == 1) {
    for (const RfEdge &E : mayRf)
      Out.insert({E});
    return Out;
  }
  for (const RfTuple &E : mayRfSets)
    if (static_cast<int>(E.size()) == K)
      Out.insert(E);
  return Out;
}

datalog::RuleProgram rank1Rules(bool AccessRestriction) {
  datalog::RuleProgram RP;
  for (auto &[Name, Arity] : baseRelations())
    RP.declare(Name, Arity);
  // U(s) ranges over the MayHb universe.
  std::string Text = Rank1Text;
  for (const char *V : {"a", "b"})
    Text = replaceAll(Text, std::string("U(") + V + ")",
                      AccessRestriction ? std::string("Access(_, ") + V + ")"
                                        : std::string("St(") + V + ", _)");
  RP.add(Text);
  return RP;
}

datalog::RuleProgram rank2Rules() {
  datalog::RuleProgram RP;
  RP.add(Rank2Text);
  return RP;
}

datalog::RuleProgram rank3Rules() {
  datalog::RuleProgram RP;
  RP.add(Rank3Text);
  return RP;
}

StaticAbstractTrace analyze(const Program &P, const AnalysisOptions &Opts) {
  if (Opts.rank < 1 || Opts.rank > 3)
    throw std::range_error("rank must be between 1 and 3");
  StaticAbstractTrace T;
  T.rank = 1;
  T.fingerprint = P.fingerprint();
  T.facts = extractFacts(P);
  T.db = datalog::evaluate(T.facts.toDatabase(P), rank1Rules(Opts.accessRestriction));

  Names N(P);
  T.mustHb = N.pairs(T.db, "MustHb");
  T.mayHb = N.pairs(T.db, "MayHb");
  T.noRf = N.pairs(T.db, "NoRf");
  T.mayRf = N.pairs(T.db, "MayRf");
  for (auto &[A, B] : T.mustHb)
    if (A == B || (A < B && T.mustHb.count({B, A})))
      T.warnings.push_back("MustHb has a cycle through " + P.name(A) + " and " + P.name(B));
  checkDisjoint(T);
  if (Opts.rank > 1)
    raiseRank(P, T, Opts.rank);
  return T;
}

void raiseRank(const Program &P, StaticAbstractTrace &T, int Rank) {
  if (Rank > 3)
    throw std::range_error("rank must be between 1 and 3");
  Names N(P);
  if (T.rank < 2 && Rank >= 2) {
    T.db = datalog::evaluate(T.db, rank2Rules());
    T.noRfs = N.edgeTuples(T.db, "NoRfs");
    for (const RfTuple &E : N.edgeTuples(T.db, "MayRfs"))
      T.mayRfSets.insert(E);
    T.rank = 2;
  }
  if (T.rank < 3 && Rank >= 3) {
    T.db = datalog::evaluate(T.db, rank3Rules());
    for (const RfTuple &E : N.edgeTuples(T.db, "MayRfs3"))
      T.mayRfSets.insert(E);
    T.rank = 3;
  }
  checkDisjoint(T);
}

std::vector<datalog::Tuple> dumpRelation(const StaticAbstractTrace &T, const std::string &Name) {
  static const std::map<std::string, std::string> Aliases = {
      {"mustHb", "MustHb"}, {"mayHb", "MayHb"},   {"mayRf", "MayRf"},   {"noRf", "NoRf"},
      {"mayRfs", "MayRfs"}, {"noRfs", "NoRfs"},   {"mayRfs3", "MayRfs3"}};
  auto It = Aliases.find(Name);
  return datalog::query(T.db, It == Aliases.end() ? Name : It->second);
}

} // namespace ecdiff
