//===- rule_text.cpp - Rule syntax and RuleProgram checks -----------------===//

#include "ecdiff/datalog.hpp"

#include <cctype>

namespace ecdiff::datalog {

namespace {

std::string termText(const Term &T) {
  return T.kind == Term::Kind::Const ? "\"" + T.text + "\"" : T.text;
}

std::string atomText(const Atom &A) {
  std::string Out = A.negated ? "!" : "";
  Out += A.relation + "(";
  for (std::size_t I = 0; I < A.args.size(); ++I)
    Out += (I ? ", " : "") + termText(A.args[I]);
  return Out + ")";
}

class RuleParser {
public:
  explicit RuleParser(std::string_view Text) : Text(Text) {}

  std::vector<Rule> parseAll() {
    std::vector<Rule> Out;
    skipSpace();
    while (Pos < Text.size()) {
      Out.push_back(rule());
      skipSpace();
    }
    return Out;
  }

private:
  std::string_view Text;
  std::size_t Pos = 0;

  [[noreturn]] void fail(const std::string &Msg) const {
    std::size_t Line = 1;
    for (std::size_t I = 0; I < Pos && I < Text.size(); ++I)
      Line += Text[I] == '\n';
    throw DatalogError("rule text line " + std::to_string(Line) + ": " + Msg);
  }

  void skipSpace() {
    for (;;) {
      while (Pos < Text.size() && std::isspace(static_cast<unsigned char>(Text[Pos])))
        ++Pos;
      if (Text.substr(Pos, 2) != "//")
        return;
      while (Pos < Text.size() && Text[Pos] != '\n')
        ++Pos;
    }
  }

  bool consume(std::string_view S) {
    skipSpace();
    if (Text.substr(Pos, S.size()) != S)
      return false;
    Pos += S.size();
    return true;
  }

  void expect(std::string_view S) {
    if (!consume(S))
      fail("expected '" + std::string(S) + "'");
  }

  std::string ident() {
    skipSpace();
    std::size_t Start = Pos;
    while (Pos < Text.size() &&
           (std::isalnum(static_cast<unsigned char>(Text[Pos])) || Text[Pos] == '_'))
      ++Pos;
    if (Start == Pos)
      fail("expected an identifier");
    return std::string(Text.substr(Start, Pos - Start));
  }

  Term term() {
    skipSpace();
    if (Pos < Text.size() && Text[Pos] == '"') {
      std::size_t End = Text.find('"', Pos + 1);
      if (End == std::string_view::npos)
        fail("unterminated string constant");
      Term T = Term::constant(std::string(Text.substr(Pos + 1, End - Pos - 1)));
      Pos = End + 1;
      return T;
    }
    std::string Name = ident();
    if (Name == "_")
      return Term::wildcard();
    if (std::isdigit(static_cast<unsigned char>(Name[0])))
      return Term::constant(Name);
    return Term::var(Name);
  }

  Atom atom() {
    Atom A;
    A.negated = consume("!");
    A.relation = ident();
    expect("(");
    if (!consume(")")) {
      do
        A.args.push_back(term());
      while (consume(","));
      expect(")");
    }
    return A;
  }

  Rule rule() {
    Rule R;
    R.head = atom();
    if (R.head.negated)
      fail("negated head in rule for " + R.head.relation);
    expect(":-");
    do {
      skipSpace();
      // A body element is an inequality when a term is followed by `!=`.
      std::size_t Save = Pos;
      bool IsAtom = Pos < Text.size() && Text[Pos] == '!';
      if (!IsAtom) {
        Term L = term();
        if (consume("!=")) {
          R.constraints.push_back({L, term()});
          continue;
        }
        Pos = Save;
      }
      R.body.push_back(atom());
    } while (consume(","));
    expect(".");
    return R;
  }
};

} // namespace

std::string Rule::str() const {
  std::string Out = atomText(head) + " :- ";
  bool First = true;
  for (const Atom &A : body) {
    Out += (First ? "" : ", ") + atomText(A);
    First = false;
  }
  for (const Inequality &C : constraints) {
    Out += (First ? "" : ", ") + termText(C.lhs) + " != " + termText(C.rhs);
    First = false;
  }
  return Out + ".";
}

std::vector<Rule> parseRules(std::string_view Text) { return RuleParser(Text).parseAll(); }

void RuleProgram::declare(const std::string &Relation, std::size_t Arity) {
  auto [It, Inserted] = Arities.emplace(Relation, Arity);
  if (!Inserted && It->second != Arity)
    throw DatalogError("relation " + Relation + " used with arity " + std::to_string(Arity) +
                       " but declared with arity " + std::to_string(It->second));
}

void RuleProgram::add(Rule R) {
  if (R.head.negated)
    throw DatalogError("negated head in " + R.str());
  if (R.body.empty())
    throw DatalogError("rule without body: " + R.str());
  declare(R.head.relation, R.head.args.size());
  std::set<std::string> Bound;
  for (const Atom &A : R.body) {
    declare(A.relation, A.args.size());
    if (!A.negated)
      for (const Term &T : A.args)
        if (T.kind == Term::Kind::Var)
          Bound.insert(T.text);
  }
  auto require = [&](const Term &T) {
    if (T.kind == Term::Kind::Var && !Bound.count(T.text))
      throw DatalogError("variable " + T.text + " is not bound by a positive atom in " +
                         R.str());
  };
  for (const Term &T : R.head.args) {
    if (T.kind == Term::Kind::Wildcard)
      throw DatalogError("wildcard in rule head: " + R.str());
    require(T);
  }
  for (const Atom &A : R.body)
    if (A.negated)
      for (const Term &T : A.args)
        require(T);
  for (const Inequality &C : R.constraints) {
    if (C.lhs.kind == Term::Kind::Wildcard || C.rhs.kind == Term::Kind::Wildcard)
      throw DatalogError("wildcard in inequality: " + R.str());
    require(C.lhs);
    require(C.rhs);
  }
  Rules.push_back(std::move(R));
}

void RuleProgram::add(std::string_view Text) {
  for (Rule &R : parseRules(Text))
    add(std::move(R));
}

void RuleProgram::append(const RuleProgram &Other) {
  for (auto &[Name, Arity] : Other.Arities)
    declare(Name, Arity);
  for (const Rule &R : Other.Rules)
    add(R);
}

std::set<std::string> RuleProgram::derivedRelations() const {
  std::set<std::string> Out;
  for (const Rule &R : Rules)
    Out.insert(R.head.relation);
  return Out;
}

} // namespace ecdiff::datalog
