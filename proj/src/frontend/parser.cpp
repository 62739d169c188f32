//===- parser.cpp - Recursive-descent parser for .cp programs ------------===//

#include "ecdiff/frontend.hpp"
#include "lexer.hpp"
#include "locksets.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ecdiff {

FrontendError::FrontendError(const std::string &Msg, int L, int C)
    : std::runtime_error(L > 0 ? std::to_string(L) + ":" + std::to_string(C) + ": " + Msg
                               : Msg),
      Line(L), Column(C) {}

//===----------------------------------------------------------------------===//
// Expressions
//===----------------------------------------------------------------------===//

ExprPtr Expr::constant(std::int64_t V) {
  auto E = std::make_shared<Expr>();
  E->kind = Kind::Const;
  E->value = V;
  return E;
}

ExprPtr Expr::variable(std::string Name) {
  auto E = std::make_shared<Expr>();
  E->kind = Kind::Var;
  E->name = std::move(Name);
  return E;
}

ExprPtr Expr::unary(Kind K, ExprPtr Operand) {
  auto E = std::make_shared<Expr>();
  E->kind = K;
  E->lhs = std::move(Operand);
  return E;
}

ExprPtr Expr::binary(Op O, ExprPtr L, ExprPtr R) {
  auto E = std::make_shared<Expr>();
  E->kind = Kind::Binary;
  E->op = O;
  E->lhs = std::move(L);
  E->rhs = std::move(R);
  return E;
}

void Expr::collectReads(std::set<std::string> &Out) const {
  switch (kind) {
  case Kind::Const:
    return;
  case Kind::Var:
    Out.insert(name);
    return;
  case Kind::Not:
  case Kind::Neg:
    lhs->collectReads(Out);
    return;
  case Kind::Binary:
    lhs->collectReads(Out);
    rhs->collectReads(Out);
    return;
  }
}

std::optional<std::int64_t> Expr::constantValue() const {
  std::set<std::string> Reads;
  collectReads(Reads);
  if (!Reads.empty())
    return std::nullopt;
  return evaluate(*this, [](const std::string &) -> std::int64_t { return 0; });
}

namespace {

const char *opText(Expr::Op O) {
  switch (O) {
  case Expr::Op::Add: return "+";
  case Expr::Op::Sub: return "-";
  case Expr::Op::Mul: return "*";
  case Expr::Op::Eq: return "==";
  case Expr::Op::Ne: return "!=";
  case Expr::Op::Lt: return "<";
  case Expr::Op::Le: return "<=";
  case Expr::Op::Gt: return ">";
  case Expr::Op::Ge: return ">=";
  }
  return "?";
}

std::int64_t wrap(std::uint64_t V) { return static_cast<std::int64_t>(V); }

} // namespace

std::string Expr::str() const {
  switch (kind) {
  case Kind::Const:
    return std::to_string(value);
  case Kind::Var:
    return name;
  case Kind::Not:
    return "!" + lhs->str();
  case Kind::Neg:
    return "-" + lhs->str();
  case Kind::Binary:
    return "(" + lhs->str() + " " + opText(op) + " " + rhs->str() + ")";
  }
  return {};
}

std::int64_t evaluate(const Expr &E,
                      const std::function<std::int64_t(const std::string &)> &Lookup) {
  switch (E.kind) {
  case Expr::Kind::Const:
    return E.value;
  case Expr::Kind::Var:
    return Lookup(E.name);
  case Expr::Kind::Not:
    return evaluate(*E.lhs, Lookup) == 0 ? 1 : 0;
  case Expr::Kind::Neg:
    return wrap(0u - static_cast<std::uint64_t>(evaluate(*E.lhs, Lookup)));
  case Expr::Kind::Binary:
    break;
  }
  auto L = evaluate(*E.lhs, Lookup);
  auto R = evaluate(*E.rhs, Lookup);
  auto UL = static_cast<std::uint64_t>(L), UR = static_cast<std::uint64_t>(R);
  switch (E.op) {
  case Expr::Op::Add: return wrap(UL + UR);
  case Expr::Op::Sub: return wrap(UL - UR);
  case Expr::Op::Mul: return wrap(UL * UR);
  case Expr::Op::Eq: return L == R;
  case Expr::Op::Ne: return L != R;
  case Expr::Op::Lt: return L < R;
  case Expr::Op::Le: return L <= R;
  case Expr::Op::Gt: return L > R;
  case Expr::Op::Ge: return L >= R;
  }
  return 0;
}

std::string_view kindName(StmtKind K) {
  switch (K) {
  case StmtKind::Assign: return "assign";
  case StmtKind::Lock: return "lock";
  case StmtKind::Unlock: return "unlock";
  case StmtKind::Signal: return "signal";
  case StmtKind::Wait: return "wait";
  case StmtKind::Create: return "create";
  case StmtKind::Join: return "join";
  case StmtKind::Assert: return "assert";
  case StmtKind::Skip: return "skip";
  case StmtKind::If: return "if";
  case StmtKind::While: return "while";
  }
  return "?";
}

//===----------------------------------------------------------------------===//
// Program queries
//===----------------------------------------------------------------------===//

std::string Program::name(StmtId Id) const {
  const Stmt &S = stmt(Id);
  if (S.label)
    return *S.label;
  return threads[S.thread].name + "#" + std::to_string(S.indexInThread);
}

std::optional<StmtId> Program::findByName(std::string_view N) const {
  for (const Stmt &S : stmts)
    if (name(S.id) == N)
      return S.id;
  return std::nullopt;
}

std::optional<std::size_t> Program::findThread(std::string_view N) const {
  for (std::size_t I = 0; I < threads.size(); ++I)
    if (threads[I].name == N)
      return I;
  return std::nullopt;
}

const Global *Program::findGlobal(std::string_view N) const {
  for (const Global &G : globals)
    if (G.name == N)
      return &G;
  return nullptr;
}

std::vector<StmtId> Program::threadStmts(std::size_t Thread) const {
  std::vector<StmtId> Out;
  std::function<void(const std::vector<StmtId> &)> Walk = [&](const std::vector<StmtId> &Body) {
    for (StmtId Id : Body) {
      Out.push_back(Id);
      Walk(stmt(Id).thenBody);
      Walk(stmt(Id).elseBody);
    }
  };
  Walk(threads.at(Thread).body);
  return Out;
}

std::string Program::fingerprint() const {
  std::ostringstream OS;
  for (const Global &G : globals)
    OS << "var " << G.name << "=" << G.init << ";";
  for (const ThreadDef &T : threads) {
    OS << "thread " << T.name << "{";
    for (StmtId Id : threadStmts(&T - threads.data())) {
      const Stmt &S = stmt(Id);
      OS << name(Id) << ":" << kindName(S.kind) << "(" << S.target << "," << S.mutex << ","
         << (S.expr ? S.expr->str() : "") << "," << S.thenBody.size() << ","
         << S.elseBody.size() << ");";
    }
    OS << "}";
  }
  // FNV-1a, so the digest does not depend on the standard library.
  std::uint64_t H = 1469598103934665603ull;
  for (unsigned char C : OS.str())
    H = (H ^ C) * 1099511628211ull;
  char Buf[17];
  std::snprintf(Buf, sizeof Buf, "%016llx", static_cast<unsigned long long>(H));
  return Buf;
}

//===----------------------------------------------------------------------===//
// Parser
//===----------------------------------------------------------------------===//

namespace {

using detail::Token;

struct ParsedStmt {
  std::optional<std::string> label;
  StmtKind kind = StmtKind::Skip;
  std::string target;
  std::string mutex;
  ExprPtr expr;
  std::vector<ParsedStmt> thenBody;
  std::vector<ParsedStmt> elseBody;
  int line = 0;
  int column = 0;
};

struct ParsedThread {
  std::string name;
  std::vector<ParsedStmt> body;
  int line = 0;
  int column = 0;
};

struct NamedDecl {
  std::string name;
  int line = 0;
  int column = 0;
};

class Parser {
public:
  explicit Parser(std::vector<Token> Toks) : Toks(std::move(Toks)) {}

  void parseUnit() {
    while (!atEnd()) {
      const Token &T = peek();
      if (isWord("var")) {
        next();
        NamedDecl D = declName();
        expect("=");
        std::int64_t Init = signedLiteral();
        expect(";");
        Globals.push_back({D, Init});
      } else if (isWord("lock")) {
        next();
        Locks.push_back(declName());
        expect(";");
      } else if (isWord("cond")) {
        next();
        Conds.push_back(declName());
        expect(";");
      } else if (isWord("thread")) {
        next();
        ParsedThread Th;
        NamedDecl D = declName();
        Th.name = D.name;
        Th.line = D.line;
        Th.column = D.column;
        Th.body = block();
        Threads.push_back(std::move(Th));
      } else {
        fail("expected 'var', 'lock', 'cond' or 'thread', found '" + T.text + "'", T);
      }
    }
  }

  std::vector<std::pair<NamedDecl, std::int64_t>> Globals;
  std::vector<NamedDecl> Locks;
  std::vector<NamedDecl> Conds;
  std::vector<ParsedThread> Threads;

private:
  std::vector<Token> Toks;
  std::size_t Pos = 0;

  static bool isKeyword(const std::string &S) {
    static const std::unordered_set<std::string> Keywords = {
        "var",    "lock", "cond",   "thread", "unlock", "signal", "wait", "create",
        "join",   "assert", "skip", "if",     "else",   "while",  "true", "false"};
    return Keywords.count(S) != 0;
  }

  const Token &peek(std::size_t Ahead = 0) const {
    return Toks[std::min(Pos + Ahead, Toks.size() - 1)];
  }
  const Token &next() {
    const Token &T = Toks[Pos];
    if (Pos + 1 < Toks.size())
      ++Pos;
    return T;
  }
  bool atEnd() const { return peek().kind == Token::Kind::End; }
  bool isWord(std::string_view W, std::size_t Ahead = 0) const {
    return peek(Ahead).kind == Token::Kind::Ident && peek(Ahead).text == W;
  }
  bool isPunct(std::string_view P, std::size_t Ahead = 0) const {
    return peek(Ahead).kind == Token::Kind::Punct && peek(Ahead).text == P;
  }

  [[noreturn]] static void fail(const std::string &Msg, const Token &At) {
    throw FrontendError(Msg, At.line, At.column);
  }

  static std::string describe(const Token &T) {
    return T.kind == Token::Kind::End ? std::string("end of input") : "'" + T.text + "'";
  }

  void expect(std::string_view P) {
    if (!isPunct(P))
      fail("expected '" + std::string(P) + "', found " + describe(peek()), peek());
    next();
  }

  NamedDecl declName() {
    const Token &T = peek();
    if (T.kind != Token::Kind::Ident || isKeyword(T.text))
      fail("expected a name, found " + describe(T), T);
    next();
    return {T.text, T.line, T.column};
  }

  std::int64_t signedLiteral() {
    bool Negative = false;
    if (isPunct("-")) {
      next();
      Negative = true;
    }
    const Token &T = peek();
    std::int64_t V = 0;
    if (T.kind == Token::Kind::Int) {
      V = T.value;
    } else if (isWord("true")) {
      V = 1;
    } else if (isWord("false")) {
      V = 0;
    } else {
      fail("expected an integer initializer, found " + describe(T), T);
    }
    next();
    return Negative ? -V : V;
  }

  std::vector<ParsedStmt> block() {
    expect("{");
    std::vector<ParsedStmt> Body;
    while (!isPunct("}")) {
      if (atEnd())
        fail("unterminated block", peek());
      Body.push_back(statement());
    }
    next();
    return Body;
  }

  std::string parenName() {
    expect("(");
    NamedDecl D = declName();
    expect(")");
    return D.name;
  }

  ParsedStmt statement() {
    ParsedStmt S;
    const Token &First = peek();
    S.line = First.line;
    S.column = First.column;
    if (First.kind == Token::Kind::Ident && !isKeyword(First.text) && isPunct(":", 1)) {
      S.label = First.text;
      next();
      next();
    }
    const Token &T = peek();
    if (T.kind != Token::Kind::Ident)
      fail("expected a statement, found " + describe(T), T);

    auto simple = [&](StmtKind K) {
      next();
      S.kind = K;
      S.target = parenName();
      expect(";");
    };

    if (isWord("lock")) {
      simple(StmtKind::Lock);
    } else if (isWord("unlock")) {
      simple(StmtKind::Unlock);
    } else if (isWord("signal")) {
      simple(StmtKind::Signal);
    } else if (isWord("create")) {
      simple(StmtKind::Create);
    } else if (isWord("join")) {
      simple(StmtKind::Join);
    } else if (isWord("wait")) {
      next();
      S.kind = StmtKind::Wait;
      expect("(");
      S.target = declName().name;
      expect(",");
      S.mutex = declName().name;
      expect(")");
      expect(";");
    } else if (isWord("assert")) {
      next();
      S.kind = StmtKind::Assert;
      expect("(");
      S.expr = expression();
      expect(")");
      expect(";");
    } else if (isWord("skip")) {
      next();
      S.kind = StmtKind::Skip;
      expect(";");
    } else if (isWord("if")) {
      next();
      S.kind = StmtKind::If;
      expect("(");
      S.expr = expression();
      expect(")");
      S.thenBody = block();
      if (isWord("else")) {
        next();
        if (isWord("if") || (peek().kind == Token::Kind::Ident && isPunct(":", 1)))
          S.elseBody.push_back(statement());
        else
          S.elseBody = block();
      }
    } else if (isWord("while")) {
      next();
      S.kind = StmtKind::While;
      expect("(");
      S.expr = expression();
      expect(")");
      S.thenBody = block();
    } else if (!isKeyword(T.text) && isPunct("=", 1)) {
      S.kind = StmtKind::Assign;
      S.target = T.text;
      next();
      next();
      S.expr = expression();
      expect(";");
    } else {
      fail("expected a statement, found " + describe(T), T);
    }
    return S;
  }

  // equality < relational < additive < multiplicative < unary < primary
  ExprPtr expression() { return equality(); }

  ExprPtr equality() {
    ExprPtr L = relational();
    while (isPunct("==") || isPunct("!=")) {
      auto O = next().text == "==" ? Expr::Op::Eq : Expr::Op::Ne;
      L = Expr::binary(O, L, relational());
    }
    return L;
  }

  ExprPtr relational() {
    ExprPtr L = additive();
    while (isPunct("<") || isPunct("<=") || isPunct(">") || isPunct(">=")) {
      const std::string &Op = next().text;
      Expr::Op O = Op == "<"    ? Expr::Op::Lt
                   : Op == "<=" ? Expr::Op::Le
                   : Op == ">"  ? Expr::Op::Gt
                                : Expr::Op::Ge;
      L = Expr::binary(O, L, additive());
    }
    return L;
  }

  ExprPtr additive() {
    ExprPtr L = multiplicative();
    while (isPunct("+") || isPunct("-")) {
      auto O = next().text == "+" ? Expr::Op::Add : Expr::Op::Sub;
      L = Expr::binary(O, L, multiplicative());
    }
    return L;
  }

  ExprPtr multiplicative() {
    ExprPtr L = unary();
    while (isPunct("*")) {
      next();
      L = Expr::binary(Expr::Op::Mul, L, unary());
    }
    return L;
  }

  ExprPtr unary() {
    if (isPunct("!")) {
      next();
      return Expr::unary(Expr::Kind::Not, unary());
    }
    if (isPunct("-")) {
      next();
      return Expr::unary(Expr::Kind::Neg, unary());
    }
    return primary();
  }

  ExprPtr primary() {
    const Token &T = peek();
    if (T.kind == Token::Kind::Int) {
      next();
      return Expr::constant(T.value);
    }
    if (isWord("true") || isWord("false")) {
      next();
      return Expr::constant(T.text == "true" ? 1 : 0);
    }
    if (isPunct("(")) {
      next();
      ExprPtr E = expression();
      expect(")");
      return E;
    }
    if (T.kind == Token::Kind::Ident && !isKeyword(T.text)) {
      next();
      auto E = Expr::variable(T.text);
      // Remember the position of the first use for undeclared-name errors.
      VarUses.emplace(T.text, std::make_pair(T.line, T.column));
      return E;
    }
    fail("expected an expression, found " + describe(T), T);
  }

public:
  std::multimap<std::string, std::pair<int, int>> VarUses;
};

/// Lays parsed statements out in the flat table and checks names.
class Builder {
public:
  Builder(Parser &Pr, Program &P) : Pr(Pr), P(P) {}

  void run() {
    declare();
    if (Pr.Threads.empty())
      throw FrontendError("program declares no thread");
    P.entry = 0;
    for (std::size_t I = 0; I < Pr.Threads.size(); ++I)
      if (Pr.Threads[I].name == "main")
        P.entry = I;
    for (const ParsedThread &T : Pr.Threads)
      P.threads.push_back({T.name, {}});

    // Initialization stores first, so that they get the lowest ids.
    std::vector<StmtId> InitIds;
    for (const Global &G : P.globals) {
      Stmt S;
      S.id = StmtId{static_cast<std::uint32_t>(P.stmts.size())};
      S.label = "__init_" + G.name;
      S.kind = StmtKind::Assign;
      S.thread = P.entry;
      S.target = G.name;
      S.expr = Expr::constant(G.init);
      S.writes = G.name;
      S.synthesized = true;
      InitIds.push_back(S.id);
      P.stmts.push_back(std::move(S));
    }
    P.threads[P.entry].body = InitIds;

    for (std::size_t I = 0; I < Pr.Threads.size(); ++I) {
      CurThread = I;
      std::vector<StmtId> Body = layout(Pr.Threads[I].body, /*InLoop=*/false);
      auto &Dst = P.threads[I].body;
      Dst.insert(Dst.end(), Body.begin(), Body.end());
    }
    for (std::size_t I = 0; I < P.threads.size(); ++I) {
      std::size_t K = 0;
      for (StmtId Id : P.threadStmts(I))
        P.stmts[Id.value].indexInThread = K++;
    }
    checkCreation();
  }

private:
  Parser &Pr;
  Program &P;
  std::size_t CurThread = 0;
  std::unordered_map<std::string, std::string> Kinds; // name -> declared kind
  std::unordered_set<std::string> Labels;

  void declare() {
    auto add = [&](const NamedDecl &D, const char *Kind) {
      auto [It, Inserted] = Kinds.emplace(D.name, Kind);
      if (!Inserted)
        throw FrontendError("duplicate declaration of " + D.name, D.line, D.column);
    };
    for (auto &[D, Init] : Pr.Globals) {
      add(D, "var");
      P.globals.push_back({D.name, Init});
    }
    for (const NamedDecl &D : Pr.Locks) {
      add(D, "lock");
      P.locks.push_back(D.name);
    }
    for (const NamedDecl &D : Pr.Conds) {
      add(D, "cond");
      P.conds.push_back(D.name);
    }
    for (const ParsedThread &T : Pr.Threads)
      add({T.name, T.line, T.column}, "thread");
  }

  void requireKind(const std::string &Name, const char *Kind, const ParsedStmt &S) {
    auto It = Kinds.find(Name);
    if (It == Kinds.end())
      throw FrontendError("undeclared name " + Name, S.line, S.column);
    if (It->second != Kind)
      throw FrontendError(Name + " is a " + It->second + ", expected a " + Kind, S.line,
                          S.column);
  }

  std::vector<StmtId> layout(const std::vector<ParsedStmt> &Body, bool InLoop) {
    std::vector<StmtId> Ids;
    for (const ParsedStmt &PS : Body)
      Ids.push_back(layoutOne(PS, InLoop));
    return Ids;
  }

  StmtId layoutOne(const ParsedStmt &PS, bool InLoop) {
    StmtId Id{static_cast<std::uint32_t>(P.stmts.size())};
    {
      Stmt S;
      S.id = Id;
      S.label = PS.label;
      S.kind = PS.kind;
      S.thread = CurThread;
      S.target = PS.target;
      S.mutex = PS.mutex;
      S.expr = PS.expr;
      S.line = PS.line;
      S.column = PS.column;
      P.stmts.push_back(std::move(S));
    }
    if (PS.label) {
      if (PS.label->rfind("__", 0) == 0)
        throw FrontendError("labels starting with '__' are reserved: " + *PS.label, PS.line,
                            PS.column);
      if (!Labels.insert(*PS.label).second)
        throw FrontendError("duplicate label " + *PS.label, PS.line, PS.column);
    }

    std::set<std::string> Reads;
    if (PS.expr)
      PS.expr->collectReads(Reads);
    for (const std::string &R : Reads)
      requireKind(R, "var", PS);

    switch (PS.kind) {
    case StmtKind::Assign:
      requireKind(PS.target, "var", PS);
      P.stmts[Id.value].writes = PS.target;
      break;
    case StmtKind::Lock:
    case StmtKind::Unlock:
      requireKind(PS.target, "lock", PS);
      break;
    case StmtKind::Signal:
      requireKind(PS.target, "cond", PS);
      break;
    case StmtKind::Wait:
      requireKind(PS.target, "cond", PS);
      requireKind(PS.mutex, "lock", PS);
      break;
    case StmtKind::Create:
    case StmtKind::Join:
      requireKind(PS.target, "thread", PS);
      if (InLoop)
        throw FrontendError(std::string(kindName(PS.kind)) + " inside a loop is not supported",
                            PS.line, PS.column);
      break;
    default:
      break;
    }
    P.stmts[Id.value].reads = std::move(Reads);

    std::vector<StmtId> Then = layout(PS.thenBody, InLoop || PS.kind == StmtKind::While);
    std::vector<StmtId> Else = layout(PS.elseBody, InLoop);
    P.stmts[Id.value].thenBody = std::move(Then);
    P.stmts[Id.value].elseBody = std::move(Else);
    return Id;
  }

  void checkCreation() {
    std::vector<int> Creators(P.threads.size(), 0);
    std::vector<std::vector<std::size_t>> Children(P.threads.size());
    for (const Stmt &S : P.stmts) {
      if (S.kind != StmtKind::Create)
        continue;
      std::size_t Child = *P.findThread(S.target);
      if (Child == P.entry)
        throw FrontendError("the entry thread " + S.target + " cannot be created", S.line,
                            S.column);
      if (++Creators[Child] > 1)
        throw FrontendError("thread " + S.target + " is created more than once", S.line,
                            S.column);
      Children[S.thread].push_back(Child);
    }
    std::vector<bool> Seen(P.threads.size(), false);
    std::vector<std::size_t> Work{P.entry};
    Seen[P.entry] = true;
    while (!Work.empty()) {
      std::size_t T = Work.back();
      Work.pop_back();
      for (std::size_t C : Children[T])
        if (!Seen[C]) {
          Seen[C] = true;
          Work.push_back(C);
        }
    }
    for (std::size_t I = 0; I < P.threads.size(); ++I)
      if (!Seen[I])
        throw FrontendError("thread " + P.threads[I].name +
                            " is never created by the entry thread " +
                            P.threads[P.entry].name);
  }
};

} // namespace

Program parse(std::string_view Source) {
  Parser Pr(detail::tokenize(Source));
  Pr.parseUnit();
  Program P;
  Builder(Pr, P).run();
  detail::checkWaits(P);
  return P;
}

Program parseFile(const std::string &Path) {
  std::ifstream In(Path, std::ios::binary);
  if (!In)
    throw FrontendError("cannot open " + Path);
  std::ostringstream SS;
  SS << In.rdbuf();
  return parse(SS.str());
}

} // namespace ecdiff
