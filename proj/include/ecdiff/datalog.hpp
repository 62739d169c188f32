//===- datalog.hpp - Stratified bottom-up Datalog ---------------*- C++ -*-===//
//
// A small Datalog evaluator: rules with negated body atoms and inequality
// constraints, stratified by negation and evaluated semi-naively. Constants
// are strings interned per database.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecdiff::datalog {

class DatalogError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Term {
  enum class Kind { Var, Const, Wildcard };
  Kind kind = Kind::Var;
  std::string text;

  static Term var(std::string Name) { return {Kind::Var, std::move(Name)}; }
  static Term constant(std::string Value) { return {Kind::Const, std::move(Value)}; }
  static Term wildcard() { return {Kind::Wildcard, "_"}; }
  friend bool operator==(const Term &, const Term &) = default;
};

struct Atom {
  std::string relation;
  std::vector<Term> args;
  bool negated = false;
};

/// `lhs != rhs`; both sides must be bound by positive body atoms.
struct Inequality {
  Term lhs;
  Term rhs;
};

struct Rule {
  Atom head;
  std::vector<Atom> body;
  std::vector<Inequality> constraints;

  std::string str() const;
};

class RuleProgram {
public:
  /// Declares a relation; redeclaring with another arity is an error.
  void declare(const std::string &Relation, std::size_t Arity);
  /// Adds a rule after checking arities and range restriction.
  void add(Rule R);
  /// Parses `Head(x,y) :- Body(x,z), !Neg(z), x != y.` rules, one or more,
  /// with `//` comments. `_` is a wildcard and "quoted" text a constant.
  void add(std::string_view Text);
  void append(const RuleProgram &Other);

  const std::vector<Rule> &rules() const { return Rules; }
  const std::map<std::string, std::size_t> &arities() const { return Arities; }
  std::set<std::string> derivedRelations() const;

private:
  std::vector<Rule> Rules;
  std::map<std::string, std::size_t> Arities;
};

std::vector<Rule> parseRules(std::string_view Text);

using Tuple = std::vector<std::string>;

namespace detail {
struct Store;
}

/// Relations of constant tuples with set semantics.
class Database {
public:
  Database();
  Database(const Database &Other);
  Database &operator=(const Database &Other);
  Database(Database &&) noexcept;
  Database &operator=(Database &&) noexcept;
  ~Database();

  void declare(const std::string &Relation, std::size_t Arity);
  /// Returns true when the tuple was new.
  bool insert(const std::string &Relation, const Tuple &T);
  bool contains(const std::string &Relation, const Tuple &T) const;
  bool hasRelation(const std::string &Relation) const;
  std::size_t arity(const std::string &Relation) const;
  std::size_t size(const std::string &Relation) const;
  std::set<Tuple> tuples(const std::string &Relation) const;
  std::vector<std::string> relations() const;

  friend bool operator==(const Database &A, const Database &B);

  detail::Store &store() { return *Impl; }
  const detail::Store &store() const { return *Impl; }

private:
  std::unique_ptr<detail::Store> Impl;
};

/// Relations grouped into strata in evaluation order; a stratum only
/// negates relations of strictly earlier strata. Relations without rules
/// are not listed.
std::vector<std::vector<std::string>> stratify(const RuleProgram &RP);

/// Evaluates RP over the facts to the minimal model. The result contains
/// the input facts.
Database evaluate(const Database &Facts, const RuleProgram &RP);

/// Tuples of Relation matching the pattern (nullopt = wildcard), sorted.
std::vector<Tuple> query(const Database &Db, const std::string &Relation,
                         const std::vector<std::optional<std::string>> &Pattern = {});

} // namespace ecdiff::datalog
