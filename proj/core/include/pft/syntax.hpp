#ifndef PFT_SYNTAX_HPP
#define PFT_SYNTAX_HPP

// Many-sorted second-order language: objects plus n-ary concepts, with
// predication, per-sort identity, projection and abstraction term formers.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace pft {

class Sort {
 public:
  Sort() = default;
  static Sort object() { return Sort(0); }
  static Sort conc(int arity);
  // Result of an ill-formed projection; never produced by well-sorted input.
  static Sort invalid() { return Sort(-1); }

  bool is_object() const { return arity_ == 0; }
  bool is_concept() const { return arity_ > 0; }
  bool is_valid() const { return arity_ >= 0; }
  int arity() const { return arity_; }

  std::string str() const;

  friend bool operator==(Sort a, Sort b) { return a.arity_ == b.arity_; }
  friend auto operator<=>(Sort a, Sort b) { return a.arity_ <=> b.arity_; }

 private:
  explicit Sort(int arity) : arity_(arity) {}
  int arity_ = 0;
};

struct Var {
  std::string name;
  Sort sort = Sort::object();

  static Var obj(std::string name) { return {std::move(name), Sort::object()}; }
  static Var conc(std::string name, int arity) {
    return {std::move(name), Sort::conc(arity)};
  }

  friend bool operator==(const Var& a, const Var& b) {
    return a.name == b.name && a.sort == b.sort;
  }
  friend bool operator<(const Var& a, const Var& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.sort < b.sort;
  }
};

using VarSet = std::set<Var>;

struct TermNode;
struct FormulaNode;

class Term {
 public:
  enum class Kind { Var, Proj, Abs };

  static Term var(const Var& v);
  static Term obj(std::string name) { return var(Var::obj(std::move(name))); }
  static Term conc(std::string name, int arity) {
    return var(Var::conc(std::move(name), arity));
  }
  static Term proj(Term base, std::vector<Term> args);
  static Term abs(std::string symbol, int symbol_arity, Term arg);

  Kind kind() const;
  Sort sort() const;
  bool is_var() const { return kind() == Kind::Var; }

  // Var
  const Var& as_var() const;
  // Proj
  const Term& base() const;
  std::span<const Term> args() const;
  // Abs
  const std::string& symbol() const;
  int symbol_arity() const;
  const Term& arg() const;

  const std::vector<Var>& free_vars() const;
  bool has_free(const Var& v) const;
  bool has_abstraction() const;

  const TermNode* node() const { return node_.get(); }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
  friend struct TermNode;
};

bool operator==(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

class Formula {
 public:
  enum class Kind { Pred, Eq, Not, And, Or, Implies, Iff, Forall, Exists };

  static Formula pred(Term rel, std::vector<Term> args);
  static Formula eq(Term lhs, Term rhs);
  static Formula neg(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula forall(const Var& v, Formula body);
  static Formula exists(const Var& v, Formula body);
  static Formula binary(Kind k, Formula a, Formula b);
  static Formula quant(Kind k, const Var& v, Formula body);

  // Right-nested conjunction; a single element is returned as is.
  static Formula conj_all(std::span<const Formula> fs);
  static Formula forall_all(std::span<const Var> vs, Formula body);
  static Formula exists_all(std::span<const Var> vs, Formula body);

  Kind kind() const;
  bool is_atomic() const { return kind() == Kind::Pred || kind() == Kind::Eq; }
  bool is_binary() const;
  bool is_quantifier() const {
    return kind() == Kind::Forall || kind() == Kind::Exists;
  }

  // Pred: relation term and arguments. Eq: lhs/rhs.
  const Term& rel() const;
  std::span<const Term> args() const;
  const Term& lhs() const;
  const Term& rhs() const;
  // Not: body(). Binary: left()/right(). Quantifiers: bound()/body().
  const Formula& left() const;
  const Formula& right() const;
  const Formula& body() const;
  const Var& bound() const;

  const std::vector<Var>& free_vars() const;
  bool has_free(const Var& v) const;
  bool has_free_name(const std::string& name) const;
  bool has_abstraction() const;
  bool has_concept_quantifier() const;
  std::size_t size() const;

  const FormulaNode* node() const { return node_.get(); }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
  friend struct FormulaNode;
};

// Structural equality including bound-variable names.
bool operator==(const Formula& a, const Formula& b);
inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

struct TermNode {
  Term::Kind kind;
  Var var;
  std::vector<Term> args;  // Proj: args[0] is the base; Abs: args[0] is the argument.
  std::string symbol;
  int symbol_arity = 0;
  Sort sort = Sort::object();
  std::vector<Var> free;
  bool has_abs = false;

  static Term make(TermNode n);
};

struct FormulaNode {
  Formula::Kind kind;
  std::vector<Term> terms;
  std::vector<Formula> subs;
  Var bound;
  std::vector<Var> free;
  std::size_t size = 1;
  bool has_abs = false;
  bool has_conc_quant = false;

  static Formula make(FormulaNode n);
};

// --- variables and substitution -------------------------------------------

VarSet free_vars(const Formula& f);
VarSet free_vars(const Term& t);
std::set<std::string> all_names(const Formula& f);
void collect_names(const Term& t, std::set<std::string>& out);
void collect_names(const Formula& f, std::set<std::string>& out);

// Smallest "base_N" (or base itself) not in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

using Substitution = std::map<Var, Term>;

// Simultaneous capture-avoiding substitution. Throws SortMismatch when a
// variable is mapped to a term of a different sort.
Formula substitute(const Formula& f, const Substitution& s);
Formula substitute(const Formula& f, const Var& v, const Term& t);
Term substitute(const Term& t, const Substitution& s);

bool alpha_eq(const Formula& f, const Formula& g);

// Printed form with bound variables renamed by binding depth; two formulas
// are alpha-equal iff their keys coincide.
std::string canonical_key(const Formula& f);

// Projection(Projection(R, a), b) -> Projection(R, a ++ b), everywhere.
Term normalize_projections(const Term& t);
Formula normalize_projections(const Formula& f);

// --- signatures ----------------------------------------------------------

// An equivalence formula E(R,S) with its two designated concept variables.
struct EquivDef {
  Formula body;
  Var left;
  Var right;

  int arity() const { return left.sort.arity(); }
  // E with `left`, `right` replaced by the given concept terms.
  Formula apply(const Term& r, const Term& s) const;
};

struct AbstractionSymbol {
  std::string id;
  int arity = 1;
  std::optional<EquivDef> source;
};

class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<AbstractionSymbol> symbols);

  void add(AbstractionSymbol s);
  const AbstractionSymbol* find(const std::string& id) const;
  const std::vector<AbstractionSymbol>& symbols() const { return symbols_; }
  bool empty() const { return symbols_.empty(); }

 private:
  std::vector<AbstractionSymbol> symbols_;
};

// Stable identifier of the abstraction operator for E: a hash of the
// alpha-normal form of E with its two variables in designated position.
std::string canonical_symbol_id(const EquivDef& e);
bool equiv_alpha_eq(const EquivDef& a, const EquivDef& b);

// --- sort checking ---------------------------------------------------------

struct SortError {
  std::string location;
  std::string message;
};

struct SortReport {
  bool ok = true;
  std::vector<SortError> errors;
};

// When `strict_symbols` is false, abstraction symbols absent from `sig` are
// accepted provided their argument has the recorded arity.
SortReport well_sorted(const Signature& sig, const Formula& f, bool strict_symbols = true);
SortReport well_sorted_term(const Signature& sig, const Term& t, bool strict_symbols = true);

// Abstraction symbol ids occurring in f, with their arities.
std::map<std::string, int> abstraction_symbols(const Formula& f);

// --- convenience builders used across modules ------------------------------

Formula pred(const Var& rel, std::vector<Term> args);
Formula pred(const Var& rel, std::span<const Var> args);
Formula obj_eq(const Var& a, const Var& b);
// Componentwise identity of two equal-length object tuples.
Formula tuple_eq(std::span<const Term> a, std::span<const Term> b);
std::vector<Term> as_terms(std::span<const Var> vs);

}  // namespace pft

#endif  // PFT_SYNTAX_HPP
