#include "pft/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "pft/error.hpp"

namespace pft {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::UnknownSymbol: return "unknown abstraction symbol";
    case ErrorKind::SortMismatch: return "sort mismatch";
    case ErrorKind::NotFirstOrder: return "not first-order";
    case ErrorKind::VariableCollision: return "variable collision";
    case ErrorKind::WrongClass: return "wrong formula class";
    case ErrorKind::BadArity: return "bad arity";
    case ErrorKind::BadFreeVariables: return "bad free variables";
    case ErrorKind::WrongLanguageLevel: return "wrong language level";
    case ErrorKind::CertificateRejected: return "certificate rejected";
    case ErrorKind::LevelMismatch: return "level mismatch";
    case ErrorKind::UnknownName: return "unknown name";
    case ErrorKind::UnsupportedAbstractionTerm: return "unsupported abstraction term";
    case ErrorKind::UnboundVariable: return "unbound variable";
    case ErrorKind::CapExceeded: return "enumeration cap exceeded";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

Sort Sort::conc(int arity) {
  if (arity < 1) throw Error(ErrorKind::BadArity, "concept arity must be >= 1");
  return Sort(arity);
}

std::string Sort::str() const {
  if (arity_ == 0) return "Obj";
  if (arity_ < 0) return "?";
  return "(Conc " + std::to_string(arity_) + ")";
}

namespace {

void merge_free(std::vector<Var>& into, const std::vector<Var>& from) {
  if (from.empty()) return;
  if (into.empty()) {
    into = from;
    return;
  }
  std::vector<Var> out;
  out.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into = std::move(out);
}

bool sorted_contains(const std::vector<Var>& vs, const Var& v) {
  return std::binary_search(vs.begin(), vs.end(), v);
}

}  // namespace

// --- Term --------------------------------------------------------------------

Term TermNode::make(TermNode n) {
  return Term(std::make_shared<const TermNode>(std::move(n)));
}

Term Term::var(const Var& v) {
  TermNode n;
  n.kind = Kind::Var;
  n.var = v;
  n.sort = v.sort;
  n.free = {v};
  return TermNode::make(std::move(n));
}

Term Term::proj(Term base, std::vector<Term> args) {
  TermNode n;
  n.kind = Kind::Proj;
  const int m = static_cast<int>(args.size());
  if (base.sort().is_concept() && base.sort().arity() > m && m >= 1) {
    n.sort = Sort::conc(base.sort().arity() - m);
  } else {
    n.sort = Sort::invalid();
  }
  n.free = base.free_vars();
  n.has_abs = base.has_abstraction();
  for (const Term& a : args) {
    merge_free(n.free, a.free_vars());
    n.has_abs = n.has_abs || a.has_abstraction();
  }
  n.args.reserve(args.size() + 1);
  n.args.push_back(std::move(base));
  for (Term& a : args) n.args.push_back(std::move(a));
  return TermNode::make(std::move(n));
}

Term Term::abs(std::string symbol, int symbol_arity, Term arg) {
  TermNode n;
  n.kind = Kind::Abs;
  n.symbol = std::move(symbol);
  n.symbol_arity = symbol_arity;
  n.sort = Sort::object();
  n.free = arg.free_vars();
  n.has_abs = true;
  n.args.push_back(std::move(arg));
  return TermNode::make(std::move(n));
}

Term::Kind Term::kind() const { return node_->kind; }
Sort Term::sort() const { return node_->sort; }
const Var& Term::as_var() const { return node_->var; }
const Term& Term::base() const { return node_->args.front(); }
std::span<const Term> Term::args() const {
  return std::span<const Term>(node_->args).subspan(1);
}
const std::string& Term::symbol() const { return node_->symbol; }
int Term::symbol_arity() const { return node_->symbol_arity; }
const Term& Term::arg() const { return node_->args.front(); }
const std::vector<Var>& Term::free_vars() const { return node_->free; }
bool Term::has_free(const Var& v) const { return sorted_contains(node_->free, v); }
bool Term::has_abstraction() const { return node_->has_abs; }

bool operator==(const Term& a, const Term& b) {
  if (a.node() == b.node()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.as_var() == b.as_var();
    case Term::Kind::Abs:
      return a.symbol() == b.symbol() && a.symbol_arity() == b.symbol_arity() &&
             a.arg() == b.arg();
    case Term::Kind::Proj: {
      if (a.args().size() != b.args().size()) return false;
      if (!(a.base() == b.base())) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!(a.args()[i] == b.args()[i])) return false;
      return true;
    }
  }
  return false;
}

// --- Formula -------------------------------------------------------------------

Formula FormulaNode::make(FormulaNode n) {
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::pred(Term rel, std::vector<Term> args) {
  FormulaNode n;
  n.kind = Kind::Pred;
  n.free = rel.free_vars();
  n.has_abs = rel.has_abstraction();
  n.terms.reserve(args.size() + 1);
  n.terms.push_back(std::move(rel));
  for (Term& a : args) {
    merge_free(n.free, a.free_vars());
    n.has_abs = n.has_abs || a.has_abstraction();
    n.terms.push_back(std::move(a));
  }
  n.size = n.terms.size();
  return FormulaNode::make(std::move(n));
}

Formula Formula::eq(Term lhs, Term rhs) {
  FormulaNode n;
  n.kind = Kind::Eq;
  n.free = lhs.free_vars();
  merge_free(n.free, rhs.free_vars());
  n.has_abs = lhs.has_abstraction() || rhs.has_abstraction();
  n.terms = {std::move(lhs), std::move(rhs)};
  n.size = 3;
  return FormulaNode::make(std::move(n));
}

Formula Formula::neg(Formula f) {
  FormulaNode n;
  n.kind = Kind::Not;
  n.free = f.free_vars();
  n.has_abs = f.has_abstraction();
  n.has_conc_quant = f.has_concept_quantifier();
  n.size = f.size() + 1;
  n.subs = {std::move(f)};
  return FormulaNode::make(std::move(n));
}

Formula Formula::binary(Kind k, Formula a, Formula b) {
  FormulaNode n;
  n.kind = k;
  n.free = a.free_vars();
  merge_free(n.free, b.free_vars());
  n.has_abs = a.has_abstraction() || b.has_abstraction();
  n.has_conc_quant = a.has_concept_quantifier() || b.has_concept_quantifier();
  n.size = a.size() + b.size() + 1;
  n.subs = {std::move(a), std::move(b)};
  return FormulaNode::make(std::move(n));
}

Formula Formula::conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
Formula Formula::implies(Formula a, Formula b) {
  return binary(Kind::Implies, std::move(a), std::move(b));
}
Formula Formula::iff(Formula a, Formula b) { return binary(Kind::Iff, std::move(a), std::move(b)); }

Formula Formula::quant(Kind k, const Var& v, Formula body) {
  FormulaNode n;
  n.kind = k;
  n.bound = v;
  n.free = body.free_vars();
  auto it = std::lower_bound(n.free.begin(), n.free.end(), v);
  if (it != n.free.end() && *it == v) n.free.erase(it);
  n.has_abs = body.has_abstraction();
  n.has_conc_quant = v.sort.is_concept() || body.has_concept_quantifier();
  n.size = body.size() + 1;
  n.subs = {std::move(body)};
  return FormulaNode::make(std::move(n));
}

Formula Formula::forall(const Var& v, Formula body) { return quant(Kind::Forall, v, std::move(body)); }
Formula Formula::exists(const Var& v, Formula body) { return quant(Kind::Exists, v, std::move(body)); }

Formula Formula::conj_all(std::span<const Formula> fs) {
  if (fs.empty()) throw Error(ErrorKind::BadArity, "empty conjunction");
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = conj(fs[i], acc);
  return acc;
}

Formula Formula::forall_all(std::span<const Var> vs, Formula body) {
  for (std::size_t i = vs.size(); i-- > 0;) body = forall(vs[i], std::move(body));
  return body;
}

Formula Formula::exists_all(std::span<const Var> vs, Formula body) {
  for (std::size_t i = vs.size(); i-- > 0;) body = exists(vs[i], std::move(body));
  return body;
}

Formula::Kind Formula::kind() const { return node_->kind; }
bool Formula::is_binary() const {
  switch (kind()) {
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff:
      return true;
    default:
      return false;
  }
}
const Term& Formula::rel() const { return node_->terms.front(); }
std::span<const Term> Formula::args() const {
  return std::span<const Term>(node_->terms).subspan(1);
}
const Term& Formula::lhs() const { return node_->terms[0]; }
const Term& Formula::rhs() const { return node_->terms[1]; }
const Formula& Formula::left() const { return node_->subs[0]; }
const Formula& Formula::right() const { return node_->subs[1]; }
const Formula& Formula::body() const { return node_->subs[0]; }
const Var& Formula::bound() const { return node_->bound; }
const std::vector<Var>& Formula::free_vars() const { return node_->free; }
bool Formula::has_free(const Var& v) const { return sorted_contains(node_->free, v); }
bool Formula::has_free_name(const std::string& name) const {
  auto it = std::lower_bound(node_->free.begin(), node_->free.end(), Var{name, Sort::invalid()});
  return it != node_->free.end() && it->name == name;
}
bool Formula::has_abstraction() const { return node_->has_abs; }
bool Formula::has_concept_quantifier() const { return node_->has_conc_quant; }
std::size_t Formula::size() const { return node_->size; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node() == b.node()) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  const FormulaNode& x = *a.node();
  const FormulaNode& y = *b.node();
  if (x.terms.size() != y.terms.size() || x.subs.size() != y.subs.size()) return false;
  if (a.is_quantifier() && !(x.bound == y.bound)) return false;
  for (std::size_t i = 0; i < x.terms.size(); ++i)
    if (!(x.terms[i] == y.terms[i])) return false;
  for (std::size_t i = 0; i < x.subs.size(); ++i)
    if (!(x.subs[i] == y.subs[i])) return false;
  return true;
}

// --- names -------------------------------------------------------------------

VarSet free_vars(const Formula& f) {
  return VarSet(f.free_vars().begin(), f.free_vars().end());
}

VarSet free_vars(const Term& t) {
  return VarSet(t.free_vars().begin(), t.free_vars().end());
}

void collect_names(const Term& t, std::set<std::string>& out) {
  for (const Var& v : t.free_vars()) out.insert(v.name);
}

void collect_names(const Formula& f, std::set<std::string>& out) {
  for (const Var& v : f.free_vars()) out.insert(v.name);
  if (f.is_quantifier()) {
    out.insert(f.bound().name);
    collect_names(f.body(), out);
  } else {
    for (const Formula& s : f.node()->subs) collect_names(s, out);
  }
}

std::set<std::string> all_names(const Formula& f) {
  std::set<std::string> out;
  collect_names(f, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string stem = base;
  auto us = stem.rfind('_');
  if (us != std::string::npos && us + 1 < stem.size() &&
      std::all_of(stem.begin() + us + 1, stem.end(), [](char c) { return std::isdigit(c); })) {
    stem = stem.substr(0, us);
  }
  for (int i = 1;; ++i) {
    std::string cand = stem + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// --- substitution ------------------------------------------------------------

Term substitute(const Term& t, const Substitution& s) {
  if (s.empty()) return t;
  bool touches = false;
  for (const auto& [v, _] : s) {
    if (t.has_free(v)) {
      touches = true;
      break;
    }
  }
  if (!touches) return t;
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = s.find(t.as_var());
      return it == s.end() ? t : it->second;
    }
    case Term::Kind::Proj: {
      std::vector<Term> args;
      for (const Term& a : t.args()) args.push_back(substitute(a, s));
      return Term::proj(substitute(t.base(), s), std::move(args));
    }
    case Term::Kind::Abs:
      return Term::abs(t.symbol(), t.symbol_arity(), substitute(t.arg(), s));
  }
  return t;
}

namespace {

Formula subst_rec(const Formula& f, const Substitution& s) {
  // Restrict to variables actually free here.
  Substitution live;
  for (const auto& [v, t] : s)
    if (f.has_free(v)) live.emplace(v, t);
  if (live.empty()) return f;

  switch (f.kind()) {
    case Formula::Kind::Pred: {
      std::vector<Term> args;
      for (const Term& a : f.args()) args.push_back(substitute(a, live));
      return Formula::pred(substitute(f.rel(), live), std::move(args));
    }
    case Formula::Kind::Eq:
      return Formula::eq(substitute(f.lhs(), live), substitute(f.rhs(), live));
    case Formula::Kind::Not:
      return Formula::neg(subst_rec(f.body(), live));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff:
      return Formula::binary(f.kind(), subst_rec(f.left(), live), subst_rec(f.right(), live));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      const Var& v = f.bound();
      live.erase(v);
      if (live.empty()) return f;
      bool capture = false;
      for (const auto& [_, t] : live) {
        for (const Var& w : t.free_vars()) {
          if (w.name == v.name) capture = true;
        }
      }
      if (!capture) return Formula::quant(f.kind(), v, subst_rec(f.body(), live));
      std::set<std::string> avoid;
      collect_names(f.body(), avoid);
      for (const auto& [w, t] : live) {
        avoid.insert(w.name);
        collect_names(t, avoid);
      }
      Var renamed{fresh_name(v.name, avoid), v.sort};
      live.emplace(v, Term::var(renamed));
      return Formula::quant(f.kind(), renamed, subst_rec(f.body(), live));
    }
  }
  return f;
}

}  // namespace

Formula substitute(const Formula& f, const Substitution& s) {
  for (const auto& [v, t] : s) {
    if (v.sort != t.sort())
      throw Error(ErrorKind::SortMismatch,
                  "cannot substitute a term of sort " + t.sort().str() + " for " + v.name +
                      " of sort " + v.sort.str());
  }
  return subst_rec(f, s);
}

Formula substitute(const Formula& f, const Var& v, const Term& t) {
  return substitute(f, Substitution{{v, t}});
}

// --- alpha equivalence ---------------------------------------------------------

namespace {

struct Binders {
  std::vector<const Var*> a;
  std::vector<const Var*> b;
};

int lookup(const std::vector<const Var*>& stack, const Var& v) {
  for (std::size_t i = stack.size(); i-- > 0;)
    if (*stack[i] == v) return static_cast<int>(i);
  return -1;
}

bool alpha_term(const Term& x, const Term& y, const Binders& env) {
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Term::Kind::Var: {
      int i = lookup(env.a, x.as_var());
      int j = lookup(env.b, y.as_var());
      if (i != j) return false;
      if (i >= 0) return true;
      return x.as_var() == y.as_var();
    }
    case Term::Kind::Abs:
      return x.symbol() == y.symbol() && x.symbol_arity() == y.symbol_arity() &&
             alpha_term(x.arg(), y.arg(), env);
    case Term::Kind::Proj: {
      if (x.args().size() != y.args().size()) return false;
      if (!alpha_term(x.base(), y.base(), env)) return false;
      for (std::size_t i = 0; i < x.args().size(); ++i)
        if (!alpha_term(x.args()[i], y.args()[i], env)) return false;
      return true;
    }
  }
  return false;
}

bool alpha_rec(const Formula& f, const Formula& g, Binders& env) {
  if (f.kind() != g.kind() || f.size() != g.size()) return false;
  if (env.a.empty() && f.node() == g.node()) return true;
  switch (f.kind()) {
    case Formula::Kind::Pred:
    case Formula::Kind::Eq: {
      const auto& xs = f.node()->terms;
      const auto& ys = g.node()->terms;
      if (xs.size() != ys.size()) return false;
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (!alpha_term(xs[i], ys[i], env)) return false;
      return true;
    }
    case Formula::Kind::Not:
      return alpha_rec(f.body(), g.body(), env);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff:
      return alpha_rec(f.left(), g.left(), env) && alpha_rec(f.right(), g.right(), env);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      if (f.bound().sort != g.bound().sort) return false;
      env.a.push_back(&f.bound());
      env.b.push_back(&g.bound());
      bool ok = alpha_rec(f.body(), g.body(), env);
      env.a.pop_back();
      env.b.pop_back();
      return ok;
    }
  }
  return false;
}

void key_term(const Term& t, const std::vector<const Var*>& env, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      int i = lookup(env, t.as_var());
      if (i >= 0) {
        out += '%';
        out += std::to_string(i);
      } else {
        out += t.as_var().name;
        out += ':';
        out += std::to_string(t.as_var().sort.arity());
      }
      return;
    }
    case Term::Kind::Proj:
      out += "(proj ";
      key_term(t.base(), env, out);
      for (const Term& a : t.args()) {
        out += ' ';
        key_term(a, env, out);
      }
      out += ')';
      return;
    case Term::Kind::Abs:
      out += "(abs ";
      out += t.symbol();
      out += ' ';
      key_term(t.arg(), env, out);
      out += ')';
      return;
  }
}

const char* kind_word(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Pred: return "pred";
    case Formula::Kind::Eq: return "=";
    case Formula::Kind::Not: return "not";
    case Formula::Kind::And: return "and";
    case Formula::Kind::Or: return "or";
    case Formula::Kind::Implies: return "implies";
    case Formula::Kind::Iff: return "iff";
    case Formula::Kind::Forall: return "forall";
    case Formula::Kind::Exists: return "exists";
  }
  return "?";
}

void key_rec(const Formula& f, std::vector<const Var*>& env, std::string& out) {
  out += '(';
  out += kind_word(f.kind());
  switch (f.kind()) {
    case Formula::Kind::Pred:
    case Formula::Kind::Eq:
      for (const Term& t : f.node()->terms) {
        out += ' ';
        key_term(t, env, out);
      }
      break;
    case Formula::Kind::Not:
      out += ' ';
      key_rec(f.body(), env, out);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff:
      out += ' ';
      key_rec(f.left(), env, out);
      out += ' ';
      key_rec(f.right(), env, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      out += ' ';
      out += std::to_string(f.bound().sort.arity());
      out += ' ';
      env.push_back(&f.bound());
      key_rec(f.body(), env, out);
      env.pop_back();
      break;
  }
  out += ')';
}

}  // namespace

bool alpha_eq(const Formula& f, const Formula& g) {
  Binders env;
  return alpha_rec(f, g, env);
}

std::string canonical_key(const Formula& f) {
  std::string out;
  out.reserve(f.size() * 6);
  std::vector<const Var*> env;
  key_rec(f, env, out);
  return out;
}

// --- projection normalization --------------------------------------------------

Term normalize_projections(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t;
    case Term::Kind::Abs:
      return Term::abs(t.symbol(), t.symbol_arity(), normalize_projections(t.arg()));
    case Term::Kind::Proj: {
      Term base = normalize_projections(t.base());
      std::vector<Term> args;
      if (base.kind() == Term::Kind::Proj) {
        for (const Term& a : base.args()) args.push_back(a);
        base = base.base();
      }
      for (const Term& a : t.args()) args.push_back(normalize_projections(a));
      return Term::proj(base, std::move(args));
    }
  }
  return t;
}

Formula normalize_projections(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Pred: {
      std::vector<Term> args;
      for (const Term& a : f.args()) args.push_back(normalize_projections(a));
      Term rel = normalize_projections(f.rel());
      // (R[a])(b) is R(a, b) only through the projection axiom; keep it a projection.
      return Formula::pred(rel, std::move(args));
    }
    case Formula::Kind::Eq:
      return Formula::eq(normalize_projections(f.lhs()), normalize_projections(f.rhs()));
    case Formula::Kind::Not:
      return Formula::neg(normalize_projections(f.body()));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return Formula::quant(f.kind(), f.bound(), normalize_projections(f.body()));
    default:
      return Formula::binary(f.kind(), normalize_projections(f.left()),
                             normalize_projections(f.right()));
  }
}

// --- signatures ----------------------------------------------------------------

Formula EquivDef::apply(const Term& r, const Term& s) const {
  return substitute(body, Substitution{{left, r}, {right, s}});
}

Signature::Signature(std::vector<AbstractionSymbol> symbols) {
  for (auto& s : symbols) add(std::move(s));
}

void Signature::add(AbstractionSymbol s) {
  if (s.arity < 1) throw Error(ErrorKind::BadArity, "abstraction arity must be >= 1");
  if (const AbstractionSymbol* old = find(s.id)) {
    if (old->arity != s.arity)
      throw Error(ErrorKind::BadArity, "abstraction symbol " + s.id + " redeclared");
    return;
  }
  symbols_.push_back(std::move(s));
}

const AbstractionSymbol* Signature::find(const std::string& id) const {
  for (const auto& s : symbols_)
    if (s.id == id) return &s;
  return nullptr;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string equiv_key(const EquivDef& e) {
  Var r{"%R", e.left.sort};
  Var s{"%S", e.right.sort};
  Formula f = substitute(e.body, Substitution{{e.left, Term::var(r)}, {e.right, Term::var(s)}});
  return canonical_key(f);
}

}  // namespace

std::string canonical_symbol_id(const EquivDef& e) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a(equiv_key(e));
  std::string out = "d_";
  for (int i = 11; i >= 0; --i) out += hex[(h >> (i * 4)) & 0xF];
  return out;
}

bool equiv_alpha_eq(const EquivDef& a, const EquivDef& b) {
  return a.left.sort == b.left.sort && a.right.sort == b.right.sort &&
         equiv_key(a) == equiv_key(b);
}

// --- sort checking ---------------------------------------------------------------

namespace {

struct SortChecker {
  const Signature& sig;
  bool strict;
  SortReport report;

  void fail(const std::string& loc, std::string msg) {
    report.ok = false;
    report.errors.push_back({loc.empty() ? "/" : loc, std::move(msg)});
  }

  void term(const Term& t, const std::string& loc) {
    switch (t.kind()) {
      case Term::Kind::Var:
        return;
      case Term::Kind::Proj: {
        term(t.base(), loc + "/base");
        const int m = static_cast<int>(t.args().size());
        for (int i = 0; i < m; ++i) {
          term(t.args()[i], loc + "/arg" + std::to_string(i));
          if (!t.args()[i].sort().is_object())
            fail(loc, "projection argument " + std::to_string(i) + " is not an object");
        }
        if (m < 1) {
          fail(loc, "projection needs at least one argument");
        } else if (!t.base().sort().is_concept() || t.base().sort().arity() <= m) {
          fail(loc, "projection arity mismatch: base of sort " + t.base().sort().str() +
                        " applied to " + std::to_string(m) + " objects");
        }
        return;
      }
      case Term::Kind::Abs: {
        term(t.arg(), loc + "/arg");
        const AbstractionSymbol* s = sig.find(t.symbol());
        if (!s && strict) {
          fail(loc, "unknown abstraction symbol " + t.symbol());
        } else if (s && s->arity != t.symbol_arity()) {
          fail(loc, "abstraction symbol " + t.symbol() + " used at arity " +
                        std::to_string(t.symbol_arity()) + " but declared " +
                        std::to_string(s->arity));
        }
        if (t.arg().sort() != Sort::conc(t.symbol_arity()))
          fail(loc, "abstraction argument has sort " + t.arg().sort().str() + ", expected " +
                        Sort::conc(t.symbol_arity()).str());
        return;
      }
    }
  }

  void formula(const Formula& f, const std::string& loc) {
    switch (f.kind()) {
      case Formula::Kind::Pred: {
        term(f.rel(), loc + "/rel");
        const int n = static_cast<int>(f.args().size());
        for (int i = 0; i < n; ++i) {
          term(f.args()[i], loc + "/arg" + std::to_string(i));
          if (!f.args()[i].sort().is_object())
            fail(loc, "predication argument " + std::to_string(i) + " is not an object");
        }
        if (!f.rel().sort().is_concept() || f.rel().sort().arity() != n)
          fail(loc, "arity mismatch: relation of sort " + f.rel().sort().str() +
                        " applied to " + std::to_string(n) + " arguments");
        return;
      }
      case Formula::Kind::Eq:
        term(f.lhs(), loc + "/lhs");
        term(f.rhs(), loc + "/rhs");
        if (f.lhs().sort() != f.rhs().sort())
          fail(loc, "cross-sortal identity between " + f.lhs().sort().str() + " and " +
                        f.rhs().sort().str());
        return;
      case Formula::Kind::Not:
        formula(f.body(), loc + "/not");
        return;
      case Formula::Kind::Forall:
      case Formula::Kind::Exists:
        formula(f.body(), loc + "/" + f.bound().name);
        return;
      default:
        formula(f.left(), loc + "/0");
        formula(f.right(), loc + "/1");
        return;
    }
  }
};

}  // namespace

SortReport well_sorted(const Signature& sig, const Formula& f, bool strict_symbols) {
  SortChecker c{sig, strict_symbols, {}};
  c.formula(f, "");
  return c.report;
}

SortReport well_sorted_term(const Signature& sig, const Term& t, bool strict_symbols) {
  SortChecker c{sig, strict_symbols, {}};
  c.term(t, "");
  return c.report;
}

namespace {

void symbols_term(const Term& t, std::map<std::string, int>& out) {
  if (!t.has_abstraction()) return;
  switch (t.kind()) {
    case Term::Kind::Var:
      return;
    case Term::Kind::Abs:
      out.emplace(t.symbol(), t.symbol_arity());
      symbols_term(t.arg(), out);
      return;
    case Term::Kind::Proj:
      symbols_term(t.base(), out);
      for (const Term& a : t.args()) symbols_term(a, out);
      return;
  }
}

void symbols_rec(const Formula& f, std::map<std::string, int>& out) {
  if (!f.has_abstraction()) return;
  for (const Term& t : f.node()->terms) symbols_term(t, out);
  for (const Formula& s : f.node()->subs) symbols_rec(s, out);
}

}  // namespace

std::map<std::string, int> abstraction_symbols(const Formula& f) {
  std::map<std::string, int> out;
  symbols_rec(f, out);
  return out;
}

// --- builders ----------------------------------------------------------------------

Formula pred(const Var& rel, std::vector<Term> args) {
  return Formula::pred(Term::var(rel), std::move(args));
}

Formula pred(const Var& rel, std::span<const Var> args) {
  return Formula::pred(Term::var(rel), as_terms(args));
}

Formula obj_eq(const Var& a, const Var& b) { return Formula::eq(Term::var(a), Term::var(b)); }

Formula tuple_eq(std::span<const Term> a, std::span<const Term> b) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorKind::BadArity, "tuple identity needs equal non-empty tuples");
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < a.size(); ++i) parts.push_back(Formula::eq(a[i], b[i]));
  return Formula::conj_all(parts);
}

std::vector<Term> as_terms(std::span<const Var> vs) {
  std::vector<Term> out;
  out.reserve(vs.size());
  for (const Var& v : vs) out.push_back(Term::var(v));
  return out;
}

}  // namespace pft
