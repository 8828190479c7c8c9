#include "pft/kernel.hpp"

#include <algorithm>

#include "pft/error.hpp"
#include "pft/parse.hpp"
#include "pft/sexpr.hpp"

namespace pft {

namespace {

struct RuleName {
  Rule rule;
  const char* name;
};

constexpr RuleName kRuleNames[] = {
    {Rule::P1, "p1"},           {Rule::P2, "p2"},         {Rule::P3, "p3"},
    {Rule::AndI, "and-i"},      {Rule::AndL, "and-l"},    {Rule::AndR, "and-r"},
    {Rule::OrL, "or-l"},        {Rule::OrR, "or-r"},      {Rule::OrE, "or-e"},
    {Rule::IffI, "iff-i"},      {Rule::IffL, "iff-l"},    {Rule::IffR, "iff-r"},
    {Rule::QInst, "q-inst"},    {Rule::QDist, "q-dist"},  {Rule::ExI, "ex-i"},
    {Rule::ExE, "ex-e"},        {Rule::Refl, "refl"},     {Rule::Leibniz, "leibniz"},
    {Rule::Cong, "cong"},       {Rule::MP, "mp"},         {Rule::Gen, "gen"},
    {Rule::Axiom, "axiom"},
};

using K = Formula::Kind;

bool is(const Formula& f, K k) { return f.kind() == k; }

// Binder environments for alpha-aware walks: bound variable -> depth.
using Binders = std::vector<Var>;

int depth_of(const Binders& env, const Var& v) {
  for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
    if (env[i] == v) return i;
  return -1;
}

bool captured(const Binders& env, const Term& t) {
  for (const Var& v : t.free_vars())
    if (depth_of(env, v) >= 0) return true;
  return false;
}

bool term_alpha(const Term& a, const Binders& ea, const Term& b, const Binders& eb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: {
      int da = depth_of(ea, a.as_var()), db = depth_of(eb, b.as_var());
      if (da != db) return false;
      return da >= 0 ? a.sort() == b.sort() : a.as_var() == b.as_var();
    }
    case Term::Kind::Proj: {
      if (a.args().size() != b.args().size()) return false;
      if (!term_alpha(a.base(), ea, b.base(), eb)) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!term_alpha(a.args()[i], ea, b.args()[i], eb)) return false;
      return true;
    }
    case Term::Kind::Abs:
      return a.symbol() == b.symbol() && a.symbol_arity() == b.symbol_arity() &&
             term_alpha(a.arg(), ea, b.arg(), eb);
  }
  return false;
}

// u' arises from u by replacing some free occurrences of s with t.
bool term_replaces(const Term& u, Binders& eu, const Term& w, Binders& ew, const Term& s, const Term& t) {
  if (term_alpha(u, eu, w, ew)) return true;
  if (u == s && w == t && !captured(eu, s) && !captured(ew, t)) return true;
  if (u.kind() != w.kind()) return false;
  switch (u.kind()) {
    case Term::Kind::Var:
      return false;
    case Term::Kind::Proj: {
      if (u.args().size() != w.args().size()) return false;
      if (!term_replaces(u.base(), eu, w.base(), ew, s, t)) return false;
      for (std::size_t i = 0; i < u.args().size(); ++i)
        if (!term_replaces(u.args()[i], eu, w.args()[i], ew, s, t)) return false;
      return true;
    }
    case Term::Kind::Abs:
      return u.symbol() == w.symbol() && term_replaces(u.arg(), eu, w.arg(), ew, s, t);
  }
  return false;
}

bool formula_replaces(const Formula& f, Binders& ef, const Formula& g, Binders& eg, const Term& s,
                      const Term& t) {
  if (f.kind() != g.kind()) return false;
  switch (f.kind()) {
    case K::Pred: {
      if (f.args().size() != g.args().size()) return false;
      if (!term_replaces(f.rel(), ef, g.rel(), eg, s, t)) return false;
      for (std::size_t i = 0; i < f.args().size(); ++i)
        if (!term_replaces(f.args()[i], ef, g.args()[i], eg, s, t)) return false;
      return true;
    }
    case K::Eq:
      return term_replaces(f.lhs(), ef, g.lhs(), eg, s, t) && term_replaces(f.rhs(), ef, g.rhs(), eg, s, t);
    case K::Not:
      return formula_replaces(f.body(), ef, g.body(), eg, s, t);
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      return formula_replaces(f.left(), ef, g.left(), eg, s, t) &&
             formula_replaces(f.right(), ef, g.right(), eg, s, t);
    case K::Forall:
    case K::Exists: {
      if (f.bound().sort != g.bound().sort) return false;
      ef.push_back(f.bound());
      eg.push_back(g.bound());
      bool ok = formula_replaces(f.body(), ef, g.body(), eg, s, t);
      ef.pop_back();
      eg.pop_back();
      return ok;
    }
  }
  return false;
}

// Candidate t with a[v:=t] alpha-equal to c: the term facing the first free
// occurrence of v.
std::optional<Term> witness_term(const Term& a, Binders& ea, const Term& c, Binders& ec, const Var& v);

std::optional<Term> witness(const Formula& a, Binders& ea, const Formula& c, Binders& ec, const Var& v) {
  if (a.kind() != c.kind()) return std::nullopt;
  switch (a.kind()) {
    case K::Pred: {
      if (a.args().size() != c.args().size()) return std::nullopt;
      if (auto t = witness_term(a.rel(), ea, c.rel(), ec, v)) return t;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (auto t = witness_term(a.args()[i], ea, c.args()[i], ec, v)) return t;
      return std::nullopt;
    }
    case K::Eq:
      if (auto t = witness_term(a.lhs(), ea, c.lhs(), ec, v)) return t;
      return witness_term(a.rhs(), ea, c.rhs(), ec, v);
    case K::Not:
      return witness(a.body(), ea, c.body(), ec, v);
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      if (auto t = witness(a.left(), ea, c.left(), ec, v)) return t;
      return witness(a.right(), ea, c.right(), ec, v);
    case K::Forall:
    case K::Exists: {
      if (a.bound() == v) return std::nullopt;  // v shadowed
      ea.push_back(a.bound());
      ec.push_back(c.bound());
      auto t = witness(a.body(), ea, c.body(), ec, v);
      ea.pop_back();
      ec.pop_back();
      return t;
    }
  }
  return std::nullopt;
}

std::optional<Term> witness_term(const Term& a, Binders& ea, const Term& c, Binders& ec, const Var& v) {
  if (a.is_var() && a.as_var() == v && depth_of(ea, v) < 0) {
    if (captured(ec, c)) return std::nullopt;
    return c;
  }
  if (a.kind() != c.kind()) return std::nullopt;
  switch (a.kind()) {
    case Term::Kind::Var:
      return std::nullopt;
    case Term::Kind::Proj:
      if (a.args().size() != c.args().size()) return std::nullopt;
      if (auto t = witness_term(a.base(), ea, c.base(), ec, v)) return t;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (auto t = witness_term(a.args()[i], ea, c.args()[i], ec, v)) return t;
      return std::nullopt;
    case Term::Kind::Abs:
      return witness_term(a.arg(), ea, c.arg(), ec, v);
  }
  return std::nullopt;
}

// a[v:=t] alpha-equals c for some t of v's sort.
bool is_instance(const Formula& a, const Var& v, const Formula& c) {
  if (!a.has_free(v)) return alpha_eq(a, c);
  Binders ea, ec;
  auto t = witness(a, ea, c, ec, v);
  if (!t || t->sort() != v.sort) return false;
  return alpha_eq(substitute(a, v, *t), c);
}

bool imp(const Formula& f) { return is(f, K::Implies); }

const char* kShape = "formula does not have the axiom's shape";

std::string expect(bool ok, const char* why = kShape) { return ok ? std::string() : std::string(why); }

}  // namespace

const char* to_string(Rule r) {
  for (const auto& rn : kRuleNames)
    if (rn.rule == r) return rn.name;
  return "?";
}

std::optional<Rule> rule_from_string(std::string_view s) {
  for (const auto& rn : kRuleNames)
    if (s == rn.name) return rn.rule;
  return std::nullopt;
}

Formula falsum() {
  Var x = Var::obj("x");
  Formula top = Formula::forall(x, Formula::eq(Term::var(x), Term::var(x)));
  return Formula::conj(top, Formula::neg(top));
}

std::string match_logical(Rule r, const Formula& f) {
  switch (r) {
    case Rule::P1:
      return expect(imp(f) && imp(f.right()) && alpha_eq(f.left(), f.right().right()));
    case Rule::P2: {
      if (!(imp(f) && imp(f.left()) && imp(f.left().right()) && imp(f.right()) && imp(f.right().left()) &&
            imp(f.right().right())))
        return kShape;
      const Formula &a = f.left().left(), &b = f.left().right().left(), &c = f.left().right().right();
      const Formula &ab = f.right().left(), &ac = f.right().right();
      return expect(alpha_eq(ab.left(), a) && alpha_eq(ab.right(), b) && alpha_eq(ac.left(), a) &&
                    alpha_eq(ac.right(), c));
    }
    case Rule::P3: {
      if (!(imp(f) && imp(f.left()) && imp(f.right()) && imp(f.right().left())))
        return kShape;
      const Formula& nb_na = f.left();
      const Formula& nb_a = f.right().left();
      const Formula& b = f.right().right();
      return expect(is(nb_na.left(), K::Not) && is(nb_na.right(), K::Not) &&
                    alpha_eq(nb_na.left().body(), b) && alpha_eq(nb_a.left(), nb_na.left()) &&
                    alpha_eq(nb_a.right(), nb_na.right().body()));
    }
    case Rule::AndI:
      return expect(imp(f) && imp(f.right()) && is(f.right().right(), K::And) &&
                    alpha_eq(f.right().right().left(), f.left()) &&
                    alpha_eq(f.right().right().right(), f.right().left()));
    case Rule::AndL:
      return expect(imp(f) && is(f.left(), K::And) && alpha_eq(f.left().left(), f.right()));
    case Rule::AndR:
      return expect(imp(f) && is(f.left(), K::And) && alpha_eq(f.left().right(), f.right()));
    case Rule::OrL:
      return expect(imp(f) && is(f.right(), K::Or) && alpha_eq(f.right().left(), f.left()));
    case Rule::OrR:
      return expect(imp(f) && is(f.right(), K::Or) && alpha_eq(f.right().right(), f.left()));
    case Rule::OrE: {
      if (!(imp(f) && imp(f.left()) && imp(f.right()) && imp(f.right().left()) && imp(f.right().right()) &&
            is(f.right().right().left(), K::Or)))
        return kShape;
      const Formula &ac = f.left(), &bc = f.right().left(), &fin = f.right().right();
      return expect(alpha_eq(fin.left().left(), ac.left()) && alpha_eq(fin.left().right(), bc.left()) &&
                    alpha_eq(ac.right(), fin.right()) && alpha_eq(bc.right(), fin.right()));
    }
    case Rule::IffI: {
      if (!(imp(f) && imp(f.left()) && imp(f.right()) && imp(f.right().left()) &&
            is(f.right().right(), K::Iff)))
        return kShape;
      const Formula &ab = f.left(), &ba = f.right().left(), &iff = f.right().right();
      return expect(alpha_eq(ab.left(), iff.left()) && alpha_eq(ab.right(), iff.right()) &&
                    alpha_eq(ba.left(), iff.right()) && alpha_eq(ba.right(), iff.left()));
    }
    case Rule::IffL:
    case Rule::IffR: {
      if (!(imp(f) && is(f.left(), K::Iff) && imp(f.right()))) return kShape;
      const Formula& iff = f.left();
      const Formula& a = r == Rule::IffL ? iff.left() : iff.right();
      const Formula& b = r == Rule::IffL ? iff.right() : iff.left();
      return expect(alpha_eq(f.right().left(), a) && alpha_eq(f.right().right(), b));
    }
    case Rule::QInst:
      if (!(imp(f) && is(f.left(), K::Forall))) return kShape;
      return expect(is_instance(f.left().body(), f.left().bound(), f.right()),
                    "consequent is not an instance of the universal");
    case Rule::ExI:
      if (!(imp(f) && is(f.right(), K::Exists))) return kShape;
      return expect(is_instance(f.right().body(), f.right().bound(), f.left()),
                    "antecedent is not an instance of the existential");
    case Rule::QDist: {
      if (!(imp(f) && is(f.left(), K::Forall) && imp(f.left().body()) && imp(f.right()) &&
            is(f.right().right(), K::Forall)))
        return kShape;
      const Var& v = f.left().bound();
      const Formula &a = f.left().body().left(), &b = f.left().body().right();
      if (a.has_free(v)) return "quantified variable " + v.name + " is free in the antecedent";
      return expect(alpha_eq(f.right().left(), a) &&
                    alpha_eq(f.right().right(), Formula::forall(v, b)));
    }
    case Rule::ExE: {
      if (!(imp(f) && is(f.left(), K::Forall) && imp(f.left().body()) && imp(f.right()) &&
            is(f.right().left(), K::Exists)))
        return kShape;
      const Var& v = f.left().bound();
      const Formula &a = f.left().body().left(), &b = f.left().body().right();
      if (b.has_free(v)) return "quantified variable " + v.name + " is free in the conclusion";
      return expect(alpha_eq(f.right().left(), Formula::exists(v, a)) && alpha_eq(f.right().right(), b));
    }
    case Rule::Refl:
      return expect(is(f, K::Eq) && f.lhs() == f.rhs());
    case Rule::Leibniz: {
      if (!(imp(f) && is(f.left(), K::Eq) && imp(f.right()))) return kShape;
      Binders e1, e2;
      return expect(formula_replaces(f.right().left(), e1, f.right().right(), e2, f.left().lhs(), f.left().rhs()),
                    "consequent is not a replacement instance");
    }
    case Rule::Cong: {
      if (!(imp(f) && is(f.left(), K::Eq) && is(f.right(), K::Eq))) return kShape;
      Binders e1, e2;
      return expect(term_replaces(f.right().lhs(), e1, f.right().rhs(), e2, f.left().lhs(), f.left().rhs()),
                    "consequent is not a congruence instance");
    }
    case Rule::MP:
    case Rule::Gen:
    case Rule::Axiom:
      return "not a logical axiom";
  }
  return "not a logical axiom";
}

// --- theories -------------------------------------------------------------------

std::string TheoryId::str() const {
  switch (kind) {
    case TheoryKind::Sigma11OS: return "sigma11os";
    case TheoryKind::PFT: return "pft";
    case TheoryKind::PFT2: return "pft2";
    case TheoryKind::PFTStar: return "pftstar";
  }
  return "?";
}

TheoryId TheoryId::parse(std::string_view s) {
  for (TheoryKind k : {TheoryKind::Sigma11OS, TheoryKind::PFT, TheoryKind::PFT2, TheoryKind::PFTStar}) {
    TheoryId t{k};
    if (t.str() == s) return t;
  }
  throw Error(ErrorKind::UnknownName, "unknown theory " + std::string(s));
}

Registry::Registry(int level) : level_(level) {
  if (level != 1 && level != 2) throw Error(ErrorKind::LevelMismatch, "registry level must be 1 or 2");
}

const RegistryEntry* Registry::find_symbol(const std::string& id) const {
  for (const auto& e : entries_)
    if (e.symbol.id == id) return &e;
  return nullptr;
}

const RegistryEntry* Registry::find_equiv(const EquivDef& e) const {
  for (const auto& r : entries_)
    if (equiv_alpha_eq(r.equiv, e)) return &r;
  return nullptr;
}

Signature Registry::signature(int max_level) const {
  Signature s;
  for (const auto& e : entries_)
    if (e.level <= max_level) s.add(e.symbol);
  return s;
}

namespace {

int theory_level(TheoryKind k) { return k == TheoryKind::PFT2 ? 2 : k == TheoryKind::PFT ? 1 : 0; }

// ∃R ∀a1..ak (R a1..ak ↔ φ): returns R, the tuple and φ.
struct CompShape {
  Var rel;
  std::vector<Var> tuple;
  Formula phi;
};

std::optional<CompShape> comp_shape(const Formula& f) {
  if (!is(f, K::Exists) || !f.bound().sort.is_concept()) return std::nullopt;
  CompShape s{f.bound(), {}, f.body()};
  const int k = s.rel.sort.arity();
  Formula cur = f.body();
  for (int i = 0; i < k; ++i) {
    if (!is(cur, K::Forall)) return std::nullopt;
    s.tuple.push_back(cur.bound());
    cur = cur.body();
  }
  if (!is(cur, K::Iff)) return std::nullopt;
  s.phi = cur.right();
  return s;
}

std::string match_comp(const Formula& f) {
  auto s = comp_shape(f);
  if (!s) return kShape;
  try {
    Formula inst = fo_comp_instance(s->phi, s->tuple, s->rel);
    return expect(alpha_eq(inst, f));
  } catch (const Error& e) {
    return e.what();
  }
}

std::string match_delta11(const Formula& f) {
  if (!imp(f)) return kShape;
  auto s = comp_shape(f.right());
  if (!s) return kShape;
  Formula cur = f.left();
  std::vector<Var> xs;
  for (std::size_t i = 0; i < s->tuple.size(); ++i) {
    if (!is(cur, K::Forall)) return kShape;
    xs.push_back(cur.bound());
    cur = cur.body();
  }
  if (!is(cur, K::Iff)) return kShape;
  try {
    Formula inst = delta11_comp_instance(cur.left(), cur.right(), xs, s->rel);
    return expect(alpha_eq(inst, f));
  } catch (const Error& e) {
    return e.what();
  }
}

std::string match_choice(const Formula& f) {
  if (!imp(f) || !is(f.right(), K::Exists)) return kShape;
  std::vector<Var> xs;
  Formula cur = f.left();
  while (is(cur, K::Forall) && cur.bound().sort.is_object()) {
    xs.push_back(cur.bound());
    cur = cur.body();
  }
  if (!is(cur, K::Exists) || !cur.bound().sort.is_concept()) return kShape;
  try {
    Formula inst = sigma11_choice_instance(cur.body(), cur.bound(), xs, f.right().bound());
    return expect(alpha_eq(inst, f));
  } catch (const Error& e) {
    return e.what();
  }
}

// Extracts E, R, S and the symbol from ∀R ∀S (∂R = ∂S ↔ E(R, S)).
struct AbsShape {
  EquivDef e;
  std::string id;
  int arity;
};

std::optional<AbsShape> abs_shape(const Formula& f) {
  if (!is(f, K::Forall) || !is(f.body(), K::Forall)) return std::nullopt;
  Var r = f.bound(), s = f.body().bound();
  const Formula& body = f.body().body();
  if (!is(body, K::Iff) || !is(body.left(), K::Eq)) return std::nullopt;
  const Term &l = body.left().lhs(), &rt = body.left().rhs();
  if (l.kind() != Term::Kind::Abs || rt.kind() != Term::Kind::Abs) return std::nullopt;
  if (l.symbol() != rt.symbol()) return std::nullopt;
  if (!(l.arg() == Term::var(r)) || !(rt.arg() == Term::var(s))) return std::nullopt;
  if (r.name == s.name) return std::nullopt;
  return AbsShape{EquivDef{body.right(), r, s}, l.symbol(), l.symbol_arity()};
}

std::string match_abstraction(const Registry& reg, int level, const std::string& id, const Formula& f) {
  const RegistryEntry* e = reg.find_symbol(id);
  if (!e || e->level > level) return "abstraction symbol " + id + " is not certified at this level";
  return expect(alpha_eq(abstraction_principle(e->equiv, e->symbol), f),
                "formula is not the abstraction principle of the registered equivalence");
}

std::string match_equiv_abs(const Signature& sig, const std::string& id, const Formula& f) {
  if (!imp(f)) return kShape;
  auto a = abs_shape(f.right());
  if (!a) return kShape;
  if (a->id != id) return "symbol in the formula differs from the justification";
  const EquivDef& e = a->e;
  for (const Var& v : e.body.free_vars())
    if (!(v == e.left) && !(v == e.right)) return "equivalence formula has extra free variable " + v.name;
  if (!e.left.sort.is_concept() || e.left.sort != e.right.sort) return "E must relate two concepts of one arity";
  if (a->arity != e.arity()) return "symbol arity does not match E";
  if (abstraction_symbols(e.body).count(id)) return "abstraction symbol occurs in its own defining formula";
  SortReport sr = well_sorted(sig, e.body);
  if (!sr.ok) return "E is not over the symbols introduced so far: " + sr.errors.front().message;
  if (canonical_symbol_id(e) != id) return "symbol id is not the canonical id of E";
  AbstractionSymbol sym{id, e.arity(), e};
  Formula want = Formula::implies(equiv_sentence(e), abstraction_principle(e, sym));
  return expect(alpha_eq(want, f));
}

}  // namespace

std::string match_axiom(const TheoryId& theory, const Registry& reg, const Signature& sig, const SchemaId& id,
                        const Formula& f) {
  using SK = SchemaId::Kind;
  const bool star = theory.kind == TheoryKind::PFTStar;
  switch (id.kind) {
    case SK::Extensionality:
      return expect(alpha_eq(extensionality_axiom(id.m), f));
    case SK::Projection:
      return expect(alpha_eq(projection_axiom(id.m, id.n), f));
    case SK::FOComp:
      return match_comp(f);
    case SK::Delta11Comp:
      return match_delta11(f);
    case SK::Sigma11Choice:
      return match_choice(f);
    case SK::Abstraction:
      if (theory.kind != TheoryKind::PFT && theory.kind != TheoryKind::PFT2)
        return "abstraction principles are axioms of PFT and PFT2 only";
      return match_abstraction(reg, theory_level(theory.kind), id.symbol, f);
    case SK::EquivAbstraction:
      if (!star) return "Equiv(E) -> A[E] is an axiom of PFT* only";
      return match_equiv_abs(sig, id.symbol, f);
    case SK::FullComp:
      return "full comprehension is not an axiom of any theory here";
    case SK::EquivSentence:
      return "Equiv(E) is not an axiom";
  }
  return kShape;
}

std::optional<Justification> axiom_of(const TheoryId& theory, const Registry& reg, const Formula& f,
                                      const Signature* star_sig) {
  using SK = SchemaId::Kind;
  Signature sig = theory.kind == TheoryKind::PFTStar ? (star_sig ? *star_sig : Signature())
                                                     : reg.signature(theory_level(theory.kind));
  if (theory.kind == TheoryKind::PFTStar) {
    // The symbols of E must be known; ∂_E itself may be new.
    if (imp(f)) {
      if (auto a = abs_shape(f.right())) {
        SchemaId id{SK::EquivAbstraction, 0, 0, a->id};
        if (match_axiom(theory, reg, sig, id, f).empty()) return Justification::axiom(id);
      }
    }
  }
  if (!well_sorted(sig, f).ok) return std::nullopt;
  auto try_id = [&](SchemaId id) -> std::optional<Justification> {
    if (match_axiom(theory, reg, sig, id, f).empty()) return Justification::axiom(id);
    return std::nullopt;
  };
  // Extensionality and projection: parameters read off the formula.
  if (is(f, K::Forall) && f.bound().sort.is_concept()) {
    int k = f.bound().sort.arity();
    if (auto j = try_id({SK::Extensionality, k, 0, {}})) return j;
    for (int m = 1; m < k; ++m)
      if (auto j = try_id({SK::Projection, m, k - m, {}})) return j;
  }
  for (SK k : {SK::FOComp, SK::Sigma11Choice, SK::Delta11Comp})
    if (auto j = try_id({k, 0, 0, {}})) return j;
  if (theory.kind == TheoryKind::PFT || theory.kind == TheoryKind::PFT2) {
    if (auto a = abs_shape(f))
      if (auto j = try_id({SK::Abstraction, 0, 0, a->id})) return j;
  }
  return std::nullopt;
}

CheckReport check(const Derivation& d, const TheoryId& theory, const Registry& reg, const CheckOptions& opts) {
  CheckReport rep;
  rep.lines = d.lines.size();
  const bool star = theory.kind == TheoryKind::PFTStar;
  Signature sig = star ? Signature() : reg.signature(theory_level(theory.kind));
  auto fail = [&](int n, std::string why) {
    rep.ok = false;
    rep.first_failure = {n, std::move(why)};
    return rep;
  };
  if (theory_level(theory.kind) > reg.level())
    return fail(0, "registry level " + std::to_string(reg.level()) + " is below the theory's level");
  if (d.lines.empty()) return fail(0, "empty derivation");
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    const Line& ln = d.lines[i];
    const int n = static_cast<int>(i) + 1;
    if (ln.n != n) return fail(ln.n, "line numbers must run 1, 2, 3, ...");
    const Formula& f = ln.formula;
    const Justification& j = ln.just;
    for (int r : j.refs)
      if (r < 1 || r >= n) return fail(n, "reference " + std::to_string(r) + " does not precede the line");

    if (star && j.rule == Rule::Axiom && j.schema && j.schema->kind == SchemaId::Kind::EquivAbstraction &&
        !sig.find(j.schema->symbol)) {
      std::string why = match_axiom(theory, reg, sig, *j.schema, f);
      if (!why.empty()) return fail(n, why);
      auto a = abs_shape(f.right());
      AbstractionSymbol sym{a->id, a->e.arity(), a->e};
      sig.add(sym);
      rep.minted.push_back(sym);
    }
    SortReport sr = well_sorted(sig, f);
    if (!sr.ok) return fail(n, "ill-sorted: " + sr.errors.front().location + ": " + sr.errors.front().message);

    std::string why;
    switch (j.rule) {
      case Rule::MP: {
        if (j.refs.size() != 2) return fail(n, "mp takes two line numbers");
        const Formula& a = d.lines[j.refs[0] - 1].formula;
        const Formula& ab = d.lines[j.refs[1] - 1].formula;
        if (!(imp(ab) && alpha_eq(ab.left(), a) && alpha_eq(ab.right(), f)))
          why = "line " + std::to_string(j.refs[1]) + " is not an implication from line " +
                std::to_string(j.refs[0]) + " to this line";
        break;
      }
      case Rule::Gen: {
        if (j.refs.size() != 1) return fail(n, "gen takes one line number");
        if (!(is(f, K::Forall) && alpha_eq(f.body(), d.lines[j.refs[0] - 1].formula)))
          why = "not a generalization of line " + std::to_string(j.refs[0]);
        break;
      }
      case Rule::Axiom: {
        if (!j.schema) return fail(n, "axiom needs a schema id");
        if (j.schema->kind == SchemaId::Kind::Delta11Comp) {
          if (opts.strict) return fail(n, "admitted-delta11 instance rejected in strict mode");
          rep.admitted_delta11 = true;
        }
        why = match_axiom(theory, reg, sig, *j.schema, f);
        break;
      }
      default:
        if (!j.refs.empty()) return fail(n, std::string(to_string(j.rule)) + " takes no arguments");
        why = match_logical(j.rule, f);
    }
    if (!why.empty()) return fail(n, std::string(to_string(j.rule)) + ": " + why);
  }
  return rep;
}

Registry certify_equivalence(const EquivDef& e, const Derivation& cert, const Registry& reg,
                             std::string cert_path) {
  if (!e.left.sort.is_concept() || e.left.sort != e.right.sort || e.left.name == e.right.name)
    throw Error(ErrorKind::BadFreeVariables, "E needs two distinct concept variables of one arity");
  for (const Var& v : e.body.free_vars())
    if (!(v == e.left) && !(v == e.right))
      throw Error(ErrorKind::BadFreeVariables, "E has extra free variable " + v.name);

  if (const RegistryEntry* have = reg.find_equiv(e)) {
    (void)have;
    return reg;
  }
  // Level 1: L₀ only, certified in Σ¹₁-OS. Level 2: L₁, certified in PFT.
  const int level = e.body.has_abstraction() ? 2 : 1;
  if (level > reg.level())
    throw Error(ErrorKind::WrongLanguageLevel, "E uses abstraction terms; level 1 admits L₀ formulas only");
  if (level == 2) {
    SortReport sr = well_sorted(reg.signature(1), e.body);
    if (!sr.ok) throw Error(ErrorKind::WrongLanguageLevel, "E is not an L₁ formula: " + sr.errors.front().message);
  }
  TheoryId theory{level == 1 ? TheoryKind::Sigma11OS : TheoryKind::PFT};
  CheckReport rep = check(cert, theory, reg, {true});
  if (!rep.ok)
    throw Error(ErrorKind::CertificateRejected,
                "certificate fails at line " + std::to_string(rep.first_failure->first) + ": " +
                    rep.first_failure->second);
  if (!alpha_eq(cert.conclusion(), equiv_sentence(e)))
    throw Error(ErrorKind::CertificateRejected, "certificate does not conclude Equiv(E)");
  Registry out = reg;
  out.entries_.push_back(RegistryEntry{e, symbol_for(e), level, cert, std::move(cert_path)});
  return out;
}

TheoryId assemble_theory(int level, const Registry& reg) {
  if (level != reg.level())
    throw Error(ErrorKind::LevelMismatch, "registry has level " + std::to_string(reg.level()) +
                                              ", requested level " + std::to_string(level));
  return TheoryId{level == 1 ? TheoryKind::PFT : TheoryKind::PFT2};
}

// --- derivation files -----------------------------------------------------------

namespace {

std::string print_just(const Justification& j) {
  std::string out = "(";
  out += to_string(j.rule);
  for (int r : j.refs) out += " " + std::to_string(r);
  if (j.schema) out += " " + j.schema->str();
  return out + ")";
}

int parse_int(const SExpr& e) {
  if (!e.atom || e.text.empty() || !std::all_of(e.text.begin(), e.text.end(), ::isdigit) || e.text.size() > 9)
    throw Error(ErrorKind::Syntax, e.where() + ": expected a line number");
  return std::stoi(e.text);
}

void read_declare(const SExpr& e, std::map<std::string, Sort>& out) {
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& d = e.items[i];
    if (d.atom || d.items.size() != 2 || !d.items[0].atom)
      throw Error(ErrorKind::Syntax, d.where() + ": declare expects (v S) entries");
    Sort s = parse_sort(d.items[1]);
    auto [pos, fresh] = out.emplace(d.items[0].text, s);
    if (!fresh && pos->second != s)
      throw Error(ErrorKind::VariableCollision, d.where() + ": " + d.items[0].text + " declared at two sorts");
  }
}

}  // namespace

std::string print_derivation(const Derivation& d) {
  // Free variables the reader would mis-sort get a file-wide declaration.
  std::map<std::string, Sort> declared;
  std::map<std::string, std::set<int>> sorts_used;
  Signature none;
  for (const Line& ln : d.lines) {
    auto guessed = inferred_free_sorts(ln.formula, none);
    for (const Var& v : ln.formula.free_vars()) {
      sorts_used[v.name].insert(v.sort.arity());
      auto it = guessed.find(v.name);
      if (it == guessed.end() || it->second != v.sort) {
        auto [pos, fresh] = declared.emplace(v.name, v.sort);
        if (!fresh && pos->second != v.sort)
          throw Error(ErrorKind::VariableCollision, "free variable " + v.name + " needs two declarations");
      }
    }
  }
  std::string out;
  if (!declared.empty()) {
    for (const auto& [name, s] : declared)
      if (sorts_used[name].size() > 1)
        throw Error(ErrorKind::VariableCollision, "free variable " + name + " is used at two sorts");
    out += "(declare";
    for (const auto& [name, s] : declared) out += " (" + name + " " + print_sort(s) + ")";
    out += ")\n";
  }
  for (const Line& ln : d.lines)
    out += "(line " + std::to_string(ln.n) + " " + print_formula(ln.formula) + " " + print_just(ln.just) + ")\n";
  return out;
}

Derivation parse_derivation(std::string_view text) {
  Derivation d;
  ParseOptions opts;
  opts.strict_symbols = false;
  Signature none;
  for (const SExpr& e : read_sexprs(text)) {
    if (e.head() == "declare") {
      read_declare(e, opts.free_sorts);
      continue;
    }
    if (e.head() != "line" || e.items.size() != 4 || e.items[3].atom || e.items[3].items.empty())
      throw Error(ErrorKind::Syntax, e.where() + ": expected (line <n> <formula> (<rule> ...))");
    Line ln{parse_int(e.items[1]), formula_from_sexpr(e.items[2], none, opts), {}};
    const SExpr& js = e.items[3];
    auto rule = rule_from_string(js.head());
    if (!rule) throw Error(ErrorKind::Syntax, js.where() + ": unknown rule " + to_string(js));
    ln.just.rule = *rule;
    if (*rule == Rule::Axiom) {
      std::vector<std::string> words;
      for (std::size_t i = 1; i < js.items.size(); ++i) {
        if (!js.items[i].atom) throw Error(ErrorKind::Syntax, js.items[i].where() + ": bad schema id");
        words.push_back(js.items[i].text);
      }
      ln.just.schema = SchemaId::parse(words);
    } else {
      for (std::size_t i = 1; i < js.items.size(); ++i) ln.just.refs.push_back(parse_int(js.items[i]));
    }
    d.lines.push_back(std::move(ln));
  }
  return d;
}

// --- registry files ---------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string unquote(const std::string& s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return s;
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

const SExpr& field(const SExpr& e, const std::string& name, std::size_t arity) {
  for (const SExpr& it : e.items)
    if (it.head() == name && it.items.size() == arity + 1) return it;
  throw Error(ErrorKind::Syntax, e.where() + ": entry lacks (" + name + " ...)");
}

}  // namespace

std::string print_registry(const Registry& r) {
  std::string out = "(registry (level " + std::to_string(r.level()) + "))\n";
  for (const RegistryEntry& e : r.entries()) {
    out += "(entry (id " + e.symbol.id + ") (level " + std::to_string(e.level) + ") (left " + e.equiv.left.name +
           " " + print_sort(e.equiv.left.sort) + ") (right " + e.equiv.right.name + " " +
           print_sort(e.equiv.right.sort) + ") (formula " + print_formula(e.equiv.body) + ") (certificate " +
           quote(e.certificate_path) + "))\n";
  }
  return out;
}

Registry parse_registry(std::string_view text, const std::function<Derivation(const std::string&)>& load) {
  auto forms = read_sexprs(text);
  if (forms.empty() || forms[0].head() != "registry")
    throw Error(ErrorKind::Syntax, "registry file must start with (registry (level n))");
  Registry reg(parse_int(field(forms[0], "level", 1).items[1]));
  for (std::size_t i = 1; i < forms.size(); ++i) {
    const SExpr& e = forms[i];
    if (e.head() != "entry") throw Error(ErrorKind::Syntax, e.where() + ": expected (entry ...)");
    const SExpr& l = field(e, "left", 2);
    const SExpr& r = field(e, "right", 2);
    Var left{l.items[1].text, parse_sort(l.items[2])};
    Var right{r.items[1].text, parse_sort(r.items[2])};
    ParseOptions opts;
    opts.free_sorts[left.name] = left.sort;
    opts.free_sorts[right.name] = right.sort;
    Formula body = formula_from_sexpr(field(e, "formula", 1).items[1], reg.signature(2), opts);
    std::string path = unquote(field(e, "certificate", 1).items[1].text);
    EquivDef def{body, left, right};
    std::string id = field(e, "id", 1).items[1].text;
    if (canonical_symbol_id(def) != id)
      throw Error(ErrorKind::CertificateRejected, e.where() + ": id " + id + " is not canonical for its formula");
    reg = certify_equivalence(def, load(path), reg, path);
  }
  return reg;
}

bool registry_equal(const Registry& a, const Registry& b) {
  if (a.level() != b.level() || a.entries().size() != b.entries().size()) return false;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    const RegistryEntry &x = a.entries()[i], &y = b.entries()[i];
    if (x.symbol.id != y.symbol.id || x.level != y.level || x.certificate_path != y.certificate_path ||
        !equiv_alpha_eq(x.equiv, y.equiv) || !(x.equiv.left == y.equiv.left) || !(x.equiv.right == y.equiv.right))
      return false;
  }
  return true;
}

}  // namespace pft
