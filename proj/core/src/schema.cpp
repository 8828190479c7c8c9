#include "pft/schema.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "pft/error.hpp"

namespace pft {

const char* to_string(FormulaClass c) {
  switch (c) {
    case FormulaClass::FirstOrder: return "FirstOrder";
    case FormulaClass::Sigma11: return "Sigma11";
    case FormulaClass::Pi11: return "Pi11";
    case FormulaClass::Unclassified: return "Unclassified";
  }
  return "?";
}

namespace {

// Strips a leading block of `k` quantifiers over concepts.
const Formula& strip_concept_block(const Formula& f, Formula::Kind k) {
  const Formula* cur = &f;
  while (cur->kind() == k && cur->bound().sort.is_concept()) cur = &cur->body();
  return *cur;
}

}  // namespace

FormulaClass classify(const Formula& f) {
  if (!f.has_concept_quantifier()) return FormulaClass::FirstOrder;
  if (!strip_concept_block(f, Formula::Kind::Exists).has_concept_quantifier())
    return FormulaClass::Sigma11;
  if (!strip_concept_block(f, Formula::Kind::Forall).has_concept_quantifier())
    return FormulaClass::Pi11;
  return FormulaClass::Unclassified;
}

bool admits(const Formula& f, FormulaClass role) {
  FormulaClass c = classify(f);
  if (c == role) return true;
  return c == FormulaClass::FirstOrder &&
         (role == FormulaClass::Sigma11 || role == FormulaClass::Pi11);
}

// --- schema ids ------------------------------------------------------------

std::string SchemaId::str() const {
  switch (kind) {
    case Kind::FullComp: return "full-comp";
    case Kind::FOComp: return "fo-comp";
    case Kind::Delta11Comp: return "delta11";
    case Kind::Sigma11Choice: return "choice";
    case Kind::Extensionality: return "ext " + std::to_string(m);
    case Kind::Projection: return "proj " + std::to_string(m) + " " + std::to_string(n);
    case Kind::Abstraction: return "abs " + symbol;
    case Kind::EquivSentence: return "equiv";
    case Kind::EquivAbstraction: return "equiv-abs " + symbol;
  }
  return "?";
}

SchemaId SchemaId::parse(std::span<const std::string> w) {
  auto need = [&](std::size_t k) {
    if (w.size() != k) throw Error(ErrorKind::Syntax, "malformed schema id");
  };
  auto num = [&](const std::string& s) {
    if (s.empty() || s.size() > 3 || !std::all_of(s.begin(), s.end(), ::isdigit))
      throw Error(ErrorKind::Syntax, "schema parameter must be a small integer: " + s);
    int v = std::stoi(s);
    if (v < 1) throw Error(ErrorKind::BadArity, "schema parameter must be >= 1");
    return v;
  };
  if (w.empty()) throw Error(ErrorKind::Syntax, "empty schema id");
  SchemaId id;
  const std::string& h = w[0];
  if (h == "full-comp") {
    need(1);
    id.kind = Kind::FullComp;
  } else if (h == "fo-comp") {
    need(1);
    id.kind = Kind::FOComp;
  } else if (h == "delta11") {
    need(1);
    id.kind = Kind::Delta11Comp;
  } else if (h == "choice") {
    need(1);
    id.kind = Kind::Sigma11Choice;
  } else if (h == "ext") {
    need(2);
    id.kind = Kind::Extensionality;
    id.m = num(w[1]);
  } else if (h == "proj") {
    need(3);
    id.kind = Kind::Projection;
    id.m = num(w[1]);
    id.n = num(w[2]);
  } else if (h == "abs") {
    need(2);
    id.kind = Kind::Abstraction;
    id.symbol = w[1];
  } else if (h == "equiv") {
    need(1);
    id.kind = Kind::EquivSentence;
  } else if (h == "equiv-abs") {
    need(2);
    id.kind = Kind::EquivAbstraction;
    id.symbol = w[1];
  } else {
    throw Error(ErrorKind::UnknownName, "unknown schema id " + h);
  }
  return id;
}

// --- comprehension, choice --------------------------------------------------

namespace {

void check_tuple(std::span<const Var> tuple, const Var& rel, const Formula& phi) {
  if (tuple.empty()) throw Error(ErrorKind::BadArity, "comprehension needs at least one tuple variable");
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (!tuple[i].sort.is_object())
      throw Error(ErrorKind::SortMismatch, "tuple variable " + tuple[i].name + " is not an object");
    for (std::size_t j = 0; j < i; ++j)
      if (tuple[i].name == tuple[j].name)
        throw Error(ErrorKind::VariableCollision, "tuple variable " + tuple[i].name + " repeated");
  }
  if (!rel.sort.is_concept() || rel.sort.arity() != static_cast<int>(tuple.size()))
    throw Error(ErrorKind::BadArity, "relation " + rel.name + " must have arity " +
                                         std::to_string(tuple.size()));
  if (phi.has_free_name(rel.name))
    throw Error(ErrorKind::VariableCollision, "relation variable " + rel.name + " occurs free");
}

Formula comp_body(const Formula& phi, std::span<const Var> tuple, const Var& rel) {
  return Formula::exists(
      rel, Formula::forall_all(tuple, Formula::iff(pred(rel, tuple), phi)));
}

}  // namespace

Formula fo_comp_instance(const Formula& phi, std::span<const Var> tuple, const Var& rel) {
  if (classify(phi) != FormulaClass::FirstOrder)
    throw Error(ErrorKind::NotFirstOrder, "first-order comprehension needs a first-order formula");
  check_tuple(tuple, rel, phi);
  return comp_body(phi, tuple, rel);
}

Formula full_comp_instance(const Formula& phi, std::span<const Var> tuple, const Var& rel) {
  check_tuple(tuple, rel, phi);
  return comp_body(phi, tuple, rel);
}

Formula delta11_comp_instance(const Formula& phi, const Formula& psi, std::span<const Var> tuple,
                              const Var& rel) {
  if (!admits(phi, FormulaClass::Sigma11))
    throw Error(ErrorKind::WrongClass, "left side of a delta11 instance must be Sigma11");
  if (!admits(psi, FormulaClass::Pi11))
    throw Error(ErrorKind::WrongClass, "right side of a delta11 instance must be Pi11");
  check_tuple(tuple, rel, phi);
  if (psi.has_free_name(rel.name))
    throw Error(ErrorKind::VariableCollision, "relation variable " + rel.name + " occurs free");
  return Formula::implies(Formula::forall_all(tuple, Formula::iff(phi, psi)),
                          comp_body(phi, tuple, rel));
}

Formula sigma11_choice_instance(const Formula& phi, const Var& witness, std::span<const Var> xs,
                                const Var& rel) {
  if (!admits(phi, FormulaClass::Sigma11))
    throw Error(ErrorKind::WrongClass, "choice needs a Sigma11 formula");
  if (!witness.sort.is_concept())
    throw Error(ErrorKind::SortMismatch, "choice witness must be a concept variable");
  if (xs.empty()) throw Error(ErrorKind::BadArity, "choice needs at least one object variable");
  for (const Var& x : xs)
    if (!x.sort.is_object()) throw Error(ErrorKind::SortMismatch, x.name + " is not an object");
  const int want = static_cast<int>(xs.size()) + witness.sort.arity();
  if (!rel.sort.is_concept() || rel.sort.arity() != want)
    throw Error(ErrorKind::BadArity, "choice relation must have arity " + std::to_string(want));
  if (phi.has_free_name(rel.name) || rel.name == witness.name)
    throw Error(ErrorKind::VariableCollision, "relation variable " + rel.name + " occurs free");
  Term section = Term::proj(Term::var(rel), as_terms(xs));
  Formula ante = Formula::forall_all(xs, Formula::exists(witness, phi));
  Formula cons = Formula::exists(rel, Formula::forall_all(xs, substitute(phi, witness, section)));
  return Formula::implies(ante, cons);
}

namespace {

std::vector<Var> numbered(const std::string& stem, int k) {
  std::vector<Var> out;
  if (k == 1) {
    out.push_back(Var::obj(stem));
    return out;
  }
  for (int i = 1; i <= k; ++i) out.push_back(Var::obj(stem + std::to_string(i)));
  return out;
}

}  // namespace

Formula extensionality_axiom(int m) {
  if (m < 1) throw Error(ErrorKind::BadArity, "extensionality needs m >= 1");
  Var r = Var::conc("R", m);
  Var s = Var::conc("S", m);
  auto as = numbered("a", m);
  Formula co = Formula::forall_all(as, Formula::iff(pred(r, as), pred(s, as)));
  return Formula::forall(
      r, Formula::forall(s, Formula::iff(Formula::eq(Term::var(r), Term::var(s)), co)));
}

Formula projection_axiom(int m, int n) {
  if (m < 1 || n < 1) throw Error(ErrorKind::BadArity, "projection axioms need m, n >= 1");
  Var r = Var::conc("R", m + n);
  auto as = numbered("a", m);
  auto bs = numbered("b", n);
  std::vector<Var> both = as;
  both.insert(both.end(), bs.begin(), bs.end());
  Formula lhs = Formula::pred(Term::proj(Term::var(r), as_terms(as)), as_terms(bs));
  Formula body = Formula::iff(lhs, pred(r, both));
  return Formula::forall(r, Formula::forall_all(both, body));
}

// --- equivalences and abstraction ------------------------------------------

Formula equiv_sentence(const EquivDef& e) {
  if (!e.left.sort.is_concept() || e.left.sort != e.right.sort || e.left.name == e.right.name)
    throw Error(ErrorKind::BadFreeVariables, "equivalence needs two distinct same-arity concept variables");
  for (const Var& v : e.body.free_vars()) {
    if (!(v == e.left) && !(v == e.right))
      throw Error(ErrorKind::BadFreeVariables, "equivalence formula has extra free variable " + v.name);
  }
  std::set<std::string> avoid = all_names(e.body);
  avoid.insert(e.left.name);
  avoid.insert(e.right.name);
  Var t{fresh_name("T", avoid), e.left.sort};
  Term R = Term::var(e.left), S = Term::var(e.right), T = Term::var(t);
  Formula refl = e.apply(R, R);
  Formula sym = Formula::implies(e.apply(R, S), e.apply(S, R));
  Formula trans = Formula::implies(Formula::conj(e.apply(R, S), e.apply(S, T)), e.apply(R, T));
  Formula body = Formula::conj(refl, Formula::conj(sym, trans));
  return Formula::forall(e.left, Formula::forall(e.right, Formula::forall(t, body)));
}

EquivDef equiv_def_from(const Formula& e) {
  std::vector<Var> vs(e.free_vars().begin(), e.free_vars().end());
  if (vs.size() != 2 || !vs[0].sort.is_concept() || vs[0].sort != vs[1].sort)
    throw Error(ErrorKind::BadFreeVariables,
                "an equivalence formula needs exactly two free concept variables of one arity");
  return EquivDef{e, vs[0], vs[1]};
}

AbstractionSymbol symbol_for(const EquivDef& e) {
  return AbstractionSymbol{canonical_symbol_id(e), e.arity(), e};
}

Formula abstraction_principle(const EquivDef& e, const AbstractionSymbol& sym) {
  if (sym.arity != e.arity())
    throw Error(ErrorKind::BadArity, "symbol " + sym.id + " has arity " + std::to_string(sym.arity) +
                                         " but E relates " + std::to_string(e.arity()) + "-ary concepts");
  Term R = Term::var(e.left), S = Term::var(e.right);
  Formula lhs = Formula::eq(Term::abs(sym.id, sym.arity, R), Term::abs(sym.id, sym.arity, S));
  return Formula::forall(e.left, Formula::forall(e.right, Formula::iff(lhs, e.body)));
}

// --- corpus ------------------------------------------------------------------

namespace {

// Internal placeholder names never produced by the reader.
Var ph(const char* name, int arity) {
  return arity == 0 ? Var::obj(std::string("%") + name) : Var::conc(std::string("%") + name, arity);
}

Formula R2(const Var& r, const Var& a, const Var& b) {
  return Formula::pred(Term::var(r), {Term::var(a), Term::var(b)});
}

using Pred1 = std::function<Formula(const Var&)>;

Formula bijection_core(const Var& f, const Pred1& in_x, const Pred1& in_y) {
  Var u = Var::obj("u"), v = Var::obj("v"), w = Var::obj("w");
  Formula dom = Formula::forall(
      u, Formula::forall(v, Formula::implies(R2(f, u, v), Formula::conj(in_x(u), in_y(v)))));
  Formula total = Formula::forall(u, Formula::implies(in_x(u), Formula::exists(v, R2(f, u, v))));
  Formula func = Formula::forall(
      u, Formula::forall(
             v, Formula::forall(w, Formula::implies(Formula::conj(R2(f, u, v), R2(f, u, w)),
                                                    obj_eq(v, w)))));
  Formula inj = Formula::forall(
      u, Formula::forall(
             v, Formula::forall(w, Formula::implies(Formula::conj(R2(f, u, w), R2(f, v, w)),
                                                    obj_eq(u, v)))));
  Formula surj = Formula::forall(v, Formula::implies(in_y(v), Formula::exists(u, R2(f, u, v))));
  std::vector<Formula> parts = {dom, total, func, inj, surj};
  return Formula::conj_all(parts);
}

Formula field_raw(const Var& r, const Var& x) {
  Var y = Var::obj("y");
  return Formula::exists(y, Formula::disj(R2(r, x, y), R2(r, y, x)));
}

Formula wo_raw(const Var& r) {
  Var u = Var::obj("u"), v = Var::obj("v"), w = Var::obj("w");
  Var z = Var::conc("Z", 1);
  auto fld = [&](const Var& x) { return field_raw(r, x); };
  Formula irrefl = Formula::forall(u, Formula::neg(R2(r, u, u)));
  Formula trans = Formula::forall(
      u, Formula::forall(
             v, Formula::forall(w, Formula::implies(Formula::conj(R2(r, u, v), R2(r, v, w)),
                                                    R2(r, u, w)))));
  Formula connex = Formula::forall(
      u, Formula::forall(
             v, Formula::implies(Formula::conj(fld(u), fld(v)),
                                 Formula::disj(R2(r, u, v),
                                               Formula::disj(obj_eq(u, v), R2(r, v, u))))));
  Formula nonempty = Formula::exists(u, pred(z, std::vector<Term>{Term::var(u)}));
  Formula inside = Formula::forall(
      u, Formula::implies(pred(z, std::vector<Term>{Term::var(u)}), fld(u)));
  Formula least = Formula::exists(
      u, Formula::conj(pred(z, std::vector<Term>{Term::var(u)}),
                       Formula::forall(v, Formula::implies(pred(z, std::vector<Term>{Term::var(v)}),
                                                           Formula::neg(R2(r, v, u))))));
  Formula wf = Formula::forall(z, Formula::implies(Formula::conj(nonempty, inside), least));
  std::vector<Formula> parts = {irrefl, trans, connex, wf};
  return Formula::conj_all(parts);
}

Formula iso_raw(const Var& f, const Var& r, const Var& s) {
  Formula bij = bijection_core(f, [&](const Var& x) { return field_raw(r, x); },
                               [&](const Var& x) { return field_raw(s, x); });
  Var u = Var::obj("u"), v = Var::obj("v"), u2 = Var::obj("u2"), v2 = Var::obj("v2");
  Formula pres = Formula::forall(
      u, Formula::forall(
             v, Formula::forall(
                    u2, Formula::forall(
                            v2, Formula::implies(Formula::conj(R2(f, u, u2), R2(f, v, v2)),
                                                 Formula::iff(R2(r, u, v), R2(s, u2, v2)))))));
  return Formula::conj(bij, pres);
}

}  // namespace

Formula field_formula(const Term& rel, const Term& x) {
  Var r = ph("R", 2), y = ph("x", 0);
  return substitute(field_raw(r, y), Substitution{{r, rel}, {y, x}});
}

Formula wo_formula(const Term& rel) {
  Var r = ph("R", 2);
  return substitute(wo_raw(r), r, rel);
}

Formula bijection_formula(const Term& f, const Term& x, const Term& y) {
  Var pf = ph("f", 2), px = ph("X", 1), py = ph("Y", 1);
  Formula raw = bijection_core(
      pf, [&](const Var& a) { return pred(px, std::vector<Term>{Term::var(a)}); },
      [&](const Var& a) { return pred(py, std::vector<Term>{Term::var(a)}); });
  return substitute(raw, Substitution{{pf, f}, {px, x}, {py, y}});
}

Formula isomorphism_formula(const Term& f, const Term& r, const Term& s) {
  Var pf = ph("f", 2), pr = ph("R", 2), ps = ph("S", 2);
  return substitute(iso_raw(pf, pr, ps), Substitution{{pf, f}, {pr, r}, {ps, s}});
}

EquivDef corpus_equiv(const std::string& name) {
  if (name == "blv_equiv") {
    Var x = Var::conc("X", 1), y = Var::conc("Y", 1);
    return EquivDef{Formula::eq(Term::var(x), Term::var(y)), x, y};
  }
  if (name == "hp_equiv") {
    Var x = Var::conc("X", 1), y = Var::conc("Y", 1), f = Var::conc("f", 2);
    return EquivDef{
        Formula::exists(f, bijection_formula(Term::var(f), Term::var(x), Term::var(y))), x, y};
  }
  if (name == "ordinal_equiv") {
    Var r = Var::conc("R", 2), s = Var::conc("S", 2), f = Var::conc("f", 2);
    Formula ante = Formula::disj(wo_formula(Term::var(r)), wo_formula(Term::var(s)));
    Formula iso = Formula::exists(f, isomorphism_formula(Term::var(f), Term::var(r), Term::var(s)));
    return EquivDef{Formula::implies(ante, iso), r, s};
  }
  throw Error(ErrorKind::UnknownName, "unknown corpus equivalence " + name);
}

Formula corpus_formula(const std::string& name) {
  if (name == "wo") return wo_formula(Term::conc("R", 2));
  if (name == "field") return field_formula(Term::conc("R", 2), Term::obj("x"));
  if (name == "blv_equiv" || name == "hp_equiv" || name == "ordinal_equiv")
    return corpus_equiv(name).body;
  throw Error(ErrorKind::UnknownName, "unknown corpus formula " + name);
}

std::vector<std::string> corpus_names() {
  return {"blv_equiv", "hp_equiv", "ordinal_equiv", "wo", "field"};
}

Formula universal_closure(const Formula& f) {
  std::vector<Var> vs(f.free_vars().begin(), f.free_vars().end());
  return Formula::forall_all(vs, f);
}

// --- hoisting ------------------------------------------------------------------

Formula hoist_concept_quantifiers(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
    case Formula::Kind::Eq:
      return f;
    case Formula::Kind::Not:
      return Formula::neg(hoist_concept_quantifiers(f.body()));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return Formula::quant(f.kind(), f.bound(), hoist_concept_quantifiers(f.body()));
    case Formula::Kind::Implies:
    case Formula::Kind::Iff:
      return Formula::binary(f.kind(), hoist_concept_quantifiers(f.left()),
                             hoist_concept_quantifiers(f.right()));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      Formula a = hoist_concept_quantifiers(f.left());
      Formula b = hoist_concept_quantifiers(f.right());
      if (a.is_quantifier() && a.bound().sort.is_concept() && !b.has_free_name(a.bound().name)) {
        return Formula::quant(a.kind(), a.bound(),
                              hoist_concept_quantifiers(Formula::binary(f.kind(), a.body(), b)));
      }
      if (b.is_quantifier() && b.bound().sort.is_concept() && !a.has_free_name(b.bound().name)) {
        return Formula::quant(b.kind(), b.bound(),
                              hoist_concept_quantifiers(Formula::binary(f.kind(), a, b.body())));
      }
      return Formula::binary(f.kind(), a, b);
    }
  }
  return f;
}

}  // namespace pft
