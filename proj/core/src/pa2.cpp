#include "pft/pa2.hpp"

#include <cctype>
#include <functional>
#include <map>

#include "pft/compiler.hpp"
#include "pft/error.hpp"
#include "pft/prover.hpp"
#include "pft/schema.hpp"
#include "pft/sexpr.hpp"

namespace pft {

// --- reading and printing --------------------------------------------------------

namespace {

[[noreturn]] void syntax(const SExpr& e, const std::string& msg) {
  throw Error(ErrorKind::Syntax, e.where() + ": " + msg);
}

bool is_name(const std::string& s) {
  if (s.empty() || s == "0" || s == "s" || s == "+" || s == "*" || s == "in" || s == "=") return false;
  return std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_';
}

Pa2Term read_term(const SExpr& e) {
  if (e.atom) {
    if (e.text == "0") return Pa2Term::zero();
    if (!is_name(e.text)) syntax(e, "bad number term " + e.text);
    return Pa2Term::var(e.text);
  }
  const std::string& h = e.head();
  if (h == "s") {
    if (e.items.size() != 2) syntax(e, "s takes one argument");
    return Pa2Term::succ(read_term(e.items[1]));
  }
  if (h == "+" || h == "*") {
    if (e.items.size() != 3) syntax(e, h + " takes two arguments");
    Pa2Term a = read_term(e.items[1]), b = read_term(e.items[2]);
    return h == "+" ? Pa2Term::plus(std::move(a), std::move(b)) : Pa2Term::times(std::move(a), std::move(b));
  }
  syntax(e, "unknown term former " + h);
}

Pa2Formula read_formula(const SExpr& e) {
  if (e.atom) syntax(e, "expected a formula");
  const std::string& h = e.head();
  Pa2Formula f;
  auto arity = [&](std::size_t n) {
    if (e.items.size() != n + 1) syntax(e, h + " takes " + std::to_string(n) + " arguments");
  };
  if (h == "=") {
    arity(2);
    f.kind = Pa2Formula::Kind::Eq;
    f.terms = {read_term(e.items[1]), read_term(e.items[2])};
  } else if (h == "in") {
    arity(2);
    f.kind = Pa2Formula::Kind::In;
    f.terms = {read_term(e.items[1])};
    if (!e.items[2].atom || !is_name(e.items[2].text)) syntax(e.items[2], "expected a set variable");
    f.var = e.items[2].text;
  } else if (h == "not") {
    arity(1);
    f.kind = Pa2Formula::Kind::Not;
    f.subs = {read_formula(e.items[1])};
  } else if (h == "and" || h == "or" || h == "implies" || h == "iff") {
    arity(2);
    f.kind = h == "and" ? Pa2Formula::Kind::And
             : h == "or" ? Pa2Formula::Kind::Or
             : h == "implies" ? Pa2Formula::Kind::Implies
                              : Pa2Formula::Kind::Iff;
    f.subs = {read_formula(e.items[1]), read_formula(e.items[2])};
  } else if (h == "forall" || h == "exists") {
    arity(2);
    const SExpr& b = e.items[1];
    if (b.atom || b.items.size() != 2 || !b.items[0].atom || !is_name(b.items[0].text) || !b.items[1].atom)
      syntax(b, "expected (name Nat) or (name Set)");
    f.kind = h == "forall" ? Pa2Formula::Kind::Forall : Pa2Formula::Kind::Exists;
    f.var = b.items[0].text;
    if (b.items[1].text == "Nat") f.sort = Pa2Sort::Nat;
    else if (b.items[1].text == "Set") f.sort = Pa2Sort::Set;
    else syntax(b.items[1], "unknown sort " + b.items[1].text);
    f.subs = {read_formula(e.items[2])};
  } else {
    syntax(e, "unknown formula former " + h);
  }
  return f;
}

void term_vars(const Pa2Term& t, std::vector<std::string>& out) {
  if (t.kind == Pa2Term::Kind::Var) out.push_back(t.name);
  for (const auto& a : t.args) term_vars(a, out);
}

// Free occurrences with the sort each occurrence demands.
void occurrences(const Pa2Formula& f, std::map<std::string, Pa2Sort>& bound,
                 std::vector<std::pair<std::string, Pa2Sort>>& out) {
  auto note = [&](const std::string& n, Pa2Sort s) {
    auto it = bound.find(n);
    if (it == bound.end()) {
      out.emplace_back(n, s);
    } else if (it->second != s) {
      throw Error(ErrorKind::SortMismatch, "variable " + n + " is bound at the other sort");
    }
  };
  std::vector<std::string> names;
  for (const auto& t : f.terms) term_vars(t, names);
  for (const auto& n : names) note(n, Pa2Sort::Nat);
  if (f.kind == Pa2Formula::Kind::In) note(f.var, Pa2Sort::Set);
  if (f.kind == Pa2Formula::Kind::Forall || f.kind == Pa2Formula::Kind::Exists) {
    auto saved = bound;
    bound[f.var] = f.sort;
    occurrences(f.subs[0], bound, out);
    bound = std::move(saved);
    return;
  }
  for (const auto& s : f.subs) occurrences(s, bound, out);
}

std::string print_term(const Pa2Term& t) {
  switch (t.kind) {
    case Pa2Term::Kind::Var: return t.name;
    case Pa2Term::Kind::Zero: return "0";
    case Pa2Term::Kind::Succ: return "(s " + print_term(t.args[0]) + ")";
    case Pa2Term::Kind::Plus: return "(+ " + print_term(t.args[0]) + " " + print_term(t.args[1]) + ")";
    case Pa2Term::Kind::Times: return "(* " + print_term(t.args[0]) + " " + print_term(t.args[1]) + ")";
  }
  return "?";
}

}  // namespace

Pa2Formula parse_pa2(std::string_view text) {
  std::vector<SExpr> es = read_sexprs(text);
  if (es.size() != 1) throw Error(ErrorKind::Syntax, "expected exactly one formula");
  Pa2Formula f = read_formula(es[0]);
  pa2_free_vars(f);
  return f;
}

std::set<std::pair<std::string, Pa2Sort>> pa2_free_vars(const Pa2Formula& f) {
  std::map<std::string, Pa2Sort> bound;
  std::vector<std::pair<std::string, Pa2Sort>> occ;
  occurrences(f, bound, occ);
  std::map<std::string, Pa2Sort> seen;
  for (const auto& [n, s] : occ) {
    auto [it, fresh] = seen.emplace(n, s);
    if (!fresh && it->second != s) throw Error(ErrorKind::SortMismatch, "free variable " + n + " used at both sorts");
  }
  return {seen.begin(), seen.end()};
}

std::string print_pa2(const Pa2Formula& f) {
  switch (f.kind) {
    case Pa2Formula::Kind::Eq: return "(= " + print_term(f.terms[0]) + " " + print_term(f.terms[1]) + ")";
    case Pa2Formula::Kind::In: return "(in " + print_term(f.terms[0]) + " " + f.var + ")";
    case Pa2Formula::Kind::Not: return "(not " + print_pa2(f.subs[0]) + ")";
    case Pa2Formula::Kind::And: return "(and " + print_pa2(f.subs[0]) + " " + print_pa2(f.subs[1]) + ")";
    case Pa2Formula::Kind::Or: return "(or " + print_pa2(f.subs[0]) + " " + print_pa2(f.subs[1]) + ")";
    case Pa2Formula::Kind::Implies: return "(implies " + print_pa2(f.subs[0]) + " " + print_pa2(f.subs[1]) + ")";
    case Pa2Formula::Kind::Iff: return "(iff " + print_pa2(f.subs[0]) + " " + print_pa2(f.subs[1]) + ")";
    case Pa2Formula::Kind::Forall:
    case Pa2Formula::Kind::Exists:
      return std::string(f.kind == Pa2Formula::Kind::Forall ? "(forall (" : "(exists (") + f.var + " " +
             (f.sort == Pa2Sort::Nat ? "Nat" : "Set") + ") " + print_pa2(f.subs[0]) + ")";
  }
  return "?";
}

// --- definitions -------------------------------------------------------------------

namespace {

Term tv(const Var& v) { return Term::var(v); }
Formula eq(const Term& a, const Term& b) { return Formula::eq(a, b); }
Formula ap(const Term& r, std::vector<Term> args) { return Formula::pred(r, std::move(args)); }

EquivDef blv() { return corpus_equiv("blv_equiv"); }

InterpretationData build() {
  InterpretationData d;
  d.symbol = canonical_symbol_id(blv());
  d.x = Var::obj("%x");
  d.y = Var::obj("%y");
  d.z = Var::obj("%z");
  auto ext = [&](const Term& c) { return Term::abs(d.symbol, 1, c); };
  const Var a = Var::obj("a"), E = Var::conc("E", 1), X = Var::conc("X", 1);
  d.zero_def = Formula::exists(
      E, Formula::conj(Formula::forall(a, Formula::neg(ap(tv(E), {tv(a)}))), eq(ext(tv(E)), tv(d.z))));
  Formula single = Formula::forall(a, Formula::iff(ap(tv(X), {tv(a)}), eq(tv(a), tv(d.x))));
  d.succ_sigma = Formula::exists(X, Formula::conj(single, eq(ext(tv(X)), tv(d.y))));
  d.succ_pi = Formula::forall(X, Formula::implies(single, eq(ext(tv(X)), tv(d.y))));

  const Var F = Var::conc("F", 1), z = Var::obj("z"), u = Var::obj("u"), v = Var::obj("v");
  Formula base = Formula::exists(z, Formula::conj(d.zero(tv(z)), ap(tv(F), {tv(z)})));
  Formula step = Formula::forall(
      u, Formula::implies(ap(tv(F), {tv(u)}),
                          Formula::exists(v, Formula::conj(d.succ(tv(u), tv(v)), ap(tv(F), {tv(v)})))));
  d.n_def = Formula::forall(F, Formula::implies(Formula::conj(base, step), ap(tv(F), {tv(d.x)})));

  // Least relations closed under the recursion clauses, base case at 0.
  const Var b = Var::obj("b"), c = Var::obj("c"), o = Var::obj("o"), p = Var::obj("p"), q = Var::obj("q");
  auto closure = [&](const Var& rel, const Term& base_value, const std::function<Formula(const Term&)>& next) {
    Term r = tv(rel);
    Formula start = Formula::forall_all(
        std::vector<Var>{a, o},
        Formula::implies(Formula::conj(d.nat(tv(a)), d.zero(tv(o))), ap(r, {tv(a), tv(o), base_value})));
    Formula rec = Formula::forall_all(
        std::vector<Var>{a, b, c, p, q},
        Formula::implies(Formula::conj(ap(r, {tv(a), tv(b), tv(c)}), Formula::conj(d.succ(tv(b), tv(p)), next(tv(q)))),
                         ap(r, {tv(a), tv(p), tv(q)})));
    return Formula::forall(rel, Formula::implies(Formula::conj(start, rec), ap(r, {tv(d.x), tv(d.y), tv(d.z)})));
  };
  d.plus_def = closure(Var::conc("P", 3), tv(a), [&](const Term& next) { return d.succ(tv(c), next); });
  d.times_def = closure(Var::conc("T", 3), tv(o), [&](const Term& next) { return d.plus(tv(c), tv(a), next); });
  return d;
}

}  // namespace

Formula InterpretationData::zero(const Term& t) const { return substitute(zero_def, z, t); }
Formula InterpretationData::succ(const Term& a, const Term& b) const {
  return substitute(succ_sigma, Substitution{{x, a}, {y, b}});
}
Formula InterpretationData::nat(const Term& t) const { return substitute(n_def, x, t); }
Formula InterpretationData::plus(const Term& a, const Term& b, const Term& c) const {
  return substitute(plus_def, Substitution{{x, a}, {y, b}, {z, c}});
}
Formula InterpretationData::times(const Term& a, const Term& b, const Term& c) const {
  return substitute(times_def, Substitution{{x, a}, {y, b}, {z, c}});
}
Formula InterpretationData::below_n(const Term& set) const {
  Var a = Var::obj("a");
  if (set.is_var() && set.as_var().name == "a") a = Var::obj("b");
  return Formula::forall(a, Formula::implies(ap(set, {tv(a)}), nat(tv(a))));
}

const InterpretationData& standard_interpretation() {
  static const InterpretationData d = build();
  return d;
}

InterpretationData interpretation_data(const Registry& reg) {
  if (!reg.find_equiv(blv()))
    throw Error(ErrorKind::UnknownSymbol, "Basic Law V is not certified in the registry");
  return standard_interpretation();
}

// --- translation -----------------------------------------------------------------

namespace {

void names_in(const Pa2Formula& f, std::set<std::string>& out) {
  std::vector<std::string> ns;
  for (const auto& t : f.terms) term_vars(t, ns);
  out.insert(ns.begin(), ns.end());
  if (!f.var.empty()) out.insert(f.var);
  for (const auto& s : f.subs) names_in(s, out);
}

class Translator {
 public:
  explicit Translator(const Pa2Formula& f) : d_(standard_interpretation()) { names_in(f, avoid_); }

  Formula run(const Pa2Formula& f) {
    using K = Pa2Formula::Kind;
    switch (f.kind) {
      case K::Eq:
      case K::In: {
        std::vector<std::pair<Var, Formula>> conds;
        std::vector<Term> ts;
        for (const auto& t : f.terms) ts.push_back(flatten(t, conds));
        Formula body = f.kind == K::Eq ? Formula::eq(ts[0], ts[1]) : ap(Term::conc(f.var, 1), {ts[0]});
        for (std::size_t i = conds.size(); i-- > 0;)
          body = Formula::exists(conds[i].first, Formula::conj(conds[i].second, body));
        return body;
      }
      case K::Not: return Formula::neg(run(f.subs[0]));
      case K::And: return Formula::conj(run(f.subs[0]), run(f.subs[1]));
      case K::Or: return Formula::disj(run(f.subs[0]), run(f.subs[1]));
      case K::Implies: return Formula::implies(run(f.subs[0]), run(f.subs[1]));
      case K::Iff: return Formula::iff(run(f.subs[0]), run(f.subs[1]));
      case K::Forall:
      case K::Exists: {
        const bool all = f.kind == K::Forall;
        Var v = f.sort == Pa2Sort::Nat ? Var::obj(f.var) : Var::conc(f.var, 1);
        Formula guard = f.sort == Pa2Sort::Nat ? d_.nat(tv(v)) : d_.below_n(tv(v));
        Formula body = run(f.subs[0]);
        return all ? Formula::forall(v, Formula::implies(guard, body))
                   : Formula::exists(v, Formula::conj(guard, body));
      }
    }
    throw Error(ErrorKind::Unsupported, "unknown formula kind");
  }

 private:
  Term flatten(const Pa2Term& t, std::vector<std::pair<Var, Formula>>& conds) {
    if (t.kind == Pa2Term::Kind::Var) return Term::obj(t.name);
    std::vector<Term> args;
    for (const auto& a : t.args) args.push_back(flatten(a, conds));
    Var w = next();
    Formula c = t.kind == Pa2Term::Kind::Zero   ? d_.zero(tv(w))
                : t.kind == Pa2Term::Kind::Succ ? d_.succ(args[0], tv(w))
                : t.kind == Pa2Term::Kind::Plus ? d_.plus(args[0], args[1], tv(w))
                                                : d_.times(args[0], args[1], tv(w));
    conds.emplace_back(w, c);
    return tv(w);
  }

  Var next() {
    std::string n;
    do n = "w" + std::to_string(++counter_);
    while (avoid_.count(n));
    return Var::obj(n);
  }

  const InterpretationData& d_;
  std::set<std::string> avoid_;
  int counter_ = 0;
};

}  // namespace

Formula translate(const Pa2Formula& f) { return Translator(f).run(f); }

// --- obligation scripts --------------------------------------------------------------

namespace {

using Fact = Deriver::Fact;

// M = {x : x = x}, kept as the first line of every obligation script.
Fact universe(Deriver& d) {
  Var x = Var::obj("x");
  return d.comprehension(eq(tv(x), tv(x)), {x}, Var::conc("M", 1));
}

Fact blv_axiom(Deriver& d) { return registered_abstraction()(d, blv(), {}); }

// Unpacks succ(n, w): the singleton X of n with ∂X = w.
template <typename Body>
Fact with_singleton(Deriver& d, Fact succ, Body body) {
  Var X = d.fresh("X", Sort::conc(1));
  return d.exists_e(succ, X, [&](Fact w) { return body(X, d.and_l(w), d.and_r(w)); });
}

Fact member_of_singleton(Deriver& d, Fact single, const Term& n) {
  return d.iff_mpr(d.forall_e(single, n), d.refl(n));
}

Formula pa2(const char* text) { return translate(parse_pa2(text)); }

const char* kQ1 = "(forall (n Nat) (not (= (s n) 0)))";
const char* kQ2 = "(forall (n Nat) (forall (m Nat) (implies (= (s n) (s m)) (= n m))))";
const char* kInduction =
    "(forall (X Set) (implies (and (in 0 X) (forall (n Nat) (implies (in n X) (in (s n) X)))) "
    "(forall (n Nat) (in n X))))";

Formula succ_graph_statement() {
  const InterpretationData& id = standard_interpretation();
  Var g = Var::conc("Gr", 2), x = Var::obj("x"), y = Var::obj("y");
  return Formula::exists(
      g, Formula::forall_all(std::vector<Var>{x, y}, Formula::iff(ap(tv(g), {tv(x), tv(y)}), id.succ(tv(x), tv(y)))));
}

}  // namespace

Derivation succ_graph_script() {
  Deriver d;
  Fact m = universe(d);
  d.reserve(succ_graph_statement());
  const EquivDef e = blv();
  Var a = Var::obj("a");
  auto def = [&](const Term& rel, const Term& at) {
    return Formula::forall(a, Formula::iff(ap(rel, {tv(a)}), eq(tv(a), at)));
  };
  GraphFact g = prove_graph_exists(d, e, def);
  return d.finish(g.exists, {m});
}

Derivation q1_script() {
  Deriver d;
  Fact m = universe(d);
  const Formula target = pa2(kQ1);
  d.reserve(target);
  Fact A = blv_axiom(d);
  const Formula& body = target.body();  // N n → ¬∃w1 (...)
  const Var n = target.bound();
  Fact all = d.implies_i(body.left(), [&](Fact) {
    const Formula ex = body.right().left();
    return d.not_i(ex, [&](Fact h) {
      Var w1 = d.fresh("w", Sort::object());
      return d.exists_e(h, w1, [&](Fact c1) {
        return with_singleton(d, d.and_l(c1), [&](const Var& X, Fact single, Fact ex_w1) {
          Var w2 = d.fresh("w", Sort::object());
          return d.exists_e(d.and_r(c1), w2, [&](Fact c2) {
            Var E = d.fresh("E", Sort::conc(1));
            return d.exists_e(d.and_l(c2), E, [&](Fact z) {
              Fact same = d.eq_trans(d.eq_trans(ex_w1, d.and_r(c2)), d.eq_sym(d.and_r(z)));
              Fact xe = d.iff_mp(d.forall_e_all(A, {tv(X), tv(E)}), same);
              Fact in_e = d.rewrite(xe, member_of_singleton(d, single, tv(n)), ap(tv(E), {tv(n)}));
              return d.absurd(in_e, d.forall_e(d.and_l(z), tv(n)));
            });
          });
        });
      });
    });
  });
  return d.finish(d.forall_i(all, n), {m});
}

Derivation q2_script() {
  Deriver d;
  Fact m0 = universe(d);
  const Formula target = pa2(kQ2);
  d.reserve(target);
  Fact A = blv_axiom(d);
  const Var n = target.bound();
  const Formula& inner = target.body().right();
  const Var m = inner.bound();
  const Formula& hyp = inner.body().right().left();
  Fact all = d.implies_i(target.body().left(), [&](Fact) {
    Fact rest = d.implies_i(inner.body().left(), [&](Fact) {
      return d.implies_i(hyp, [&](Fact h) {
        Var w1 = d.fresh("w", Sort::object());
        return d.exists_e(h, w1, [&](Fact c1) {
          return with_singleton(d, d.and_l(c1), [&](const Var& X, Fact sx, Fact ex) {
            Var w2 = d.fresh("w", Sort::object());
            return d.exists_e(d.and_r(c1), w2, [&](Fact c2) {
              return with_singleton(d, d.and_l(c2), [&](const Var& Y, Fact sy, Fact ey) {
                Fact same = d.eq_trans(d.eq_trans(ex, d.and_r(c2)), d.eq_sym(ey));
                Fact xy = d.iff_mp(d.forall_e_all(A, {tv(X), tv(Y)}), same);
                Fact in_y = d.rewrite(xy, member_of_singleton(d, sx, tv(n)), ap(tv(Y), {tv(n)}));
                return d.iff_mp(d.forall_e(sy, tv(n)), in_y);
              });
            });
          });
        });
      });
    });
    return d.forall_i(rest, m);
  });
  return d.finish(d.forall_i(all, n), {m0});
}

Derivation induction_script() {
  Deriver d;
  Fact m = universe(d);
  const Formula target = pa2(kInduction);
  d.reserve(target);
  const InterpretationData& id = standard_interpretation();
  const Var X = target.bound();
  const Formula& sub = target.body().left();
  const Formula& rest = target.body().right();  // (base ∧ step) → ∀n (N n → X n)
  Fact all = d.implies_i(sub, [&](Fact below) {
    return d.implies_i(rest.left(), [&](Fact bs) {
      Fact base = d.and_l(bs), step = d.and_r(bs);
      const Var n = rest.right().bound();
      Fact each = d.implies_i(id.nat(tv(n)), [&](Fact nn) {
        Fact inst = d.forall_e(nn, tv(X));
        const Formula closed = d.formula(inst).left().right();  // ∀u (X u → ∃v (...))
        const Var u = closed.bound();
        Fact cl = d.implies_i(ap(tv(X), {tv(u)}), [&](Fact xu) {
          Fact nu = d.mp(xu, d.forall_e(below, tv(u)));
          return d.mp(xu, d.mp(nu, d.forall_e(step, tv(u))));
        });
        return d.mp(d.and_i(base, d.forall_i(cl, u)), inst);
      });
      return d.forall_i(each, n);
    });
  });
  return d.finish(d.forall_i(all, X), {m});
}

std::vector<Obligation> obligations() {
  struct Row {
    const char* name;
    const char* text;
    Derivation (*script)();
    const char* file;
  };
  const Row rows[] = {
      {"q1", kQ1, q1_script, "q1.prf"},
      {"q2", kQ2, q2_script, "q2.prf"},
      {"plus-zero", "(forall (n Nat) (= (+ n 0) n))", nullptr, ""},
      {"plus-succ", "(forall (n Nat) (forall (m Nat) (= (+ n (s m)) (s (+ n m)))))", nullptr, ""},
      {"times-zero", "(forall (n Nat) (= (* n 0) 0))", nullptr, ""},
      {"times-succ", "(forall (n Nat) (forall (m Nat) (= (* n (s m)) (+ (* n m) n))))", nullptr, ""},
      {"induction", kInduction, induction_script, "induction.prf"},
      {"comprehension", "(exists (X Set) (forall (n Nat) (iff (in n X) (exists (m Nat) (= n (s m))))))", nullptr, ""},
  };
  std::vector<Obligation> out;
  out.push_back(Obligation{"succ-graph", std::nullopt, succ_graph_statement(), succ_graph_script(), "succ_graph.prf"});
  for (const Row& s : rows) {
    Pa2Formula f = parse_pa2(s.text);
    Formula t = translate(f);
    std::optional<Derivation> script;
    if (s.script) script = s.script();
    out.push_back(Obligation{s.name, std::move(f), std::move(t), std::move(script), s.file});
  }
  return out;
}

}  // namespace pft
