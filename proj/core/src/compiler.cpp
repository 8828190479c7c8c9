#include "pft/compiler.hpp"

#include <algorithm>
#include <sstream>

#include "pft/error.hpp"
#include "pft/parse.hpp"
#include "pft/schema.hpp"

namespace pft {

using Fact = Deriver::Fact;

namespace {

struct Profile {
  Var x;
  std::vector<Var> params;
};

Profile profile(const Formula& phi, int m) {
  Profile p;
  int objects = 0;
  for (const Var& v : phi.free_vars()) {
    if (v.sort.is_object()) {
      p.x = v;
      ++objects;
    } else if (v.sort.arity() == 1) {
      p.params.push_back(v);
    } else {
      throw Error(ErrorKind::BadFreeVariables, "concept parameter " + v.name + " is not unary");
    }
  }
  if (objects != 1)
    throw Error(ErrorKind::BadFreeVariables, "expected exactly one free object variable, found " + std::to_string(objects));
  if (m >= 0 && static_cast<int>(p.params.size()) != m)
    throw Error(ErrorKind::BadFreeVariables, "expected " + std::to_string(m) + " concept parameters, found " +
                                                 std::to_string(p.params.size()));
  return p;
}

Term tv(const Var& v) { return Term::var(v); }

std::vector<Term> tvs(const std::vector<Var>& vs) {
  std::vector<Term> out;
  for (const Var& v : vs) out.push_back(tv(v));
  return out;
}

// Formulas for one emptiness pattern. Present parameters keep their names;
// the relation is {x} × G_i1 × ... × G_ik.
class Case {
 public:
  Case(const Formula& phi, const Profile& p, const std::vector<bool>& present) : x_(p.x) {
    std::set<std::string> avoid = all_names(phi);
    auto pick = [&](const std::string& base) {
      std::string n = fresh_name(base, avoid);
      avoid.insert(n);
      return n;
    };
    psi_ = phi;
    std::vector<Var> zs;
    for (std::size_t i = 0; i < p.params.size(); ++i) {
      if (present[i]) {
        gs_.push_back(p.params[i]);
      } else {
        Var z{pick("Z"), Sort::conc(1)};
        psi_ = substitute(psi_, p.params[i], tv(z));
        zs.push_back(z);
      }
    }
    a_ = Var::obj(pick("a"));
    for (std::size_t i = 0; i < gs_.size(); ++i) bs_.push_back(Var::obj(pick("b")));
    y_ = Var::obj(pick("y"));
    for (const Var& g : gs_) hs_.push_back(Var{pick("H"), g.sort});
    if (!zs.empty()) {
      std::vector<Formula> empties;
      for (const Var& z : zs) empties.push_back(Formula::forall(a_, Formula::neg(pred(z, std::vector<Term>{tv(a_)}))));
      empties.push_back(psi_);
      psi_ = Formula::exists_all(zs, Formula::conj_all(empties));
    }
    const int k = static_cast<int>(gs_.size());
    left_ = Var{pick(k == 0 ? "X" : "R"), Sort::conc(k + 1)};
    right_ = Var{pick(k == 0 ? "Y" : "S"), Sort::conc(k + 1)};
    pr_ = Var{"%r", left_.sort};
    ps_ = Var{"%s", left_.sort};
    px_ = Var::obj("%x");
    for (std::size_t i = 0; i < gs_.size(); ++i) pg_.push_back(Var{"%g" + std::to_string(i), Sort::conc(1)});
  }

  int k() const { return static_cast<int>(gs_.size()); }
  const Var& x() const { return x_; }
  const std::vector<Var>& gs() const { return gs_; }
  const Var& left() const { return left_; }
  const Var& right() const { return right_; }
  const Var& a() const { return a_; }
  const Var& y() const { return y_; }
  const std::vector<Var>& hs() const { return hs_; }

  // ∀a ∀b̄ (r(a, b̄) ↔ (a = x ∧ G₁b₁ ∧ ...)); for k = 0 the singleton ∀a (r a ↔ a = x).
  Formula prod(const Term& r, const Term& x, const std::vector<Term>& gs) const {
    std::vector<Term> args{tv(a_)};
    std::vector<Formula> parts{Formula::eq(tv(a_), tv(px_))};
    for (std::size_t i = 0; i < bs_.size(); ++i) {
      args.push_back(tv(bs_[i]));
      parts.push_back(pred(pg_[i], std::vector<Term>{tv(bs_[i])}));
    }
    std::vector<Var> bound{a_};
    bound.insert(bound.end(), bs_.begin(), bs_.end());
    Formula f = Formula::forall_all(bound, Formula::iff(Formula::pred(tv(pr_), args), Formula::conj_all(parts)));
    Substitution s{{pr_, r}, {px_, x}};
    for (std::size_t i = 0; i < gs.size(); ++i) s.insert_or_assign(pg_[i], gs[i]);
    return substitute(f, s);
  }

  Formula nonempty(const std::vector<Term>& gs) const {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < gs.size(); ++i)
      parts.push_back(Formula::exists(bs_[0], Formula::pred(tv(pg_[i]), {tv(bs_[0])})));
    Substitution s;
    for (std::size_t i = 0; i < gs.size(); ++i) s.insert_or_assign(pg_[i], gs[i]);
    return substitute(Formula::conj_all(parts), s);
  }

  // r is a product with non-empty factors (k ≥ 1) or a singleton (k = 0).
  Formula ud(const Term& r) const {
    if (k() == 0) return substitute(Formula::exists(x_, prod(tv(pr_), tv(x_), {})), pr_, r);
    std::vector<Var> bound{x_};
    bound.insert(bound.end(), gs_.begin(), gs_.end());
    Formula body = Formula::conj(prod(tv(pr_), tv(x_), tvs(gs_)), nonempty(tvs(gs_)));
    return substitute(Formula::exists_all(bound, body), pr_, r);
  }

  Formula psi(const Term& x, const std::vector<Term>& gs) const {
    Substitution s{{x_, x}};
    for (std::size_t i = 0; i < gs.size(); ++i) s.insert_or_assign(gs_[i], gs[i]);
    return substitute(psi_, s);
  }
  const Formula& psi() const { return psi_; }

  Formula mu(const Term& r, const Term& s) const {
    Formula f = [&] {
      if (k() == 0) {
        Formula m = Formula::conj(prod(tv(pr_), tv(x_), {}),
                                  Formula::conj(prod(tv(ps_), tv(y_), {}),
                                                Formula::iff(psi(tv(x_), {}), psi(tv(y_), {}))));
        return Formula::exists(x_, Formula::exists(y_, m));
      }
      std::vector<Var> bound{x_};
      bound.insert(bound.end(), gs_.begin(), gs_.end());
      bound.push_back(y_);
      bound.insert(bound.end(), hs_.begin(), hs_.end());
      Formula clause = Formula::forall_all(
          bound, Formula::implies(Formula::conj(prod(tv(pr_), tv(x_), tvs(gs_)), prod(tv(ps_), tv(y_), tvs(hs_))),
                                  Formula::iff(psi_, psi(tv(y_), tvs(hs_)))));
      return Formula::conj(ud(tv(pr_)), Formula::conj(ud(tv(ps_)), clause));
    }();
    return substitute(f, Substitution{{pr_, r}, {ps_, s}});
  }

  Formula nu(const Term& r, const Term& s) const {
    return Formula::conj(Formula::neg(ud(r)), Formula::neg(ud(s)));
  }

  Formula e(const Term& r, const Term& s) const { return Formula::disj(mu(r, s), nu(r, s)); }

  EquivDef equiv() const { return EquivDef{e(tv(left_), tv(right_)), left_, right_}; }

 private:
  Var x_;
  std::vector<Var> gs_;
  Formula psi_ = Formula::eq(Term::obj("a"), Term::obj("a"));
  Var a_, y_;
  std::vector<Var> bs_, hs_;
  Var left_, right_;
  Var pr_, ps_, px_;
  std::vector<Var> pg_;
};

Case case_for(const Formula& phi, const std::string& tag) {
  Profile p = profile(phi, static_cast<int>(tag.size()));
  std::vector<bool> present;
  for (char c : tag) present.push_back(c == '1');
  return Case(phi, p, present);
}

// --- proof helpers --------------------------------------------------------------

Term abs_term(const EquivDef& e, const Term& r) {
  return Term::abs(canonical_symbol_id(e), e.arity(), r);
}

// r ā ↔ body(x) twice over the same x gives r = r′.
Fact same_definition(Deriver& d, Fact f1, Fact f2, const Term& r1, const Term& r2) {
  const int n = r1.sort().arity();
  std::vector<Var> t;
  for (int i = 0; i < n; ++i) t.push_back(d.fresh("t", Sort::object()));
  Fact i1 = d.forall_e_all(f1, tvs(t));
  Fact i2 = d.forall_e_all(f2, tvs(t));
  Fact pw = d.forall_i_all(d.iff_trans(i1, d.iff_sym(i2)), t);
  return d.extensionality(pw, r1, r2);
}

// X x from ∀a (X a ↔ a = x).
Fact sing_member(Deriver& d, Fact s, const Term& x) { return d.iff_mpr(d.forall_e(s, x), d.refl(x)); }

// x = u from X = {x} and X = {u}.
Fact sing_unique(Deriver& d, Fact sx, const Term& x, Fact su) {
  return d.iff_mp(d.forall_e(su, x), sing_member(d, sx, x));
}

// From R = {x} × G with G non-empty and R = {y} × H: x = y and G = H.
std::pair<Fact, Fact> prod_unique(Deriver& d, Fact f1, Fact ne, Fact f2, const Term& x, const Term& g,
                                  const Term& y, const Term& h) {
  Var b0 = d.fresh("b", Sort::object());
  Fact xy = d.exists_e(ne, b0, [&](Fact gb0) {
    Fact r = d.iff_mpr(d.forall_e_all(f1, {x, tv(b0)}), d.and_i(d.refl(x), gb0));
    return d.and_l(d.iff_mp(d.forall_e_all(f2, {x, tv(b0)}), r));
  });
  Var c = d.fresh("c", Sort::object());
  Formula gc = Formula::pred(g, {tv(c)}), hc = Formula::pred(h, {tv(c)});
  Fact fwd = d.implies_i(gc, [&](Fact hyp) {
    Fact r = d.iff_mpr(d.forall_e_all(f1, {x, tv(c)}), d.and_i(d.refl(x), hyp));
    return d.and_r(d.iff_mp(d.forall_e_all(f2, {x, tv(c)}), r));
  });
  Fact bwd = d.implies_i(hc, [&](Fact hyp) {
    Fact r = d.iff_mpr(d.forall_e_all(f2, {y, tv(c)}), d.and_i(d.refl(y), hyp));
    return d.and_r(d.iff_mp(d.forall_e_all(f1, {y, tv(c)}), r));
  });
  Fact gh = d.extensionality(d.forall_i(d.iff_i(fwd, bwd), c), g, h);
  return {xy, gh};
}

// ψ(x, G) with x = y and G = H gives ψ(y, H).
Fact transport(Deriver& d, const Case& cs, Fact f, Fact xy, Fact gh, const Term& y, const Term& g, const Term& h) {
  Fact r = d.rewrite(xy, f, cs.psi(y, {g}));
  return d.rewrite(gh, r, cs.psi(y, {h}));
}

Fact prove_equiv_prod(Deriver& d, const Case& cs) {
  const EquivDef e = cs.equiv();
  const Formula target = equiv_sentence(e);
  const Var R = target.bound(), S = target.body().bound(), T = target.body().body().bound();
  const Term r = tv(R), s = tv(S), t = tv(T);
  const Sort gsort = Sort::conc(1);

  auto clause = [&](const Term& p, const Term& q, const std::function<Fact(Fact, const Term&, const Term&,
                                                                           const Term&, const Term&)>& body) {
    Var x1 = d.fresh("x", Sort::object()), g1 = d.fresh("G", gsort);
    Var y1 = d.fresh("y", Sort::object()), h1 = d.fresh("H", gsort);
    Formula hyp = Formula::conj(cs.prod(p, tv(x1), {tv(g1)}), cs.prod(q, tv(y1), {tv(h1)}));
    Fact f = d.implies_i(hyp, [&](Fact hp) { return body(hp, tv(x1), tv(g1), tv(y1), tv(h1)); });
    return d.forall_i_all(f, {x1, g1, y1, h1});
  };

  Fact refl = d.by_cases(
      cs.ud(r),
      [&](Fact u) {
        Fact cl = clause(r, r, [&](Fact hp, const Term& x1, const Term& g1, const Term& y1, const Term& h1) {
          Var x0 = d.fresh("x", Sort::object());
          return d.exists_e(u, x0, [&](Fact u1) {
            Var g0 = d.fresh("G", gsort);
            return d.exists_e(u1, g0, [&](Fact w) {
              Fact p0 = d.and_l(w), ne = d.and_r(w);
              auto [ex1, eg1] = prod_unique(d, p0, ne, d.and_l(hp), tv(x0), tv(g0), x1, g1);
              auto [ey1, eh1] = prod_unique(d, p0, ne, d.and_r(hp), tv(x0), tv(g0), y1, h1);
              Formula self = cs.psi(tv(x0), {tv(g0)});
              Fact i = d.iff_refl(self);
              i = d.rewrite(ey1, i, Formula::iff(self, cs.psi(y1, {tv(g0)})));
              i = d.rewrite(eh1, i, Formula::iff(self, cs.psi(y1, {h1})));
              i = d.rewrite(ex1, i, Formula::iff(cs.psi(x1, {tv(g0)}), cs.psi(y1, {h1})));
              return d.rewrite(eg1, i, Formula::iff(cs.psi(x1, {g1}), cs.psi(y1, {h1})));
            });
          });
        });
        return d.or_il(d.and_all({u, u, cl}), cs.nu(r, r));
      },
      [&](Fact n) { return d.or_ir(cs.mu(r, r), d.and_i(n, n)); });

  Fact sym = d.implies_i(e.apply(r, s), [&](Fact h) {
    return d.cases(
        h,
        [&](Fact m) {
          auto parts = d.and_split(m, 2);
          Fact cl = clause(s, r, [&](Fact hp, const Term& x1, const Term& g1, const Term& y1, const Term& h1) {
            Fact inst = d.forall_e_all(parts[2], {y1, h1, x1, g1});
            return d.iff_sym(d.mp(d.and_i(d.and_r(hp), d.and_l(hp)), inst));
          });
          return d.or_il(d.and_all({parts[1], parts[0], cl}), cs.nu(s, r));
        },
        [&](Fact n) { return d.or_ir(cs.mu(s, r), d.and_i(d.and_r(n), d.and_l(n))); });
  });

  Formula ers = e.apply(r, s), est = e.apply(s, t), ert = e.apply(r, t);
  Fact trans = d.implies_i(Formula::conj(ers, est), [&](Fact h) {
    Fact e1 = d.and_l(h), e2 = d.and_r(h);
    return d.cases(
        e1,
        [&](Fact m1) {
          return d.cases(
              e2,
              [&](Fact m2) {
                auto p1 = d.and_split(m1, 2);
                auto p2 = d.and_split(m2, 2);
                Fact cl = clause(r, t, [&](Fact hp, const Term& x1, const Term& g1, const Term& z1, const Term& i1) {
                  Var y0 = d.fresh("y", Sort::object());
                  return d.exists_e(p1[1], y0, [&](Fact u1) {
                    Var h0 = d.fresh("H", gsort);
                    return d.exists_e(u1, h0, [&](Fact w) {
                      Fact ps = d.and_l(w);
                      Fact a = d.mp(d.and_i(d.and_l(hp), ps), d.forall_e_all(p1[2], {x1, g1, tv(y0), tv(h0)}));
                      Fact b = d.mp(d.and_i(ps, d.and_r(hp)), d.forall_e_all(p2[2], {tv(y0), tv(h0), z1, i1}));
                      return d.iff_trans(a, b);
                    });
                  });
                });
                return d.or_il(d.and_all({p1[0], p2[1], cl}), cs.nu(r, t));
              },
              [&](Fact n2) { return d.contradiction(d.and_l(d.and_r(m1)), d.and_l(n2), ert); });
        },
        [&](Fact n1) {
          return d.cases(
              e2, [&](Fact m2) { return d.contradiction(d.and_l(m2), d.and_r(n1), ert); },
              [&](Fact n2) { return d.or_ir(cs.mu(r, t), d.and_i(d.and_l(n1), d.and_r(n2))); });
        });
  });
  return d.forall_i_all(d.and_i(refl, d.and_i(sym, trans)), {R, S, T});
}

Fact prove_equiv_sing(Deriver& d, const Case& cs) {
  const EquivDef e = cs.equiv();
  const Formula target = equiv_sentence(e);
  const Var R = target.bound(), S = target.body().bound(), T = target.body().body().bound();
  const Term r = tv(R), s = tv(S), t = tv(T);
  const Sort o = Sort::object();

  Fact refl = d.by_cases(
      cs.ud(r),
      [&](Fact u) {
        Var u0 = d.fresh("u", o);
        Fact m = d.exists_e(u, u0, [&](Fact su) {
          Fact inner = d.and_i(su, d.and_i(su, d.iff_refl(cs.psi(tv(u0), {}))));
          return d.exists_i_all(inner, cs.mu(r, r), {tv(u0), tv(u0)});
        });
        return d.or_il(m, cs.nu(r, r));
      },
      [&](Fact n) { return d.or_ir(cs.mu(r, r), d.and_i(n, n)); });

  Fact sym = d.implies_i(e.apply(r, s), [&](Fact h) {
    return d.cases(
        h,
        [&](Fact m) {
          Var u0 = d.fresh("u", o);
          Fact mu = d.exists_e(m, u0, [&](Fact m1) {
            Var v0 = d.fresh("v", o);
            return d.exists_e(m1, v0, [&](Fact w) {
              auto p = d.and_split(w, 2);
              Fact inner = d.and_i(p[1], d.and_i(p[0], d.iff_sym(p[2])));
              return d.exists_i_all(inner, cs.mu(s, r), {tv(v0), tv(u0)});
            });
          });
          return d.or_il(mu, cs.nu(s, r));
        },
        [&](Fact n) { return d.or_ir(cs.mu(s, r), d.and_i(d.and_r(n), d.and_l(n))); });
  });

  Formula ert = e.apply(r, t);
  Fact trans = d.implies_i(Formula::conj(e.apply(r, s), e.apply(s, t)), [&](Fact h) {
    Fact e1 = d.and_l(h), e2 = d.and_r(h);
    // μ′(R,S) gives S a singleton, ν′(S,T) denies it.
    auto s_single = [&](Fact m, bool left) {
      Var u0 = d.fresh("u", o);
      return d.exists_e(m, u0, [&](Fact m1) {
        Var v0 = d.fresh("v", o);
        return d.exists_e(m1, v0, [&](Fact w) {
          auto p = d.and_split(w, 2);
          return left ? d.exists_i(p[1], cs.ud(s), tv(v0)) : d.exists_i(p[0], cs.ud(s), tv(u0));
        });
      });
    };
    return d.cases(
        e1,
        [&](Fact m1) {
          return d.cases(
              e2,
              [&](Fact m2) {
                Var u0 = d.fresh("u", o);
                Fact res = d.exists_e(m1, u0, [&](Fact a1) {
                  Var v0 = d.fresh("v", o);
                  return d.exists_e(a1, v0, [&](Fact w1) {
                    auto p = d.and_split(w1, 2);
                    Var v1 = d.fresh("v", o);
                    return d.exists_e(m2, v1, [&](Fact a2) {
                      Var w0 = d.fresh("w", o);
                      return d.exists_e(a2, w0, [&](Fact w2) {
                        auto q = d.and_split(w2, 2);
                        Fact vv = sing_unique(d, p[1], tv(v0), q[0]);
                        Formula pv = cs.psi(tv(v0), {});
                        Fact mid = d.rewrite(vv, d.iff_refl(pv), Formula::iff(pv, cs.psi(tv(v1), {})));
                        Fact chain = d.iff_trans(d.iff_trans(p[2], mid), q[2]);
                        Fact inner = d.and_i(p[0], d.and_i(q[1], chain));
                        return d.exists_i_all(inner, cs.mu(r, t), {tv(u0), tv(w0)});
                      });
                    });
                  });
                });
                return d.or_il(res, cs.nu(r, t));
              },
              [&](Fact n2) { return d.contradiction(s_single(m1, true), d.and_l(n2), ert); });
        },
        [&](Fact n1) {
          return d.cases(
              e2, [&](Fact m2) { return d.contradiction(s_single(m2, false), d.and_r(n1), ert); },
              [&](Fact n2) { return d.or_ir(cs.mu(r, t), d.and_i(d.and_l(n1), d.and_r(n2))); });
        });
  });
  return d.forall_i_all(d.and_i(refl, d.and_i(sym, trans)), {R, S, T});
}

Fact prove_equiv_case(Deriver& d, const Case& cs) {
  d.reserve(cs.equiv().body);
  if (cs.k() == 0) return prove_equiv_sing(d, cs);
  if (cs.k() == 1) return prove_equiv_prod(d, cs);
  throw Error(ErrorKind::Unsupported, "Equiv scripts cover at most one non-empty parameter");
}

Formula sigma_at(const GraphFact& g, const Term& x, const Term& y) {
  return substitute(g.sigma, Substitution{{g.x, x}, {g.y, y}});
}

// ∃R D(R, x) by first-order comprehension on the definition's right-hand side.
Fact comprehend_definition(Deriver& d, const Formula& def) {
  std::vector<Var> tuple;
  Formula cur = def;
  while (cur.kind() == Formula::Kind::Forall) {
    tuple.push_back(cur.bound());
    cur = cur.body();
  }
  return d.comprehension(cur.right(), tuple, cur.left().rel().as_var());
}

}  // namespace

// --- public ----------------------------------------------------------------------

GraphFact prove_graph_exists(Deriver& d, const EquivDef& e, const DefinitionBuilder& def) {
  auto make = [&](const Term& at) { return comprehend_definition(d, def(tv(e.left), at)); };
  const Sort rs = e.left.sort;
  Var x = d.fresh("x", Sort::object()), y = d.fresh("y", Sort::object());
  Var rv = d.fresh("R", rs);
  Formula sigma = Formula::exists(rv, Formula::conj(def(tv(rv), tv(x)), Formula::eq(abs_term(e, tv(rv)), tv(y))));
  Formula pi = Formula::forall(rv, Formula::implies(def(tv(rv), tv(x)), Formula::eq(abs_term(e, tv(rv)), tv(y))));
  d.reserve(sigma);
  Fact to_pi = d.implies_i(sigma, [&](Fact hs) {
    Var r1 = d.fresh("R", rs);
    return d.exists_e(hs, r1, [&](Fact w) {
      Fact d1 = d.and_l(w), eq1 = d.and_r(w);
      Var r2 = d.fresh("R", rs);
      Fact body = d.implies_i(def(tv(r2), tv(x)), [&](Fact d2) {
        Fact same = same_definition(d, d1, d2, tv(r1), tv(r2));
        Term a1 = abs_term(e, tv(r1)), a2 = abs_term(e, tv(r2));
        Fact c = d.rewrite(same, d.refl(a1), Formula::eq(a1, a2));
        return d.eq_trans(d.eq_sym(c), eq1);
      });
      return d.forall_i(body, r2);
    });
  });
  Fact to_sigma = d.implies_i(pi, [&](Fact hp) {
    Var r1 = d.fresh("R", rs);
    return d.exists_e(make(tv(x)), r1, [&](Fact d1) {
      return d.exists_i(d.and_i(d1, d.mp(d1, d.forall_e(hp, tv(r1)))), sigma, tv(r1));
    });
  });
  Fact equiv = d.forall_i_all(d.iff_i(to_pi, to_sigma), {x, y});
  Var gr = d.fresh("Gr", Sort::conc(2));
  Fact ax = d.delta11(sigma, pi, {x, y}, gr);
  return GraphFact{d.mp(equiv, ax), x, y, sigma, pi};
}


MuNu build_mu_nu(const Formula& phi) {
  Case cs = case_for(phi, "1");
  EquivDef e = cs.equiv();
  return MuNu{cs.mu(tv(e.left), tv(e.right)), cs.nu(tv(e.left), tv(e.right)), e};
}

MuNu build_prime(const Formula& phi) {
  Profile p = profile(phi, -1);
  if (p.params.size() > 1)
    throw Error(ErrorKind::BadFreeVariables, "expected at most one concept parameter");
  Case cs = case_for(phi, std::string(p.params.size(), '0'));
  EquivDef e = cs.equiv();
  return MuNu{cs.mu(tv(e.left), tv(e.right)), cs.nu(tv(e.left), tv(e.right)), e};
}

AbstractionSource registered_abstraction() {
  return [](Deriver& d, const EquivDef& e, const EquivProof&) {
    AbstractionSymbol sym = symbol_for(e);
    return d.axiom(abstraction_principle(e, sym), SchemaId{SchemaId::Kind::Abstraction, 0, 0, sym.id});
  };
}

AbstractionSource minted_abstraction() {
  return [](Deriver& d, const EquivDef& e, const EquivProof& proof) {
    Fact eq = proof(d);
    AbstractionSymbol sym = symbol_for(e);
    Formula ax = Formula::implies(equiv_sentence(e), abstraction_principle(e, sym));
    return d.mp(eq, d.axiom(ax, SchemaId{SchemaId::Kind::EquivAbstraction, 0, 0, sym.id}));
  };
}

Fact prove_case_equiv(Deriver& d, const Formula& phi, int k) {
  Profile p = profile(phi, -1);
  if (p.params.size() > 1) throw Error(ErrorKind::Unsupported, "Equiv scripts cover m <= 1");
  std::string tag(p.params.size(), k == 1 ? '1' : '0');
  if (p.params.empty() && k == 1) throw Error(ErrorKind::BadArity, "no parameter to encode");
  return prove_equiv_case(d, case_for(phi, tag));
}

Fact prove_comprehension(Deriver& d, const Formula& phi, const AbstractionSource& abs) {
  Profile p = profile(phi, -1);
  if (p.params.size() > 1) throw Error(ErrorKind::Unsupported, "comprehension scripts cover m <= 1");
  d.reserve(phi);
  for (const std::string tag : {"", "0", "1"})
    if (tag.size() == p.params.size() || (tag.size() == 1 && p.params.size() == 1)) d.reserve(case_for(phi, tag).equiv().body);
  const Var x = p.x;
  const Term xt = tv(x);
  const bool has_g = !p.params.empty();
  Var fvar = d.fresh("F", Sort::conc(1));
  const Formula target = full_comp_instance(phi, std::vector<Var>{x}, fvar);
  d.reserve(target);
  Var x0 = d.fresh("x", Sort::object());
  const Formula phi0 = substitute(phi, x, tv(x0));
  const Formula some = Formula::exists(x0, phi0);

  // ∃F ∀x (F x ↔ Φ) from ∀x (F1 x ↔ Φ) built pointwise.
  auto conclude = [&](const Var& f1, const std::function<Fact(Fact)>& fwd, const std::function<Fact(Fact)>& bwd) {
    Fact a = d.implies_i(pred(f1, std::vector<Term>{xt}), fwd);
    Fact b = d.implies_i(phi, bwd);
    return d.exists_i(d.forall_i(d.iff_i(a, b), x), target, tv(f1));
  };

  return d.by_cases(
      some,
      [&](Fact hs) {
        return d.exists_e(hs, x0, [&](Fact h0) {
          auto singleton_route = [&](const std::function<Fact(Fact, const Term&)>& to_psi,
                                     const std::function<Fact(Fact, const Term&)>& from_psi) {
            Case cs = case_for(phi, std::string(p.params.size(), '0'));
            EquivDef e = cs.equiv();
            Fact A = abs(d, e, [&](Deriver& dd) { return prove_equiv_case(dd, cs); });
            auto def = [&](const Term& r, const Term& at) { return cs.prod(r, at, {}); };
            auto make = [&](const Term& at) { return comprehend_definition(d, def(tv(e.left), at)); };
            Var s0 = d.fresh("X", e.left.sort);
            return d.exists_e(make(tv(x0)), s0, [&](Fact fs0) {
              GraphFact g = prove_graph_exists(d, e, def);
              Var gr = d.fresh("Gr", Sort::conc(2));
              return d.exists_e(g.exists, gr, [&](Fact fg) {
                Term code = abs_term(e, tv(s0));
                Var f1 = d.fresh("F", Sort::conc(1));
                Fact fcomp = d.comprehension(pred(gr, std::vector<Term>{xt, code}), {x}, f1);
                return d.exists_e(fcomp, f1, [&](Fact ff) {
                  return conclude(
                      f1,
                      [&](Fact hf) {
                        Fact gx = d.iff_mp(d.forall_e(ff, xt), hf);
                        Fact sg = d.iff_mp(d.forall_e_all(fg, {xt, code}), gx);
                        Var x1 = d.fresh("X", e.left.sort);
                        return d.exists_e(sg, x1, [&](Fact w) {
                          Fact sx = d.and_l(w);
                          Fact ex = d.iff_mp(d.forall_e_all(A, {tv(x1), tv(s0)}), d.and_r(w));
                          return d.cases(
                              ex,
                              [&](Fact m) {
                                Var u = d.fresh("u", Sort::object());
                                return d.exists_e(m, u, [&](Fact m1) {
                                  Var v = d.fresh("v", Sort::object());
                                  return d.exists_e(m1, v, [&](Fact w2) {
                                    auto q = d.and_split(w2, 2);
                                    Fact xu = sing_unique(d, sx, xt, q[0]);
                                    Fact x0v = sing_unique(d, fs0, tv(x0), q[1]);
                                    Fact pv = d.rewrite(x0v, to_psi(h0, tv(x0)), cs.psi(tv(v), {}));
                                    Fact pu = d.iff_mpr(q[2], pv);
                                    Fact px = d.rewrite(d.eq_sym(xu), pu, cs.psi(xt, {}));
                                    return from_psi(px, xt);
                                  });
                                });
                              },
                              [&](Fact n) { return d.contradiction(d.exists_i(sx, cs.ud(tv(x1)), xt), d.and_l(n), phi); });
                        });
                      },
                      [&](Fact hp) {
                        Var x1 = d.fresh("X", e.left.sort);
                        return d.exists_e(make(xt), x1, [&](Fact sx) {
                          Formula px = cs.psi(xt, {}), p0 = cs.psi(tv(x0), {});
                          Fact both = d.iff_i(d.implies_i(px, [&](Fact) { return to_psi(h0, tv(x0)); }),
                                              d.implies_i(p0, [&](Fact) { return to_psi(hp, xt); }));
                          Fact mu = d.exists_i_all(d.and_i(sx, d.and_i(fs0, both)), cs.mu(tv(x1), tv(s0)), {xt, tv(x0)});
                          Fact eq = d.iff_mpr(d.forall_e_all(A, {tv(x1), tv(s0)}), d.or_il(mu, cs.nu(tv(x1), tv(s0))));
                          Fact sg = d.exists_i(d.and_i(sx, eq), sigma_at(g, xt, code), tv(x1));
                          Fact gx = d.iff_mpr(d.forall_e_all(fg, {xt, code}), sg);
                          return d.iff_mpr(d.forall_e(ff, xt), gx);
                        });
                      });
                });
              });
            });
          };

          if (!has_g) {
            auto id = [](Fact f, const Term&) { return f; };
            return singleton_route(id, id);
          }
          const Var G = p.params[0];
          Var b = d.fresh("b", Sort::object());
          Formula ne = Formula::exists(b, pred(G, std::vector<Term>{tv(b)}));
          return d.by_cases(
              ne,
              [&](Fact hne) {
                Case cs = case_for(phi, "1");
                EquivDef e = cs.equiv();
                Fact A = abs(d, e, [&](Deriver& dd) { return prove_equiv_case(dd, cs); });
                const Term gt = tv(G);
                auto def = [&](const Term& r, const Term& at) { return cs.prod(r, at, {gt}); };
                auto make = [&](const Term& at) { return comprehend_definition(d, def(tv(e.left), at)); };
                Var p0 = d.fresh("P", e.left.sort);
                return d.exists_e(make(tv(x0)), p0, [&](Fact fp0) {
                  GraphFact g = prove_graph_exists(d, e, def);
                  Var gr = d.fresh("Gr", Sort::conc(2));
                  return d.exists_e(g.exists, gr, [&](Fact fg) {
                    Term code = abs_term(e, tv(p0));
                    Var f1 = d.fresh("F", Sort::conc(1));
                    Fact fcomp = d.comprehension(pred(gr, std::vector<Term>{xt, code}), {x}, f1);
                    return d.exists_e(fcomp, f1, [&](Fact ff) {
                      return conclude(
                          f1,
                          [&](Fact hf) {
                            Fact gx = d.iff_mp(d.forall_e(ff, xt), hf);
                            Fact sg = d.iff_mp(d.forall_e_all(fg, {xt, code}), gx);
                            Var r1 = d.fresh("R", e.left.sort);
                            return d.exists_e(sg, r1, [&](Fact w) {
                              Fact pr = d.and_l(w);
                              Fact ex = d.iff_mp(d.forall_e_all(A, {tv(r1), tv(p0)}), d.and_r(w));
                              return d.cases(
                                  ex,
                                  [&](Fact m) {
                                    Fact cl = d.and_split(m, 2)[2];
                                    Fact i = d.mp(d.and_i(pr, fp0), d.forall_e_all(cl, {xt, gt, tv(x0), gt}));
                                    return d.iff_mpr(i, h0);
                                  },
                                  [&](Fact n) {
                                    Fact u = d.exists_i_all(d.and_i(pr, hne), cs.ud(tv(r1)), {xt, gt});
                                    return d.contradiction(u, d.and_l(n), phi);
                                  });
                            });
                          },
                          [&](Fact hp) {
                            Var r1 = d.fresh("R", e.left.sort);
                            return d.exists_e(make(xt), r1, [&](Fact pr) {
                              Fact u1 = d.exists_i_all(d.and_i(pr, hne), cs.ud(tv(r1)), {xt, gt});
                              Fact u2 = d.exists_i_all(d.and_i(fp0, hne), cs.ud(tv(p0)), {tv(x0), gt});
                              Var x2 = d.fresh("x", Sort::object()), g2 = d.fresh("G", Sort::conc(1));
                              Var y2 = d.fresh("y", Sort::object()), h2 = d.fresh("H", Sort::conc(1));
                              Formula hyp = Formula::conj(cs.prod(tv(r1), tv(x2), {tv(g2)}),
                                                          cs.prod(tv(p0), tv(y2), {tv(h2)}));
                              Fact cl = d.implies_i(hyp, [&](Fact hh) {
                                auto [e1, e2] = prod_unique(d, pr, hne, d.and_l(hh), xt, gt, tv(x2), tv(g2));
                                auto [e3, e4] = prod_unique(d, fp0, hne, d.and_r(hh), tv(x0), gt, tv(y2), tv(h2));
                                Fact a = transport(d, cs, hp, e1, e2, tv(x2), gt, tv(g2));
                                Fact b2 = transport(d, cs, h0, e3, e4, tv(y2), gt, tv(h2));
                                Formula fa = d.formula(a), fb = d.formula(b2);
                                return d.iff_i(d.implies_i(fa, [&](Fact) { return b2; }),
                                               d.implies_i(fb, [&](Fact) { return a; }));
                              });
                              Fact clause = d.forall_i_all(cl, {x2, g2, y2, h2});
                              Fact mu = d.and_all({u1, u2, clause});
                              Fact eq = d.iff_mpr(d.forall_e_all(A, {tv(r1), tv(p0)}),
                                                  d.or_il(mu, cs.nu(tv(r1), tv(p0))));
                              Fact sg = d.exists_i(d.and_i(pr, eq), sigma_at(g, xt, code), tv(r1));
                              Fact gx = d.iff_mpr(d.forall_e_all(fg, {xt, code}), sg);
                              return d.iff_mpr(d.forall_e(ff, xt), gx);
                            });
                          });
                    });
                  });
                });
              },
              [&](Fact hne) {
                // G is empty: compare through Φ(x, ∅).
                Case cs = case_for(phi, "0");
                Var a = d.fresh("a", Sort::object());
                Fact empty = d.forall_i(
                    d.not_i(pred(G, std::vector<Term>{tv(a)}),
                            [&](Fact ga) { return d.absurd(d.exists_i(ga, ne, tv(a)), hne); }),
                    a);
                auto to_psi = [&](Fact f, const Term& at) {
                  Fact body = d.and_i(empty, f);
                  return d.exists_i(body, cs.psi(at, {}), tv(G));
                };
                auto from_psi = [&](Fact f, const Term& at) {
                  Var z = d.fresh("Z", Sort::conc(1));
                  return d.exists_e(f, z, [&](Fact w) {
                    Fact ez = d.and_l(w), pz = d.and_r(w);
                    Var c = d.fresh("c", Sort::object());
                    Formula zc = pred(z, std::vector<Term>{tv(c)}), gc = pred(G, std::vector<Term>{tv(c)});
                    Fact fwd = d.implies_i(zc, [&](Fact h) { return d.contradiction(h, d.forall_e(ez, tv(c)), gc); });
                    Fact bwd = d.implies_i(gc, [&](Fact h) { return d.contradiction(h, d.forall_e(empty, tv(c)), zc); });
                    Fact zg = d.extensionality(d.forall_i(d.iff_i(fwd, bwd), c), tv(z), tv(G));
                    return d.rewrite(zg, pz, substitute(phi, x, at));
                  });
                };
                return singleton_route(to_psi, from_psi);
              });
        });
      },
      [&](Fact hn) {
        Var f1 = d.fresh("F", Sort::conc(1));
        Fact comp = d.comprehension(Formula::neg(Formula::eq(xt, xt)), {x}, f1);
        return d.exists_e(comp, f1, [&](Fact ff) {
          return conclude(
              f1,
              [&](Fact hf) { return d.contradiction(d.refl(xt), d.iff_mp(d.forall_e(ff, xt), hf), phi); },
              [&](Fact hp) {
                return d.contradiction(d.exists_i(hp, some, xt), hn, pred(f1, std::vector<Term>{xt}));
              });
        });
      });
}

CompilationResult compile(const Formula& phi, int m) {
  if (m < 0 || m > 2) throw Error(ErrorKind::Unsupported, "at most two concept parameters are supported");
  Profile p = profile(phi, m);
  CompilationResult out{full_comp_instance(phi, std::vector<Var>{p.x}, Var{fresh_name("F", all_names(phi)), Sort::conc(1)}),
                        {}, std::nullopt, false, ""};
  out.scripts_omitted = m > 1;
  const int cases = 1 << m;
  for (int b = 0; b < cases; ++b) {
    std::string tag;
    for (int i = 0; i < m; ++i) tag += ((b >> (m - 1 - i)) & 1) ? '1' : '0';
    Case cs = case_for(phi, tag);
    CaseEquivalence ce{tag, cs.equiv(), std::nullopt};
    if (m <= 1) {
      Deriver d;
      d.reserve(phi);
      ce.equiv_script = d.finish(prove_equiv_case(d, cs));
    }
    out.equivalences.push_back(std::move(ce));
  }
  if (m <= 1) {
    Deriver d;
    out.main_script = d.finish(prove_comprehension(d, phi, registered_abstraction()));
  }

  std::ostringstream man;
  man << "(manifest\n  (phi " << print_formula(phi) << ")\n  (concept-params " << m << ")\n  (target "
      << print_formula(out.target) << ")\n";
  for (const auto& ce : out.equivalences) {
    man << "  (equivalence (tag \"" << ce.tag << "\") (id " << canonical_symbol_id(ce.equiv) << ") (file \""
        << ce.stem() << ".sof\")";
    if (ce.equiv_script) man << " (script \"equiv_" << ce.stem() << ".prf\")";
    man << ")\n";
  }
  if (out.main_script) man << "  (main \"main.prf\" (theory pft) (registry \"registry.reg\"))\n";
  if (out.scripts_omitted) man << "  (scripts-omitted)\n  (note \"templates for two parameters extrapolate the one-parameter case\")\n";
  man << ")\n";
  out.manifest = man.str();
  return out;
}

Registry certify_all(const CompilationResult& r, const Registry& reg) {
  Registry cur = reg;
  for (const auto& ce : r.equivalences) {
    if (!ce.equiv_script) throw Error(ErrorKind::CertificateRejected, "no Equiv script for case " + ce.tag);
    cur = certify_equivalence(ce.equiv, *ce.equiv_script, cur);
  }
  return cur;
}

}  // namespace pft
