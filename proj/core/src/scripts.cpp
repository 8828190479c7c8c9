#include "pft/scripts.hpp"

#include "pft/compiler.hpp"
#include "pft/parse.hpp"
#include "pft/schema.hpp"

namespace pft {

using Fact = Deriver::Fact;

namespace {

Fact prove_equiv_blv(Deriver& d) {
  const EquivDef e = corpus_equiv("blv_equiv");
  const Formula target = equiv_sentence(e);
  d.reserve(target);
  const Var R = target.bound(), S = target.body().bound(), T = target.body().body().bound();
  const Term r = Term::var(R), s = Term::var(S), t = Term::var(T);
  Fact refl = d.refl(r);
  Fact sym = d.implies_i(e.apply(r, s), [&](Fact h) { return d.eq_sym(h); });
  Fact trans = d.implies_i(Formula::conj(e.apply(r, s), e.apply(s, t)),
                           [&](Fact h) { return d.eq_trans(d.and_l(h), d.and_r(h)); });
  return d.forall_i_all(d.and_i(refl, d.and_i(sym, trans)), {R, S, T});
}

}  // namespace

Derivation equiv_blv_script() {
  Deriver d;
  return d.finish(prove_equiv_blv(d));
}

Fact mint_blv(Deriver& d) {
  const EquivDef e = corpus_equiv("blv_equiv");
  return minted_abstraction()(d, e, prove_equiv_blv);
}

Derivation russell_script() {
  Deriver d;
  Fact blv = mint_blv(d);
  const EquivDef e = corpus_equiv("blv_equiv");
  const std::string id = canonical_symbol_id(e);
  auto ext = [&](const Term& c) { return Term::abs(id, 1, c); };

  Var x = Var::obj("x"), X = Var::conc("X", 1);
  // x is the extension of some concept it does not fall under.
  const Formula phi = Formula::exists(
      X, Formula::conj(Formula::eq(ext(Term::var(X)), Term::var(x)),
                       Formula::neg(Formula::pred(Term::var(X), {Term::var(x)}))));
  Fact comp = prove_comprehension(d, phi, minted_abstraction());

  Var F = d.fresh("F", Sort::conc(1));
  Fact bottom = d.exists_e(comp, F, [&](Fact ff) {
    const Term r = ext(Term::var(F));
    const Formula fr = Formula::pred(Term::var(F), {r});
    const Formula phi_r = substitute(phi, x, r);
    return d.by_cases(
        fr,
        [&](Fact in) {
          Fact w = d.iff_mp(d.forall_e(ff, r), in);
          Var Y = d.fresh("Y", Sort::conc(1));
          return d.exists_e(w, Y, [&](Fact yw) {
            Fact same = d.iff_mp(d.forall_e_all(blv, {Term::var(Y), Term::var(F)}), d.and_l(yw));
            Fact out = d.rewrite(same, d.and_r(yw), Formula::neg(fr));
            return d.absurd(in, out);
          });
        },
        [&](Fact out) {
          Fact w = d.exists_i(d.and_i(d.refl(r), out), phi_r, Term::var(F));
          return d.absurd(d.iff_mpr(d.forall_e(ff, r), w), out);
        });
  });
  return d.finish(bottom);
}

}  // namespace pft
