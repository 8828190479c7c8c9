#include "pft/prover.hpp"

#include <algorithm>
#include <utility>

namespace pft {

namespace {

Formula imp(const Formula& a, const Formula& b) { return Formula::implies(a, b); }
Formula neg(const Formula& a) { return Formula::neg(a); }

const Formula& truth_part() {
  static const Formula t = falsum().left();
  return t;
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw ProofError(what);
}

}  // namespace

// Deduction-theorem compiler for small depth-0 lemmas.
class HypProof {
 public:
  HypProof(Deriver& d, std::vector<Formula> hyps) : d_(d), hyps_(std::move(hyps)) {}

  int hyp(int i) { return push({Kind::Hyp, hyps_.at(i), i, -1, Rule::P1}); }
  int thm(int line) { return push({Kind::Line, d_.lines_.at(line).formula, line, -1, Rule::P1}); }
  int ax(Rule r, const Formula& f) { return push({Kind::Ax, f, -1, -1, r}); }
  int mp(int a, int ab) {
    const Formula& g = steps_.at(ab).f;
    expect(g.kind() == Formula::Kind::Implies && alpha_eq(g.left(), steps_.at(a).f),
           "lemma: modus ponens mismatch");
    return push({Kind::MP, g.right(), a, ab, Rule::MP});
  }
  // x → y, y → z ⊢ x → z
  int chain(int xy, int yz) {
    const Formula& x = steps_.at(xy).f.left();
    const Formula& y = steps_.at(xy).f.right();
    const Formula& z = steps_.at(yz).f.right();
    int a = mp(yz, ax(Rule::P1, imp(imp(y, z), imp(x, imp(y, z)))));
    int b = mp(a, ax(Rule::P2, imp(imp(x, imp(y, z)), imp(imp(x, y), imp(x, z)))));
    return mp(xy, b);
  }
  const Formula& f(int s) const { return steps_.at(s).f; }

  // Line of hyps[0] → (hyps[1] → ... → goal).
  int finish(int goal) {
    for (int k = static_cast<int>(hyps_.size()) - 1; k >= 0; --k) goal = discharge(k, goal);
    std::vector<int> line(steps_.size(), -1);
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const Step& s = steps_[i];
      switch (s.k) {
        case Kind::Line: line[i] = s.a; break;
        case Kind::Ax: line[i] = d_.emit(s.f, Justification::logical(s.r)); break;
        case Kind::MP: line[i] = d_.emit(s.f, Justification::mp(line[s.a] + 1, line[s.b] + 1)); break;
        case Kind::Hyp: throw ProofError("lemma: undischarged hypothesis");
      }
    }
    return line[goal];
  }

 private:
  enum class Kind { Hyp, Line, Ax, MP };
  struct Step {
    Kind k;
    Formula f;
    int a;
    int b;
    Rule r;
  };

  int push(Step s) {
    steps_.push_back(std::move(s));
    return static_cast<int>(steps_.size()) - 1;
  }

  int discharge(int k, int goal) {
    std::vector<Step> old;
    old.swap(steps_);
    const Formula h = hyps_[k];
    std::vector<int> plain(old.size(), -1), implied(old.size(), -1);
    std::vector<bool> dep(old.size(), false);
    for (std::size_t i = 0; i < old.size(); ++i) {
      const Step& s = old[i];
      if (s.k == Kind::Hyp && s.a == k) {
        dep[i] = true;
        implied[i] = push({Kind::Line, imp(h, h), d_.facts_.at(d_.identity(h)).line, -1, Rule::P1});
      } else if (s.k == Kind::MP && (dep[s.a] || dep[s.b])) {
        dep[i] = true;
      } else if (s.k == Kind::MP) {
        plain[i] = push({Kind::MP, s.f, plain[s.a], plain[s.b], Rule::MP});
      } else {
        plain[i] = push(s);
      }
    }
    std::function<int(int)> get = [&](int i) -> int {
      if (implied[i] >= 0) return implied[i];
      const Step& s = old[i];
      const Formula& sf = s.f;
      if (!dep[i]) {
        implied[i] = mp(plain[i], ax(Rule::P1, imp(sf, imp(h, sf))));
      } else {
        int ha = get(s.a);
        int hab = get(s.b);
        const Formula& a = old[s.a].f;
        int p2 = ax(Rule::P2, imp(imp(h, imp(a, sf)), imp(imp(h, a), imp(h, sf))));
        implied[i] = mp(ha, mp(hab, p2));
      }
      return implied[i];
    };
    return get(goal);
  }

  Deriver& d_;
  std::vector<Formula> hyps_;
  std::vector<Step> steps_;
};

Deriver::Deriver() = default;

const Formula& Deriver::formula(Fact f) const { return facts_.at(f).f; }

int Deriver::emit(const Formula& f, Justification j) {
  std::string key = canonical_key(f);
  auto it = by_key_.find(key);
  if (it != by_key_.end()) return it->second;
  int idx = static_cast<int>(lines_.size());
  lines_.push_back(Line{idx + 1, f, std::move(j)});
  by_key_.emplace(std::move(key), idx);
  collect_names(f, names_);
  return idx;
}

Deriver::Fact Deriver::make(int line, const Formula& f) {
  int d = depth();
  facts_.push_back({d, d == 0 ? 0 : frames_.back().id, f, line});
  return static_cast<Fact>(facts_.size()) - 1;
}

Deriver::Fact Deriver::at_depth0(int line, const Formula& f) {
  facts_.push_back({0, 0, f, line});
  return static_cast<Fact>(facts_.size()) - 1;
}

const Formula* Deriver::context() const { return frames_.empty() ? nullptr : &frames_.back().context; }

void Deriver::check_usable(Fact x) const {
  const FactRec& r = facts_.at(x);
  expect(r.depth <= depth(), "fact used outside its context");
  expect(r.depth == 0 || frames_[r.depth - 1].id == r.frame, "fact used outside its context");
}

int Deriver::chain0(int xy, int yz, const Formula& x, const Formula& y, const Formula& z) {
  int a = emit(imp(imp(y, z), imp(x, imp(y, z))), Justification::logical(Rule::P1));
  int b = emit(imp(x, imp(y, z)), Justification::mp(yz + 1, a + 1));
  int c = emit(imp(imp(x, imp(y, z)), imp(imp(x, y), imp(x, z))), Justification::logical(Rule::P2));
  int e = emit(imp(imp(x, y), imp(x, z)), Justification::mp(b + 1, c + 1));
  return emit(imp(x, z), Justification::mp(xy + 1, e + 1));
}

// Line proving C_depth → C_from.
int Deriver::weaken_line(int, const Formula&, int from) {
  const int d = depth();
  auto key = std::make_pair(frames_.back().id, from);
  if (auto it = weaken_cache_.find(key); it != weaken_cache_.end()) return it->second;
  const Formula& cd = frames_[d - 1].context;
  const Formula& prev = frames_[d - 2].context;
  int step = emit(imp(cd, prev), Justification::logical(Rule::AndL));
  int out = step;
  if (from < d - 1) {
    // C_{d-1} → C_from is the same construction one frame down.
    std::vector<Frame> saved(frames_.begin() + (d - 1), frames_.end());
    frames_.pop_back();
    int rest = weaken_line(0, cd, from);
    frames_.insert(frames_.end(), saved.begin(), saved.end());
    out = chain0(step, rest, cd, prev, frames_[from - 1].context);
  }
  weaken_cache_[key] = out;
  return out;
}

Deriver::Fact Deriver::lift(Fact x) {
  check_usable(x);
  const FactRec r = facts_[x];
  const int d = depth();
  if (r.depth == d) return x;
  const Formula& c = frames_.back().context;
  if (r.depth == 0) {
    int a = emit(imp(r.f, imp(c, r.f)), Justification::logical(Rule::P1));
    return make(emit(imp(c, r.f), Justification::mp(r.line + 1, a + 1)), r.f);
  }
  int w = weaken_line(0, r.f, r.depth);
  return make(chain0(w, r.line, c, frames_[r.depth - 1].context, r.f), r.f);
}

Deriver::Fact Deriver::ctx_mp(Fact a, Fact ab) {
  const FactRec ra = facts_[a];
  const FactRec rab = facts_[ab];
  expect(rab.f.kind() == Formula::Kind::Implies, "modus ponens needs an implication");
  expect(alpha_eq(rab.f.left(), ra.f), "modus ponens antecedent mismatch");
  const Formula& b = rab.f.right();
  if (depth() == 0) return make(emit(b, Justification::mp(ra.line + 1, rab.line + 1)), b);
  const Formula& c = frames_.back().context;
  const Formula& av = rab.f.left();
  int p2 = emit(imp(imp(c, imp(av, b)), imp(imp(c, av), imp(c, b))), Justification::logical(Rule::P2));
  int s = emit(imp(imp(c, av), imp(c, b)), Justification::mp(rab.line + 1, p2 + 1));
  return make(emit(imp(c, b), Justification::mp(ra.line + 1, s + 1)), b);
}

Deriver::Fact Deriver::apply(int lemma_line, const Formula& lemma, const std::vector<Fact>& premises) {
  Fact cur = lift(at_depth0(lemma_line, lemma));
  for (Fact p : premises) cur = ctx_mp(lift(p), cur);
  return cur;
}

Deriver::Fact Deriver::axiom(const Formula& f, const SchemaId& id) {
  return at_depth0(emit(f, Justification::axiom(id)), f);
}

Deriver::Fact Deriver::logical(Rule r, const Formula& f) {
  return at_depth0(emit(f, Justification::logical(r)), f);
}

Deriver::Fact Deriver::refl(const Term& t) { return logical(Rule::Refl, Formula::eq(t, t)); }

Deriver::Fact Deriver::identity(const Formula& a) {
  Formula aa = imp(a, a);
  int l1 = emit(imp(a, imp(aa, a)), Justification::logical(Rule::P1));
  int l2 = emit(imp(imp(a, imp(aa, a)), imp(imp(a, aa), aa)), Justification::logical(Rule::P2));
  int l3 = emit(imp(imp(a, aa), aa), Justification::mp(l1 + 1, l2 + 1));
  int l4 = emit(imp(a, aa), Justification::logical(Rule::P1));
  return at_depth0(emit(aa, Justification::mp(l4 + 1, l3 + 1)), aa);
}

Deriver::Fact Deriver::assume(const Formula& h) {
  reserve(h);
  Frame fr{next_frame_++, h, h, {}};
  for (const Var& v : h.free_vars()) fr.free.insert(v);
  int line;
  if (frames_.empty()) {
    frames_.push_back(fr);
    line = facts_[identity(h)].line;
  } else {
    fr.context = Formula::conj(frames_.back().context, h);
    fr.free.insert(frames_.back().free.begin(), frames_.back().free.end());
    frames_.push_back(fr);
    line = emit(imp(fr.context, h), Justification::logical(Rule::AndR));
  }
  return make(line, h);
}

Deriver::Fact Deriver::discharge(Fact b) {
  expect(!frames_.empty(), "discharge without a hypothesis");
  b = lift(b);
  const FactRec r = facts_[b];
  const Frame fr = frames_.back();
  Formula result = imp(fr.hyp, r.f);
  if (frames_.size() == 1) {
    frames_.pop_back();
    return at_depth0(r.line, result);
  }
  const Formula& outer = frames_[frames_.size() - 2].context;
  int ex = lemma_exportation(outer, fr.hyp, r.f);
  int line = emit(imp(outer, result), Justification::mp(r.line + 1, ex + 1));
  frames_.pop_back();
  return make(line, result);
}

Deriver::Fact Deriver::implies_i(const Formula& h, const std::function<Fact(Fact)>& body) {
  const std::size_t d = frames_.size();
  Fact hf = assume(h);
  Fact res = body(hf);
  expect(frames_.size() == d + 1, "unbalanced hypotheses");
  return discharge(res);
}

int Deriver::lemma_exportation(const Formula& x, const Formula& y, const Formula& z) {
  HypProof p(*this, {imp(Formula::conj(x, y), z), x, y});
  int ai = p.ax(Rule::AndI, imp(x, imp(y, Formula::conj(x, y))));
  int xy = p.mp(p.hyp(2), p.mp(p.hyp(1), ai));
  return p.finish(p.mp(xy, p.hyp(0)));
}

int Deriver::lemma_exfalso(const Formula& a, const Formula& b) {
  HypProof p(*this, {neg(a), a});
  int s1 = p.mp(p.hyp(0), p.ax(Rule::P1, imp(neg(a), imp(neg(b), neg(a)))));
  int s2 = p.mp(p.hyp(1), p.ax(Rule::P1, imp(a, imp(neg(b), a))));
  int p3 = p.ax(Rule::P3, imp(imp(neg(b), neg(a)), imp(imp(neg(b), a), b)));
  return p.finish(p.mp(s2, p.mp(s1, p3)));
}

int Deriver::lemma_dne(const Formula& a) {
  HypProof p(*this, {neg(neg(a))});
  Formula na = neg(a), nna = neg(na);
  int s1 = p.mp(p.hyp(0), p.ax(Rule::P1, imp(nna, imp(na, nna))));
  int id = p.thm(facts_[identity(na)].line);
  int p3 = p.ax(Rule::P3, imp(imp(na, nna), imp(imp(na, na), a)));
  return p.finish(p.mp(id, p.mp(s1, p3)));
}

int Deriver::lemma_neg_intro(const Formula& a, const Formula& b) {
  const int dn = lemma_dne(a);
  HypProof p(*this, {imp(a, b), imp(a, neg(b))});
  Formula nna = neg(neg(a));
  int d = p.thm(dn);
  int x1 = p.chain(d, p.hyp(0));
  int x2 = p.chain(d, p.hyp(1));
  int p3 = p.ax(Rule::P3, imp(imp(nna, neg(b)), imp(imp(nna, b), neg(a))));
  return p.finish(p.mp(x1, p.mp(x2, p3)));
}

int Deriver::lemma_em(const Formula& a) {
  Formula x = Formula::disj(a, neg(a));
  const int ni_line = lemma_neg_intro(a, x);
  HypProof p(*this, {neg(x)});
  int orl = p.ax(Rule::OrL, imp(a, x));
  int w = p.mp(p.hyp(0), p.ax(Rule::P1, imp(neg(x), imp(a, neg(x)))));
  int ni = p.thm(ni_line);
  int na = p.mp(w, p.mp(orl, ni));
  int got = p.mp(na, p.ax(Rule::OrR, imp(neg(a), x)));
  int nxx = p.finish(got);
  int id = facts_[identity(neg(x))].line;
  int p3 = emit(imp(imp(neg(x), neg(x)), imp(imp(neg(x), x), x)), Justification::logical(Rule::P3));
  int s = emit(imp(imp(neg(x), x), x), Justification::mp(id + 1, p3 + 1));
  return emit(x, Justification::mp(nxx + 1, s + 1));
}

Deriver::Fact Deriver::mp(Fact a, Fact ab) {
  Fact la = lift(a);
  Fact lab = lift(ab);
  return ctx_mp(la, lab);
}

Deriver::Fact Deriver::and_i(Fact a, Fact b) {
  const Formula fa = formula(a), fb = formula(b);
  return apply(emit(imp(fa, imp(fb, Formula::conj(fa, fb))), Justification::logical(Rule::AndI)),
               imp(fa, imp(fb, Formula::conj(fa, fb))), {a, b});
}

Deriver::Fact Deriver::and_l(Fact ab) {
  const Formula f = formula(ab);
  expect(f.kind() == Formula::Kind::And, "and-l needs a conjunction");
  Formula ax = imp(f, f.left());
  return apply(emit(ax, Justification::logical(Rule::AndL)), ax, {ab});
}

Deriver::Fact Deriver::and_r(Fact ab) {
  const Formula f = formula(ab);
  expect(f.kind() == Formula::Kind::And, "and-r needs a conjunction");
  Formula ax = imp(f, f.right());
  return apply(emit(ax, Justification::logical(Rule::AndR)), ax, {ab});
}

std::vector<Deriver::Fact> Deriver::and_split(Fact f, int n) {
  std::vector<Fact> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(and_l(f));
    f = and_r(f);
  }
  out.push_back(f);
  return out;
}

Deriver::Fact Deriver::and_all(const std::vector<Fact>& fs) {
  expect(!fs.empty(), "empty conjunction");
  Fact cur = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) cur = and_i(fs[i], cur);
  return cur;
}

Deriver::Fact Deriver::or_il(Fact a, const Formula& b) {
  Formula ax = imp(formula(a), Formula::disj(formula(a), b));
  return apply(emit(ax, Justification::logical(Rule::OrL)), ax, {a});
}

Deriver::Fact Deriver::or_ir(const Formula& a, Fact b) {
  Formula ax = imp(formula(b), Formula::disj(a, formula(b)));
  return apply(emit(ax, Justification::logical(Rule::OrR)), ax, {b});
}

Deriver::Fact Deriver::or_e(Fact a_or_b, Fact a_to_c, Fact b_to_c) {
  const Formula d = formula(a_or_b);
  expect(d.kind() == Formula::Kind::Or, "or-e needs a disjunction");
  const Formula c = formula(a_to_c).right();
  Formula ax = imp(imp(d.left(), c), imp(imp(d.right(), c), imp(d, c)));
  return apply(emit(ax, Justification::logical(Rule::OrE)), ax, {a_to_c, b_to_c, a_or_b});
}

Deriver::Fact Deriver::cases(Fact a_or_b, const std::function<Fact(Fact)>& left,
                             const std::function<Fact(Fact)>& right) {
  const Formula d = formula(a_or_b);
  expect(d.kind() == Formula::Kind::Or, "cases needs a disjunction");
  Fact l = implies_i(d.left(), left);
  Fact r = implies_i(d.right(), right);
  return or_e(a_or_b, l, r);
}

Deriver::Fact Deriver::iff_i(Fact ab, Fact ba) {
  const Formula a = formula(ab).left(), b = formula(ab).right();
  Formula ax = imp(imp(a, b), imp(imp(b, a), Formula::iff(a, b)));
  return apply(emit(ax, Justification::logical(Rule::IffI)), ax, {ab, ba});
}

Deriver::Fact Deriver::iff_mp(Fact iff, Fact a) {
  const Formula f = formula(iff);
  expect(f.kind() == Formula::Kind::Iff, "iff expected");
  Formula ax = imp(f, imp(f.left(), f.right()));
  return apply(emit(ax, Justification::logical(Rule::IffL)), ax, {iff, a});
}

Deriver::Fact Deriver::iff_mpr(Fact iff, Fact b) {
  const Formula f = formula(iff);
  expect(f.kind() == Formula::Kind::Iff, "iff expected");
  Formula ax = imp(f, imp(f.right(), f.left()));
  return apply(emit(ax, Justification::logical(Rule::IffR)), ax, {iff, b});
}

Deriver::Fact Deriver::iff_sym(Fact iff) {
  const Formula f = formula(iff);
  expect(f.kind() == Formula::Kind::Iff, "iff expected");
  Formula l = imp(f, imp(f.left(), f.right()));
  Formula r = imp(f, imp(f.right(), f.left()));
  Fact ab = apply(emit(l, Justification::logical(Rule::IffL)), l, {iff});
  Fact ba = apply(emit(r, Justification::logical(Rule::IffR)), r, {iff});
  return iff_i(ba, ab);
}

Deriver::Fact Deriver::iff_trans(Fact ab, Fact bc) {
  const Formula a = formula(ab).left();
  const Formula c = formula(bc).right();
  Fact fwd = implies_i(a, [&](Fact h) { return iff_mp(bc, iff_mp(ab, h)); });
  Fact bwd = implies_i(c, [&](Fact h) { return iff_mpr(ab, iff_mpr(bc, h)); });
  return iff_i(fwd, bwd);
}

Deriver::Fact Deriver::iff_refl(const Formula& a) {
  Fact id = identity(a);
  return iff_i(id, id);
}

Deriver::Fact Deriver::contradiction(Fact a, Fact na, const Formula& goal) {
  const Formula fa = formula(a);
  expect(alpha_eq(formula(na), neg(fa)), "contradiction needs A and ¬A");
  return apply(lemma_exfalso(fa, goal), imp(neg(fa), imp(fa, goal)), {na, a});
}

Deriver::Fact Deriver::absurd(Fact a, Fact na) { return contradiction(a, na, falsum()); }

Deriver::Fact Deriver::exfalso(Fact bottom, const Formula& goal) {
  expect(alpha_eq(formula(bottom), falsum()), "exfalso needs ⊥");
  return contradiction(and_l(bottom), and_r(bottom), goal);
}

Deriver::Fact Deriver::not_i(const Formula& a, const std::function<Fact(Fact)>& body) {
  Fact ab = implies_i(a, [&](Fact h) {
    Fact r = body(h);
    expect(alpha_eq(formula(r), falsum()), "not_i body must derive ⊥");
    return r;
  });
  const Formula& t = truth_part();
  // a → T and a → ¬T from a → ⊥.
  Formula al = imp(falsum(), t), ar = imp(falsum(), neg(t));
  Fact to_t = implies_i(a, [&](Fact h) {
    return apply(emit(al, Justification::logical(Rule::AndL)), al, {mp(h, ab)});
  });
  Fact to_nt = implies_i(a, [&](Fact h) {
    return apply(emit(ar, Justification::logical(Rule::AndR)), ar, {mp(h, ab)});
  });
  return apply(lemma_neg_intro(a, t), imp(imp(a, t), imp(imp(a, neg(t)), neg(a))), {to_t, to_nt});
}

Deriver::Fact Deriver::dne(Fact nna) {
  const Formula f = formula(nna);
  expect(f.kind() == Formula::Kind::Not && f.body().kind() == Formula::Kind::Not, "dne needs ¬¬A");
  const Formula& a = f.body().body();
  return apply(lemma_dne(a), imp(f, a), {nna});
}

Deriver::Fact Deriver::excluded_middle(const Formula& a) {
  return at_depth0(lemma_em(a), Formula::disj(a, neg(a)));
}

Deriver::Fact Deriver::by_cases(const Formula& a, const std::function<Fact(Fact)>& pos,
                                const std::function<Fact(Fact)>& neg_branch) {
  Fact p = implies_i(a, pos);
  Fact n = implies_i(neg(a), neg_branch);
  return or_e(excluded_middle(a), p, n);
}

Deriver::Fact Deriver::modus_tollens(Fact ab, Fact nb) {
  const Formula a = formula(ab).left(), b = formula(ab).right();
  Formula w = imp(neg(b), imp(a, neg(b)));
  Fact anb = apply(emit(w, Justification::logical(Rule::P1)), w, {nb});
  return apply(lemma_neg_intro(a, b), imp(imp(a, b), imp(imp(a, neg(b)), neg(a))), {ab, anb});
}

Deriver::Fact Deriver::forall_i(Fact b, const Var& v) {
  b = lift(b);
  const FactRec r = facts_[b];
  Formula all = Formula::forall(v, r.f);
  if (frames_.empty()) return make(emit(all, Justification::gen(r.line + 1)), all);
  expect(!frames_.back().free.count(v), "generalized variable " + v.name + " is free in a hypothesis");
  const Formula& c = frames_.back().context;
  int g = emit(Formula::forall(v, imp(c, r.f)), Justification::gen(r.line + 1));
  int qd = emit(imp(Formula::forall(v, imp(c, r.f)), imp(c, all)), Justification::logical(Rule::QDist));
  return make(emit(imp(c, all), Justification::mp(g + 1, qd + 1)), all);
}

Deriver::Fact Deriver::forall_i_all(Fact b, const std::vector<Var>& vs) {
  for (std::size_t i = vs.size(); i-- > 0;) b = forall_i(b, vs[i]);
  return b;
}

Deriver::Fact Deriver::forall_e(Fact all, const Term& t) {
  const Formula f = formula(all);
  expect(f.kind() == Formula::Kind::Forall, "forall_e needs a universal");
  Formula ax = imp(f, substitute(f.body(), f.bound(), t));
  return apply(emit(ax, Justification::logical(Rule::QInst)), ax, {all});
}

Deriver::Fact Deriver::forall_e_all(Fact all, const std::vector<Term>& ts) {
  for (const Term& t : ts) all = forall_e(all, t);
  return all;
}

Deriver::Fact Deriver::exists_i(Fact inst, const Formula& ex, const Term& t) {
  expect(ex.kind() == Formula::Kind::Exists, "exists_i needs an existential");
  Formula ax = imp(substitute(ex.body(), ex.bound(), t), ex);
  return apply(emit(ax, Justification::logical(Rule::ExI)), ax, {inst});
}

Deriver::Fact Deriver::exists_i_all(Fact inst, const Formula& ex, const std::vector<Term>& ts) {
  std::vector<Formula> stages{ex};
  for (const Term& t : ts) {
    const Formula& cur = stages.back();
    expect(cur.kind() == Formula::Kind::Exists, "exists_i_all: too many witnesses");
    stages.push_back(substitute(cur.body(), cur.bound(), t));
  }
  for (std::size_t i = ts.size(); i-- > 0;) inst = exists_i(inst, stages[i], ts[i]);
  return inst;
}

Deriver::Fact Deriver::exists_e(Fact ex, const Var& w, const std::function<Fact(Fact)>& body) {
  const Formula f = formula(ex);
  expect(f.kind() == Formula::Kind::Exists, "exists_e needs an existential");
  expect(!f.has_free(w), "witness " + w.name + " is free in the existential");
  expect(frames_.empty() || !frames_.back().free.count(w), "witness " + w.name + " is free in a hypothesis");
  names_.insert(w.name);
  Formula aw = substitute(f.body(), f.bound(), Term::var(w));
  Fact inner = implies_i(aw, body);
  const Formula b = formula(inner).right();
  expect(!b.has_free(w), "witness " + w.name + " escapes into the conclusion");
  Fact all = forall_i(inner, w);
  Formula ax = imp(formula(all), imp(Formula::exists(w, aw), b));
  return apply(emit(ax, Justification::logical(Rule::ExE)), ax, {all, ex});
}

Deriver::Fact Deriver::rewrite(Fact st, Fact phi, const Formula& target) {
  const Formula e = formula(st);
  expect(e.kind() == Formula::Kind::Eq, "rewrite needs an identity");
  Formula ax = imp(e, imp(formula(phi), target));
  return apply(emit(ax, Justification::logical(Rule::Leibniz)), ax, {st, phi});
}

Deriver::Fact Deriver::eq_sym(Fact st) {
  const Formula e = formula(st);
  expect(e.kind() == Formula::Kind::Eq, "eq_sym needs an identity");
  return rewrite(st, refl(e.lhs()), Formula::eq(e.rhs(), e.lhs()));
}

Deriver::Fact Deriver::eq_trans(Fact st, Fact tu) {
  const Formula a = formula(st), b = formula(tu);
  expect(a.kind() == Formula::Kind::Eq && b.kind() == Formula::Kind::Eq, "eq_trans needs identities");
  return rewrite(eq_sym(st), tu, Formula::eq(a.lhs(), b.rhs()));
}

Deriver::Fact Deriver::extensionality(Fact pointwise, const Term& r, const Term& s) {
  const int m = r.sort().arity();
  Fact ext = axiom(extensionality_axiom(m), SchemaId{SchemaId::Kind::Extensionality, m, 0, ""});
  Fact inst = forall_e(forall_e(ext, r), s);
  return iff_mpr(inst, pointwise);
}

Deriver::Fact Deriver::coextensive(Fact eq, const Term& r, const Term& s) {
  const int m = r.sort().arity();
  Fact ext = axiom(extensionality_axiom(m), SchemaId{SchemaId::Kind::Extensionality, m, 0, ""});
  Fact inst = forall_e(forall_e(ext, r), s);
  return iff_mp(inst, eq);
}

Deriver::Fact Deriver::comprehension(const Formula& phi, const std::vector<Var>& tuple, const Var& rel) {
  return axiom(fo_comp_instance(phi, tuple, rel), SchemaId{SchemaId::Kind::FOComp, 0, 0, ""});
}

Deriver::Fact Deriver::delta11(const Formula& phi, const Formula& psi, const std::vector<Var>& tuple,
                               const Var& rel) {
  return axiom(delta11_comp_instance(phi, psi, tuple, rel),
               SchemaId{SchemaId::Kind::Delta11Comp, 0, 0, ""});
}

Var Deriver::fresh(const std::string& base, Sort s) {
  std::string n = fresh_name(base, names_);
  names_.insert(n);
  return Var{n, s};
}

void Deriver::reserve(const Formula& f) { collect_names(f, names_); }

Derivation Deriver::finish(Fact goal, const std::vector<Fact>& keep) const {
  const FactRec& r = facts_.at(goal);
  expect(r.depth == 0, "goal must not depend on hypotheses");
  std::vector<bool> need(lines_.size(), false);
  std::vector<int> stack{r.line};
  for (Fact k : keep) {
    const FactRec& kr = facts_.at(k);
    expect(kr.depth == 0 && kr.line < r.line, "kept facts must be depth-0 lines before the goal");
    stack.push_back(kr.line);
  }
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (need[i]) continue;
    need[i] = true;
    for (int ref : lines_[i].just.refs) stack.push_back(ref - 1);
  }
  std::vector<int> renum(lines_.size(), 0);
  Derivation d;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(r.line); ++i) {
    if (!need[i]) continue;
    Line ln = lines_[i];
    ln.n = static_cast<int>(d.lines.size()) + 1;
    renum[i] = ln.n;
    for (int& ref : ln.just.refs) ref = renum[ref - 1];
    d.lines.push_back(std::move(ln));
  }
  return d;
}

}  // namespace pft
