#ifndef PFT_PROVER_HPP
#define PFT_PROVER_HPP

// Untrusted natural-deduction front end that emits kernel derivations.
//
// Hypotheses H1..Hd are kept as the left-nested conjunction
// C = ((H1 ∧ H2) ∧ ...) ∧ Hd and a fact at depth d is a line C → B. Every
// rule lifts its premises to the current depth first. Output is only as
// trustworthy as the kernel check it must pass.

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pft/kernel.hpp"

namespace pft {

class ProofError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Deriver {
 public:
  using Fact = int;

  Deriver();

  const Formula& formula(Fact f) const;
  int depth() const { return static_cast<int>(frames_.size()); }

  // Depth-0 axioms.
  Fact axiom(const Formula& f, const SchemaId& id);
  Fact logical(Rule r, const Formula& f);
  Fact refl(const Term& t);

  // Hypothetical reasoning.
  Fact assume(const Formula& h);
  Fact discharge(Fact b);
  // Proves h → body(h) at the current depth.
  Fact implies_i(const Formula& h, const std::function<Fact(Fact)>& body);

  // Propositional rules.
  Fact mp(Fact a, Fact ab);
  Fact and_i(Fact a, Fact b);
  Fact and_l(Fact ab);
  Fact and_r(Fact ab);
  // Conjuncts of a right-nested conjunction, split `n` times.
  std::vector<Fact> and_split(Fact f, int n);
  Fact and_all(const std::vector<Fact>& fs);
  Fact or_il(Fact a, const Formula& b);
  Fact or_ir(const Formula& a, Fact b);
  Fact or_e(Fact a_or_b, Fact a_to_c, Fact b_to_c);
  Fact cases(Fact a_or_b, const std::function<Fact(Fact)>& left, const std::function<Fact(Fact)>& right);
  Fact iff_i(Fact ab, Fact ba);
  Fact iff_mp(Fact iff, Fact a);   // A ↔ B, A ⊢ B
  Fact iff_mpr(Fact iff, Fact b);  // A ↔ B, B ⊢ A
  Fact iff_sym(Fact iff);
  Fact iff_trans(Fact ab, Fact bc);
  Fact iff_refl(const Formula& a);
  Fact absurd(Fact a, Fact na);            // ⊥
  Fact exfalso(Fact bottom, const Formula& goal);
  Fact contradiction(Fact a, Fact na, const Formula& goal);
  // ¬a from a derivation of ⊥ under a.
  Fact not_i(const Formula& a, const std::function<Fact(Fact)>& body);
  Fact dne(Fact nna);
  Fact by_cases(const Formula& a, const std::function<Fact(Fact)>& pos, const std::function<Fact(Fact)>& neg);
  Fact excluded_middle(const Formula& a);
  // From a → b and ¬b infer ¬a.
  Fact modus_tollens(Fact ab, Fact nb);

  // Quantifiers.
  Fact forall_i(Fact b, const Var& v);
  Fact forall_i_all(Fact b, const std::vector<Var>& vs);  // innermost last
  Fact forall_e(Fact all, const Term& t);
  Fact forall_e_all(Fact all, const std::vector<Term>& ts);
  Fact exists_i(Fact inst, const Formula& ex, const Term& t);
  // inst is the matrix of ex with its leading existentials instantiated by ts.
  Fact exists_i_all(Fact inst, const Formula& ex, const std::vector<Term>& ts);
  // Uses the instance ∃v A ⊢ A[v:=w] with w fresh; body proves the goal.
  Fact exists_e(Fact ex, const Var& w, const std::function<Fact(Fact)>& body);

  // Equality.
  Fact eq_sym(Fact st);
  Fact eq_trans(Fact st, Fact tu);
  // s = t, φ ⊢ φ′ where φ′ replaces some occurrences of s in φ by t.
  Fact rewrite(Fact st, Fact phi, const Formula& target);
  // ∀ā (R ā ↔ S ā) ⊢ R = S.
  Fact extensionality(Fact pointwise, const Term& r, const Term& s);
  // R = S ⊢ ∀ā (R ā ↔ S ā)
  Fact coextensive(Fact eq, const Term& r, const Term& s);

  // Theorems of Σ¹₁-OS with its comprehension instance as the starting fact.
  Fact comprehension(const Formula& phi, const std::vector<Var>& tuple, const Var& rel);
  Fact delta11(const Formula& phi, const Formula& psi, const std::vector<Var>& tuple, const Var& rel);

  // Depth-0 theorems.
  Fact identity(const Formula& a);

  // Variable with a name not used anywhere so far.
  Var fresh(const std::string& base, Sort s);
  void reserve(const Formula& f);

  // The lines the goal depends on, renumbered. `keep` adds earlier depth-0
  // facts the goal does not need.
  Derivation finish(Fact goal, const std::vector<Fact>& keep = {}) const;
  std::size_t line_count() const { return lines_.size(); }

 private:
  struct FactRec {
    int depth;
    int frame;
    Formula f;
    int line;
  };
  struct Frame {
    int id;
    Formula hyp;
    Formula context;  // C at this depth
    VarSet free;      // free variables of the whole context
  };

  int emit(const Formula& f, Justification j);
  Fact make(int line, const Formula& f);
  Fact at_depth0(int line, const Formula& f);
  Fact lift(Fact x);
  const Formula* context() const;
  int weaken_line(int line, const Formula& b, int from_depth);
  int chain0(int xy, int yz, const Formula& x, const Formula& y, const Formula& z);
  Fact ctx_mp(Fact a, Fact ab);
  Fact apply(int lemma_line, const Formula& lemma, const std::vector<Fact>& premises);
  int lemma_exportation(const Formula& x, const Formula& y, const Formula& z);
  int lemma_exfalso(const Formula& a, const Formula& b);
  int lemma_dne(const Formula& a);
  int lemma_neg_intro(const Formula& a, const Formula& b);
  int lemma_em(const Formula& a);
  void check_usable(Fact x) const;

  friend class HypProof;

  std::vector<Line> lines_;
  std::map<std::string, int> by_key_;
  std::vector<FactRec> facts_;
  std::vector<Frame> frames_;
  int next_frame_ = 1;
  std::set<std::string> names_;
  std::map<std::pair<int, int>, int> weaken_cache_;  // (frame, from depth) -> line C_d → C_e
};

}  // namespace pft

#endif  // PFT_PROVER_HPP
