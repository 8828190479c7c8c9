#ifndef PFT_SCHEMA_HPP
#define PFT_SCHEMA_HPP

// Syntactic classification and generators for every axiom and schema
// instance of the background second-order logic and its Fregean expansions.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pft/syntax.hpp"

namespace pft {

enum class FormulaClass { FirstOrder, Sigma11, Pi11, Unclassified };

const char* to_string(FormulaClass c);

// Literal classification: FirstOrder iff no concept quantifier occurs;
// Sigma11 (Pi11) iff a non-empty block of existential (universal) concept
// quantifiers, possibly interleaved with nothing else, sits over a
// first-order matrix.
FormulaClass classify(const Formula& f);

// FirstOrder formulas play both the Sigma11 and Pi11 roles (empty block).
bool admits(const Formula& f, FormulaClass role);

struct SchemaId {
  enum class Kind {
    FullComp,
    FOComp,
    Delta11Comp,
    Sigma11Choice,
    Extensionality,
    Projection,
    Abstraction,
    EquivSentence,
    EquivAbstraction,  // Equiv(E) -> A[E], the axiom-based variant.
  };
  Kind kind = Kind::FOComp;
  int m = 0;
  int n = 0;
  std::string symbol;

  std::string str() const;
  // Parses the textual form produced by str(): "fo-comp", "ext 2",
  // "proj 1 2", "abs d_...", ...
  static SchemaId parse(std::span<const std::string> words);

  friend bool operator==(const SchemaId&, const SchemaId&) = default;
};

// ∃R ∀ā (R ā ↔ φ), parameters left free. Errors: NotFirstOrder,
// VariableCollision, BadArity.
Formula fo_comp_instance(const Formula& phi, std::span<const Var> tuple, const Var& rel);
Formula full_comp_instance(const Formula& phi, std::span<const Var> tuple, const Var& rel);

// (∀x̄ (φ ↔ ψ)) → ∃R ∀x̄ (R x̄ ↔ φ), φ Σ¹₁ and ψ Π¹₁. Errors: WrongClass,
// VariableCollision, BadArity.
Formula delta11_comp_instance(const Formula& phi, const Formula& psi, std::span<const Var> tuple,
                              const Var& rel);

// [∀x̄ ∃R′ φ(R′, x̄)] → ∃R ∀x̄ φ(R[x̄], x̄) with R of arity m + n.
Formula sigma11_choice_instance(const Formula& phi, const Var& witness, std::span<const Var> xs,
                                const Var& rel);

Formula extensionality_axiom(int m);
Formula projection_axiom(int m, int n);

// Universal closure over R, S, T of reflexivity ∧ (symmetry ∧ transitivity).
Formula equiv_sentence(const EquivDef& e);
// Picks the two free concept variables of `e` (in name order) as R and S.
EquivDef equiv_def_from(const Formula& e);

// ∀R ∀S (∂_E(R) = ∂_E(S) ↔ E(R, S)).
Formula abstraction_principle(const EquivDef& e, const AbstractionSymbol& sym);
AbstractionSymbol symbol_for(const EquivDef& e);

// Named corpus formulas. blv_equiv, hp_equiv and ordinal_equiv are
// equivalence definitions; wo and field are formula builders shown with
// free R (and x).
EquivDef corpus_equiv(const std::string& name);
Formula corpus_formula(const std::string& name);
std::vector<std::string> corpus_names();

// Field(R) applied to x: ∃y (R(x,y) ∨ R(y,x)).
Formula field_formula(const Term& rel, const Term& x);
// R is a strict linear order on its field and every non-empty subconcept of
// the field has an R-least element.
Formula wo_formula(const Term& rel);
// f (binary) is the graph of a bijection between unary X and Y.
Formula bijection_formula(const Term& f, const Term& x, const Term& y);
// f is an order isomorphism between (Field(R), R) and (Field(S), S).
Formula isomorphism_formula(const Term& f, const Term& r, const Term& s);

// Universal closure, free variables in name order.
Formula universal_closure(const Formula& f);

// Best effort: pulls leading concept quantifiers out of ∧ / ∨ when the
// bound variable does not occur in the other side. Never applied implicitly.
Formula hoist_concept_quantifiers(const Formula& f);

}  // namespace pft

#endif  // PFT_SCHEMA_HPP
