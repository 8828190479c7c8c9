#ifndef PFT_COMPILER_HPP
#define PFT_COMPILER_HPP

// Full Comprehension for an L₀-formula Φ(x, G₁..G_m) recovered inside PFT.
//
// For each emptiness pattern b ∈ {0,1}^m the compiler builds an equivalence
// E_b on (1+k)-ary concepts, k = number of ones in b: relations of the form
// {x} × G_i1 × ... × G_ik with every factor non-empty are compared by Φ (the
// empty parameters replaced by ∅), and all other relations form one class.
// For k = 0 the relations are unary and compared as singletons.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pft/kernel.hpp"
#include "pft/prover.hpp"

namespace pft {

struct MuNu {
  Formula mu;
  Formula nu;
  EquivDef e;
};

// Φ(x, G) with exactly these free variables: x an object, G a unary concept.
// Errors: BadFreeVariables.
MuNu build_mu_nu(const Formula& phi);
// Singleton comparison by Φ(x, ∅); for an m = 0 formula Φ(x) itself is used.
MuNu build_prime(const Formula& phi);

struct CaseEquivalence {
  std::string tag;  // one character per parameter, '1' = non-empty
  EquivDef equiv;
  std::optional<Derivation> equiv_script;  // Equiv(E) under Σ¹₁-OS

  // File stem used by the manifest: E, E_0, E_1, E_01, ...
  std::string stem() const { return tag.empty() ? "E" : "E_" + tag; }
};

struct CompilationResult {
  Formula target;  // ∃F ∀x (F x ↔ Φ)
  std::vector<CaseEquivalence> equivalences;
  std::optional<Derivation> main_script;  // under PFT, every E_b certified
  bool scripts_omitted = false;
  std::string manifest;
};

// Errors: BadFreeVariables (profile is not one object variable plus m unary
// concept parameters), Unsupported (m > 2).
CompilationResult compile(const Formula& phi, int m);

// Registry extended with every E_b of `r`, each certified by its script.
Registry certify_all(const CompilationResult& r, const Registry& reg);

// --- building blocks shared with other scripts --------------------------------

// Supplies A[E] inside a derivation; lets the same construction run under PFT
// (registered axioms) and PFT* (minted from a proof of Equiv(E)).
// The third argument proves Equiv(E) at the current depth when called.
using EquivProof = std::function<Deriver::Fact(Deriver&)>;
using AbstractionSource = std::function<Deriver::Fact(Deriver&, const EquivDef&, const EquivProof&)>;
AbstractionSource registered_abstraction();
AbstractionSource minted_abstraction();

// ∃Gr ∀x ∀y (Gr(x, y) ↔ σ(x, y)) by Δ¹₁-comprehension, σ(x, y) = ∃R (D(R, x) ∧ ∂R = y)
// and π(x, y) = ∀R (D(R, x) → ∂R = y) with ∂ = ∂_E. D(R, x) must have the
// shape ∀ā (R ā ↔ body) with body first-order, so R exists and is unique.
using DefinitionBuilder = std::function<Formula(const Term& rel, const Term& at)>;
struct GraphFact {
  Deriver::Fact exists;
  Var x, y;
  Formula sigma, pi;
};
GraphFact prove_graph_exists(Deriver& d, const EquivDef& e, const DefinitionBuilder& def);

// Proves Equiv(E) for the case of Φ with k non-empty parameters (k ≤ 1):
// the E of build_mu_nu for k = 1, of build_prime for k = 0.
Deriver::Fact prove_case_equiv(Deriver& d, const Formula& phi, int k);

// Proves ∃F ∀x (F x ↔ Φ) for m ≤ 1, with x the free object variable and
// (m = 1) G the parameter.
Deriver::Fact prove_comprehension(Deriver& d, const Formula& phi, const AbstractionSource& abs);

}  // namespace pft

#endif  // PFT_COMPILER_HPP
