#ifndef PFT_PA2_HPP
#define PFT_PA2_HPP

// Second-order arithmetic and its translation into L₀[∂], ∂ the Basic Law V
// operator. Numbers are objects in N, sets are unary concepts below N.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pft/kernel.hpp"

namespace pft {

enum class Pa2Sort { Nat, Set };

struct Pa2Term {
  enum class Kind { Var, Zero, Succ, Plus, Times };
  Kind kind = Kind::Zero;
  std::string name;  // Var
  std::vector<Pa2Term> args;

  static Pa2Term var(std::string n) { return {Kind::Var, std::move(n), {}}; }
  static Pa2Term zero() { return {Kind::Zero, "", {}}; }
  static Pa2Term succ(Pa2Term t) { return {Kind::Succ, "", {std::move(t)}}; }
  static Pa2Term plus(Pa2Term a, Pa2Term b) { return {Kind::Plus, "", {std::move(a), std::move(b)}}; }
  static Pa2Term times(Pa2Term a, Pa2Term b) { return {Kind::Times, "", {std::move(a), std::move(b)}}; }
};

struct Pa2Formula {
  enum class Kind { Eq, In, Not, And, Or, Implies, Iff, Forall, Exists };
  Kind kind = Kind::Eq;
  std::vector<Pa2Term> terms;  // Eq: two, In: the element
  std::string var;             // In: the set; quantifiers: the bound variable
  Pa2Sort sort = Pa2Sort::Nat;  // quantifiers
  std::vector<Pa2Formula> subs;
};

// `(forall (n Nat) f)`, `(exists (X Set) f)`, `(= t u)`, `(in t X)`, the
// .sof connectives; terms `0`, `(s t)`, `(+ t u)`, `(* t u)` and bare
// variables. A free variable is a set iff it occurs as the second argument
// of `in`. Errors: Syntax, SortMismatch.
Pa2Formula parse_pa2(std::string_view text);
std::string print_pa2(const Pa2Formula& f);
std::set<std::pair<std::string, Pa2Sort>> pa2_free_vars(const Pa2Formula& f);

struct InterpretationData {
  std::string symbol;  // ∂
  // Definitions over the displayed placeholders: z for zero, x y for the
  // successor graph, x for N, x y z for the addition and multiplication graphs.
  Var x, y, z;
  Formula zero_def = falsum();
  Formula succ_sigma = falsum();
  Formula succ_pi = falsum();
  Formula n_def = falsum();
  Formula plus_def = falsum();
  Formula times_def = falsum();

  Formula zero(const Term& t) const;
  Formula succ(const Term& a, const Term& b) const;
  Formula nat(const Term& t) const;
  Formula plus(const Term& a, const Term& b, const Term& c) const;
  Formula times(const Term& a, const Term& b, const Term& c) const;
  // ∀a (X a → N a)
  Formula below_n(const Term& set) const;
};

const InterpretationData& standard_interpretation();
// Errors: UnknownSymbol when Basic Law V is not in the registry.
InterpretationData interpretation_data(const Registry& reg);

// Fresh object variables for flattened subterms are w1, w2, ... in order of
// first need, skipping names that occur in f.
Formula translate(const Pa2Formula& f);

struct Obligation {
  std::string name;
  std::optional<Pa2Formula> source;  // absent for the successor graph
  Formula translated;
  std::optional<Derivation> script;  // checks under PFT with Basic Law V
  std::string script_file;
};

std::vector<Obligation> obligations();

Derivation succ_graph_script();
Derivation q1_script();
Derivation q2_script();
Derivation induction_script();

}  // namespace pft

#endif  // PFT_PA2_HPP
