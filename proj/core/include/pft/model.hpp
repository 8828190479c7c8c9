#ifndef PFT_MODEL_HPP
#define PFT_MODEL_HPP

// Full second-order semantics over small finite domains. Objects are atoms
// 0..d-1; an n-ary concept is a bitmask over the d^n tuples, tuple
// (a1..an) sitting at bit a1*d^(n-1) + ... + an.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pft/syntax.hpp"

namespace pft {

using Mask = std::uint64_t;

// At most this many extensions are enumerated for a single quantifier.
inline constexpr Mask kExtensionCap = 512;

struct Structure {
  int d = 1;
  // symbol id -> (argument extension -> atom). Evaluating an abstraction
  // term outside this support is an error.
  std::map<std::string, std::map<Mask, int>> abstraction;
};

// Values of free variables: atoms for objects, masks for concepts.
using Env = std::map<Var, Mask>;

int tuple_count(int d, int arity);
// Number of n-ary extensions over d atoms; throws CapExceeded beyond the cap.
Mask extension_count(int d, int arity);
std::string format_extension(Mask m, int arity, int d);

bool eval(const Structure& s, const Env& env, const Formula& f);
Mask eval_term(const Structure& s, const Env& env, const Term& t);

// True iff `f` holds under every assignment to its free variables.
// Leading universal quantifiers and implication hypotheses are unfolded so
// that assignments falsifying a hypothesis are pruned early.
bool holds_universally(const Structure& s, const Formula& f, std::string* counterexample = nullptr);

struct EquivReport {
  int d = 0;
  int arity = 0;
  bool reflexive = false;
  bool symmetric = false;
  bool transitive = false;
  // Witnesses for the first failure of each property.
  std::vector<Mask> reflexive_cex;
  std::vector<Mask> symmetric_cex;
  std::vector<Mask> transitive_cex;
  // Only meaningful when all three hold; classes ordered by least member.
  int class_count = -1;
  std::vector<std::vector<Mask>> classes;

  bool is_equivalence() const { return reflexive && symmetric && transitive; }
};

// E must be abstraction-free with exactly the two concept variables of `e`.
EquivReport check_equiv(const EquivDef& e, int d);

// Full E-matrix: row r has bit s set iff E(r, s).
std::vector<std::vector<bool>> equiv_matrix(const EquivDef& e, int d);

struct AbstractionSearch {
  std::optional<std::vector<int>> witness;  // extension index -> atom
  std::uint64_t searched = 0;
};

// Exhaustive search over all maps from unary extensions to atoms for one
// satisfying ∂X = ∂Y ↔ E(X, Y). Unary E only; d <= 3.
AbstractionSearch search_abstraction(const EquivDef& e, int d);

struct Falsifier {
  std::size_t index = 0;
  int d = 0;
  std::string assignment;
};

struct ValidationReport {
  std::size_t checked = 0;
  std::vector<Falsifier> falsifiers;
  bool ok() const { return falsifiers.empty(); }
};

// Each instance, universally closed, is evaluated in every full structure
// with 1 <= d <= d_max.
ValidationReport validate_instances(const std::vector<Formula>& instances, int d_max);

}  // namespace pft

#endif  // PFT_MODEL_HPP
