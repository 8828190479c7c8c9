#ifndef PFT_SCRIPTS_HPP
#define PFT_SCRIPTS_HPP

// Generated corpus derivations.

#include "pft/kernel.hpp"
#include "pft/prover.hpp"

namespace pft {

// Equiv(X = Y) under Σ¹₁-OS.
Derivation equiv_blv_script();

// A[E_blv] inside `d`, minted from a proof of Equiv(X = Y) (PFT*).
Deriver::Fact mint_blv(Deriver& d);

// ⊥ under PFT*: Basic Law V is minted, the Russell concept is obtained by the
// comprehension construction run with minted abstraction principles.
Derivation russell_script();

}  // namespace pft

#endif  // PFT_SCRIPTS_HPP
