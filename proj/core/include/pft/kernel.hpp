#ifndef PFT_KERNEL_HPP
#define PFT_KERNEL_HPP

// Trusted checker for linear Hilbert-style derivations.
//
// Logical axioms (any sorts, alpha-equivalence as identity):
//   p1      A → (B → A)
//   p2      (A → (B → C)) → ((A → B) → (A → C))
//   p3      (¬B → ¬A) → ((¬B → A) → B)
//   and-i   A → (B → A ∧ B)        and-l  A ∧ B → A      and-r  A ∧ B → B
//   or-l    A → A ∨ B              or-r   B → A ∨ B
//   or-e    (A → C) → ((B → C) → (A ∨ B → C))
//   iff-i   (A → B) → ((B → A) → (A ↔ B))
//   iff-l   (A ↔ B) → (A → B)      iff-r  (A ↔ B) → (B → A)
//   q-inst  ∀v A → A[v:=t]         ex-i   A[v:=t] → ∃v A
//   q-dist  ∀v (A → B) → (A → ∀v B), v not free in A
//   ex-e    ∀v (A → B) → (∃v A → B), v not free in B
//   refl    t = t
//   leibniz s = t → (φ → φ′), φ′ is φ with some free occurrences of s
//           replaced by t, nothing captured
//   cong    s = t → u = u′, u′ is u with some occurrences of s replaced by t
// Rules: (mp i j) from A (line i) and A → B (line j); (gen i) ∀v A from A.
// Theory axioms: (axiom <schema-id>).

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pft/schema.hpp"
#include "pft/syntax.hpp"

namespace pft {

enum class Rule {
  P1, P2, P3,
  AndI, AndL, AndR, OrL, OrR, OrE, IffI, IffL, IffR,
  QInst, QDist, ExI, ExE,
  Refl, Leibniz, Cong,
  MP, Gen,
  Axiom,
};

const char* to_string(Rule r);
std::optional<Rule> rule_from_string(std::string_view s);

struct Justification {
  Rule rule = Rule::P1;
  std::vector<int> refs;           // mp i j, gen i
  std::optional<SchemaId> schema;  // axiom

  static Justification logical(Rule r) { return {r, {}, std::nullopt}; }
  static Justification mp(int i, int j) { return {Rule::MP, {i, j}, std::nullopt}; }
  static Justification gen(int i) { return {Rule::Gen, {i}, std::nullopt}; }
  static Justification axiom(SchemaId s) { return {Rule::Axiom, {}, std::move(s)}; }
};

struct Line {
  int n = 0;
  Formula formula;
  Justification just;
};

struct Derivation {
  std::vector<Line> lines;
  const Formula& conclusion() const { return lines.back().formula; }
};

enum class TheoryKind { Sigma11OS, PFT, PFT2, PFTStar };

struct TheoryId {
  TheoryKind kind = TheoryKind::Sigma11OS;
  std::string str() const;
  static TheoryId parse(std::string_view s);
  friend bool operator==(const TheoryId&, const TheoryId&) = default;
};

struct RegistryEntry {
  EquivDef equiv;
  AbstractionSymbol symbol;
  int level = 1;
  Derivation certificate;
  std::string certificate_path;
};

// Append-only record of certified equivalences. Level 1 entries are L₀
// formulas certified in Σ¹₁-OS; level 2 entries may use level 1 symbols and
// are certified in PFT.
class Registry {
 public:
  explicit Registry(int level = 1);

  int level() const { return level_; }
  const std::vector<RegistryEntry>& entries() const { return entries_; }
  const RegistryEntry* find_symbol(const std::string& id) const;
  const RegistryEntry* find_equiv(const EquivDef& e) const;
  Signature signature(int max_level) const;

  friend Registry certify_equivalence(const EquivDef&, const Derivation&, const Registry&, std::string);

 private:
  int level_;
  std::vector<RegistryEntry> entries_;
};

struct CheckOptions {
  bool strict = false;  // reject admitted Δ¹₁ instances
};

struct CheckReport {
  bool ok = true;
  std::optional<std::pair<int, std::string>> first_failure;
  std::size_t lines = 0;
  bool admitted_delta11 = false;
  std::vector<AbstractionSymbol> minted;  // PFT* only
};

// Recognizes f as a theory axiom under `sig` (for PFT* the symbols minted so
// far). Logical axioms are not theory axioms.
std::optional<Justification> axiom_of(const TheoryId& theory, const Registry& reg, const Formula& f,
                                      const Signature* star_sig = nullptr);

// Empty string when f is an instance of the named theory axiom, otherwise the reason.
std::string match_axiom(const TheoryId& theory, const Registry& reg, const Signature& sig,
                        const SchemaId& id, const Formula& f);

// Empty string when f is an instance of logical axiom r, otherwise the reason.
std::string match_logical(Rule r, const Formula& f);

CheckReport check(const Derivation& d, const TheoryId& theory, const Registry& reg,
                  const CheckOptions& opts = {});

// Errors: BadFreeVariables, WrongLanguageLevel, CertificateRejected.
Registry certify_equivalence(const EquivDef& e, const Derivation& cert, const Registry& reg,
                             std::string cert_path = "");

// Errors: LevelMismatch.
TheoryId assemble_theory(int level, const Registry& reg);

// ⊥ := (∀x x = x) ∧ ¬(∀x x = x).
Formula falsum();

// --- file formats -------------------------------------------------------------

// One `(line n formula (rule args...))` per line, optionally preceded by a
// `(declare (v S) ...)` form fixing free-variable sorts.
std::string print_derivation(const Derivation& d);
Derivation parse_derivation(std::string_view text);

// `.reg`: `(registry (level n))` then one
// `(entry (id ..) (level ..) (left v S) (right v S) (formula f) (certificate "path"))` per entry.
std::string print_registry(const Registry& r);
// Certificates are read through `load_certificate(path)` and re-checked.
Registry parse_registry(std::string_view text,
                        const std::function<Derivation(const std::string&)>& load_certificate);

bool registry_equal(const Registry& a, const Registry& b);

}  // namespace pft

#endif  // PFT_KERNEL_HPP
