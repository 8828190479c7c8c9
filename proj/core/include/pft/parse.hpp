#ifndef PFT_PARSE_HPP
#define PFT_PARSE_HPP

// Concrete syntax of the `.sof` format: parenthesized prefix notation.
//
//   sorts     Obj | (Conc n)
//   formulas  (forall (v S) f) (exists (v S) f) (and f g) (or f g) (not f)
//             (implies f g) (iff f g) (pred r a1 .. an) (= t u)
//   terms     symbol | (proj R a1 .. am) | (abs <id> R)
//
// Free variables carry no annotation; their sorts come from the caller's
// context, then from use (predication head, projection base, abstraction
// argument, identity with a known side), then from case: an upper-case
// initial means a unary concept, anything else an object. A `.sof` file may
// open with (declare (v S) ...) forms fixing free-variable sorts.

#include <map>
#include <string>
#include <string_view>

#include "pft/sexpr.hpp"
#include "pft/syntax.hpp"

namespace pft {

struct ParseOptions {
  // Accept abstraction ids missing from the signature (arity taken from use).
  bool strict_symbols = true;
  std::map<std::string, Sort> free_sorts;
};

Formula parse_formula(std::string_view text, const Signature& sig, const ParseOptions& opts = {});
Formula formula_from_sexpr(const SExpr& e, const Signature& sig, const ParseOptions& opts = {});
Term parse_term(std::string_view text, const Signature& sig, const ParseOptions& opts = {});
Term term_from_sexpr(const SExpr& e, const Signature& sig, const ParseOptions& opts = {});
Sort parse_sort(const SExpr& e);

std::string print_formula(const Formula& f);
std::string print_term(const Term& t);
std::string print_sort(Sort s);

// Formula with `(declare ...)` header for every free variable whose sort the
// reader would not recover on its own.
std::string print_sof(const Formula& f);
Formula parse_sof(std::string_view text, const Signature& sig, const ParseOptions& opts = {});

// Free-variable sorts the reader infers for `f`'s printout (no context).
std::map<std::string, Sort> inferred_free_sorts(const Formula& f, const Signature& sig);

}  // namespace pft

#endif  // PFT_PARSE_HPP
