#ifndef PFT_SEXPR_HPP
#define PFT_SEXPR_HPP

#include <string>
#include <string_view>
#include <vector>

namespace pft {

// Plain s-expression tree; `;` starts a comment running to end of line.
struct SExpr {
  bool atom = false;
  std::string text;
  std::vector<SExpr> items;
  int line = 1;
  int col = 1;

  bool is_list() const { return !atom; }
  bool is_atom(std::string_view s) const { return atom && text == s; }
  // First item of a list when it is an atom, "" otherwise.
  const std::string& head() const;
  std::string where() const;
};

std::vector<SExpr> read_sexprs(std::string_view text);
SExpr read_sexpr(std::string_view text);

std::string to_string(const SExpr& e);

}  // namespace pft

#endif  // PFT_SEXPR_HPP
