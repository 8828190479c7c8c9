#include "pft/parse.hpp"

#include <cctype>
#include <optional>

#include "pft/error.hpp"

namespace pft {

namespace {

[[noreturn]] void syntax(const SExpr& at, const std::string& msg) {
  throw Error(ErrorKind::Syntax, at.where() + ": " + msg);
}

[[noreturn]] void unknown_symbol(const SExpr& at) {
  throw Error(ErrorKind::UnknownSymbol, at.where() + ": unknown abstraction symbol " + at.text);
}

bool is_symbol(const SExpr& e) {
  if (!e.atom || e.text.empty()) return false;
  static const std::string reserved[] = {"forall", "exists", "and",  "or",  "not",
                                         "implies", "iff",   "pred", "=",   "proj",
                                         "abs",     "Obj",   "Conc", "declare"};
  for (const auto& r : reserved)
    if (e.text == r) return false;
  return true;
}

Sort default_sort(const std::string& name) {
  if (!name.empty() && std::isupper(static_cast<unsigned char>(name.front())))
    return Sort::conc(1);
  return Sort::object();
}

// Scoped map from names to sorts.
class Scope {
 public:
  void push(const std::string& n, Sort s) { stack_.emplace_back(n, s); }
  void pop() { stack_.pop_back(); }
  std::optional<Sort> find(const std::string& n) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it)
      if (it->first == n) return it->second;
    return std::nullopt;
  }

 private:
  std::vector<std::pair<std::string, Sort>> stack_;
};

class Elaborator {
 public:
  Elaborator(const Signature& sig, const ParseOptions& opts) : sig_(sig), opts_(opts) {}

  Formula formula(const SExpr& e) {
    infer_formula(e);
    for (int round = 0; round < 8 && !pending_eqs_.empty(); ++round) resolve_eqs();
    return build_formula(e);
  }

  Term term(const SExpr& e) {
    infer_term(e, std::nullopt);
    return build_term(e);
  }

  std::map<std::string, Sort> guesses() const {
    std::map<std::string, Sort> out;
    for (const auto& [n, s] : inferred_) out.emplace(n, s);
    return out;
  }

 private:
  // ---- pass 1: sort inference for free names ----

  void constrain(const std::string& name, Sort s) {
    if (scope_.find(name)) return;
    if (opts_.free_sorts.count(name)) return;
    inferred_.emplace(name, s);
  }

  std::optional<Sort> known(const SExpr& t) const {
    if (t.atom) {
      if (auto s = scope_.find(t.text)) return s;
      if (auto it = opts_.free_sorts.find(t.text); it != opts_.free_sorts.end()) return it->second;
      if (auto it = inferred_.find(t.text); it != inferred_.end()) return it->second;
      return std::nullopt;
    }
    if (t.head() == "abs") return Sort::object();
    if (t.head() == "proj" && t.items.size() >= 3) {
      auto b = known(t.items[1]);
      int m = static_cast<int>(t.items.size()) - 2;
      if (b && b->arity() > m) return Sort::conc(b->arity() - m);
    }
    return std::nullopt;
  }

  int symbol_arity(const SExpr& id, const SExpr& arg) const {
    if (const AbstractionSymbol* s = sig_.find(id.text)) return s->arity;
    if (opts_.strict_symbols) unknown_symbol(id);
    auto k = known(arg);
    if (k && k->is_concept()) return k->arity();
    return 1;
  }

  // `expected` is the sort demanded by the position, if any.
  void infer_term(const SExpr& t, std::optional<Sort> expected) {
    if (t.atom) {
      if (!is_symbol(t)) syntax(t, "expected a term, found '" + t.text + "'");
      if (expected) constrain(t.text, *expected);
      return;
    }
    const std::string& h = t.head();
    if (h == "proj") {
      if (t.items.size() < 3) syntax(t, "proj needs a base and at least one argument");
      const int m = static_cast<int>(t.items.size()) - 2;
      for (int i = 0; i < m; ++i) infer_term(t.items[2 + i], Sort::object());
      std::optional<Sort> base;
      if (expected && expected->is_concept()) base = Sort::conc(expected->arity() + m);
      infer_term(t.items[1], base);
      return;
    }
    if (h == "abs") {
      if (t.items.size() != 3 || !t.items[1].atom) syntax(t, "abs takes an id and one term");
      if (const AbstractionSymbol* s = sig_.find(t.items[1].text)) {
        infer_term(t.items[2], Sort::conc(s->arity));
      } else {
        if (opts_.strict_symbols) unknown_symbol(t.items[1]);
        infer_term(t.items[2], std::nullopt);
      }
      return;
    }
    syntax(t, "expected a term");
  }

  void infer_formula(const SExpr& e) {
    if (e.atom) syntax(e, "expected a formula, found '" + e.text + "'");
    const std::string& h = e.head();
    if (h == "forall" || h == "exists") {
      if (e.items.size() != 3 || !e.items[1].is_list() || e.items[1].items.size() != 2 ||
          !is_symbol(e.items[1].items[0]))
        syntax(e, h + " expects (" + h + " (v S) body)");
      Sort s = parse_sort(e.items[1].items[1]);
      scope_.push(e.items[1].items[0].text, s);
      infer_formula(e.items[2]);
      scope_.pop();
      return;
    }
    if (h == "and" || h == "or" || h == "implies" || h == "iff") {
      if (e.items.size() != 3) syntax(e, h + " takes two formulas");
      infer_formula(e.items[1]);
      infer_formula(e.items[2]);
      return;
    }
    if (h == "not") {
      if (e.items.size() != 2) syntax(e, "not takes one formula");
      infer_formula(e.items[1]);
      return;
    }
    if (h == "pred") {
      if (e.items.size() < 3) syntax(e, "pred needs a relation and at least one argument");
      const int n = static_cast<int>(e.items.size()) - 2;
      for (int i = 0; i < n; ++i) infer_term(e.items[2 + i], Sort::object());
      infer_term(e.items[1], Sort::conc(n));
      return;
    }
    if (h == "=") {
      if (e.items.size() != 3) syntax(e, "= takes two terms");
      infer_term(e.items[1], std::nullopt);
      infer_term(e.items[2], std::nullopt);
      pending_eqs_.push_back({&e.items[1], &e.items[2], snapshot()});
      return;
    }
    syntax(e, "unknown formula head '" + (h.empty() ? to_string(e) : h) + "'");
  }

  struct PendingEq {
    const SExpr* a;
    const SExpr* b;
    Scope scope;
  };

  Scope snapshot() const { return scope_; }

  void resolve_eqs() {
    std::vector<PendingEq> rest;
    for (auto& p : pending_eqs_) {
      Scope saved = scope_;
      scope_ = p.scope;
      auto ka = known(*p.a);
      auto kb = known(*p.b);
      bool done = false;
      if (ka && !kb && p.b->atom) {
        constrain(p.b->text, *ka);
        done = true;
      } else if (kb && !ka && p.a->atom) {
        constrain(p.a->text, *kb);
        done = true;
      } else if (ka || kb) {
        done = true;
      }
      scope_ = saved;
      if (!done) rest.push_back(std::move(p));
    }
    pending_eqs_ = std::move(rest);
  }

  // ---- pass 2: construction ----

  Sort free_sort(const std::string& name) const {
    if (auto it = opts_.free_sorts.find(name); it != opts_.free_sorts.end()) return it->second;
    if (auto it = inferred_.find(name); it != inferred_.end()) return it->second;
    return default_sort(name);
  }

  Term build_term(const SExpr& t) {
    if (t.atom) {
      if (auto s = scope_.find(t.text)) return Term::var(Var{t.text, *s});
      return Term::var(Var{t.text, free_sort(t.text)});
    }
    if (t.head() == "proj") {
      std::vector<Term> args;
      for (std::size_t i = 2; i < t.items.size(); ++i) args.push_back(build_term(t.items[i]));
      return Term::proj(build_term(t.items[1]), std::move(args));
    }
    // abs
    Term arg = build_term(t.items[2]);
    int arity;
    if (const AbstractionSymbol* s = sig_.find(t.items[1].text)) {
      arity = s->arity;
    } else {
      arity = arg.sort().is_concept() ? arg.sort().arity() : 1;
    }
    return Term::abs(t.items[1].text, arity, std::move(arg));
  }

  Formula build_formula(const SExpr& e) {
    const std::string& h = e.head();
    if (h == "forall" || h == "exists") {
      Var v{e.items[1].items[0].text, parse_sort(e.items[1].items[1])};
      scope_.push(v.name, v.sort);
      Formula body = build_formula(e.items[2]);
      scope_.pop();
      return h == "forall" ? Formula::forall(v, std::move(body))
                           : Formula::exists(v, std::move(body));
    }
    if (h == "and") return Formula::conj(build_formula(e.items[1]), build_formula(e.items[2]));
    if (h == "or") return Formula::disj(build_formula(e.items[1]), build_formula(e.items[2]));
    if (h == "implies")
      return Formula::implies(build_formula(e.items[1]), build_formula(e.items[2]));
    if (h == "iff") return Formula::iff(build_formula(e.items[1]), build_formula(e.items[2]));
    if (h == "not") return Formula::neg(build_formula(e.items[1]));
    if (h == "pred") {
      std::vector<Term> args;
      for (std::size_t i = 2; i < e.items.size(); ++i) args.push_back(build_term(e.items[i]));
      return Formula::pred(build_term(e.items[1]), std::move(args));
    }
    return Formula::eq(build_term(e.items[1]), build_term(e.items[2]));
  }

  const Signature& sig_;
  const ParseOptions& opts_;
  Scope scope_;
  std::map<std::string, Sort> inferred_;
  std::vector<PendingEq> pending_eqs_;
};

void print_term_to(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out += t.as_var().name;
      return;
    case Term::Kind::Proj:
      out += "(proj ";
      print_term_to(t.base(), out);
      for (const Term& a : t.args()) {
        out += ' ';
        print_term_to(a, out);
      }
      out += ')';
      return;
    case Term::Kind::Abs:
      out += "(abs ";
      out += t.symbol();
      out += ' ';
      print_term_to(t.arg(), out);
      out += ')';
      return;
  }
}

void print_formula_to(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      out += "(pred ";
      print_term_to(f.rel(), out);
      for (const Term& a : f.args()) {
        out += ' ';
        print_term_to(a, out);
      }
      out += ')';
      return;
    case Formula::Kind::Eq:
      out += "(= ";
      print_term_to(f.lhs(), out);
      out += ' ';
      print_term_to(f.rhs(), out);
      out += ')';
      return;
    case Formula::Kind::Not:
      out += "(not ";
      print_formula_to(f.body(), out);
      out += ')';
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      out += f.kind() == Formula::Kind::Forall ? "(forall (" : "(exists (";
      out += f.bound().name;
      out += ' ';
      out += print_sort(f.bound().sort);
      out += ") ";
      print_formula_to(f.body(), out);
      out += ')';
      return;
    default: {
      const char* w = f.kind() == Formula::Kind::And       ? "(and "
                      : f.kind() == Formula::Kind::Or      ? "(or "
                      : f.kind() == Formula::Kind::Implies ? "(implies "
                                                           : "(iff ";
      out += w;
      print_formula_to(f.left(), out);
      out += ' ';
      print_formula_to(f.right(), out);
      out += ')';
      return;
    }
  }
}

}  // namespace

Sort parse_sort(const SExpr& e) {
  if (e.is_atom("Obj")) return Sort::object();
  if (e.is_list() && e.items.size() == 2 && e.items[0].is_atom("Conc") && e.items[1].atom) {
    const std::string& n = e.items[1].text;
    bool digits = !n.empty();
    for (char c : n) digits = digits && std::isdigit(static_cast<unsigned char>(c));
    if (digits && n.size() < 4) {
      int k = std::stoi(n);
      if (k >= 1) return Sort::conc(k);
    }
    syntax(e, "concept arity must be a positive integer");
  }
  syntax(e, "expected a sort (Obj or (Conc n)), found " + to_string(e));
}

Formula formula_from_sexpr(const SExpr& e, const Signature& sig, const ParseOptions& opts) {
  Elaborator el(sig, opts);
  return el.formula(e);
}

Formula parse_formula(std::string_view text, const Signature& sig, const ParseOptions& opts) {
  return formula_from_sexpr(read_sexpr(text), sig, opts);
}

Term term_from_sexpr(const SExpr& e, const Signature& sig, const ParseOptions& opts) {
  Elaborator el(sig, opts);
  return el.term(e);
}

Term parse_term(std::string_view text, const Signature& sig, const ParseOptions& opts) {
  return term_from_sexpr(read_sexpr(text), sig, opts);
}

std::string print_sort(Sort s) { return s.str(); }

std::string print_term(const Term& t) {
  std::string out;
  print_term_to(t, out);
  return out;
}

std::string print_formula(const Formula& f) {
  std::string out;
  out.reserve(f.size() * 8);
  print_formula_to(f, out);
  return out;
}

std::map<std::string, Sort> inferred_free_sorts(const Formula& f, const Signature& sig) {
  ParseOptions opts;
  opts.strict_symbols = false;
  Formula back = parse_formula(print_formula(f), sig, opts);
  std::map<std::string, Sort> out;
  for (const Var& v : back.free_vars()) out.emplace(v.name, v.sort);
  return out;
}

std::string print_sof(const Formula& f) {
  std::string head;
  Signature none;
  auto guessed = inferred_free_sorts(f, none);
  for (const Var& v : f.free_vars()) {
    auto it = guessed.find(v.name);
    if (it == guessed.end() || it->second != v.sort) {
      if (head.empty()) head = "(declare";
      head += " (" + v.name + " " + print_sort(v.sort) + ")";
    }
  }
  if (!head.empty()) head += ")\n";
  return head + print_formula(f) + "\n";
}

Formula parse_sof(std::string_view text, const Signature& sig, const ParseOptions& opts) {
  auto forms = read_sexprs(text);
  ParseOptions local = opts;
  const SExpr* formula = nullptr;
  for (const SExpr& e : forms) {
    if (e.head() == "declare") {
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        const SExpr& d = e.items[i];
        if (!d.is_list() || d.items.size() != 2 || !is_symbol(d.items[0]))
          syntax(d, "declare expects (v S) entries");
        local.free_sorts[d.items[0].text] = parse_sort(d.items[1]);
      }
      continue;
    }
    if (formula) syntax(e, "a .sof file holds exactly one formula");
    formula = &e;
  }
  if (!formula) throw Error(ErrorKind::Syntax, "no formula found");
  return formula_from_sexpr(*formula, sig, local);
}

}  // namespace pft
