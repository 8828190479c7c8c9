#include "pft/model.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <unordered_map>

#include "pft/error.hpp"
#include "pft/parse.hpp"

namespace pft {

int tuple_count(int d, int arity) {
  int n = 1;
  for (int i = 0; i < arity; ++i) {
    n *= d;
    if (n > 63) throw Error(ErrorKind::CapExceeded, "too many tuples for a bitmask extension");
  }
  return n;
}

Mask extension_count(int d, int arity) {
  int t = tuple_count(d, arity);
  if (t > 9)
    throw Error(ErrorKind::CapExceeded, "concepts of arity " + std::to_string(arity) + " over " +
                                            std::to_string(d) + " atoms exceed the enumeration cap");
  return Mask{1} << t;
}

std::string format_extension(Mask m, int arity, int d) {
  const int t = tuple_count(d, arity);
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < t; ++i) {
    if (!(m >> i & 1)) continue;
    if (!first) out += ",";
    first = false;
    std::string tup;
    int rest = i;
    for (int k = 0; k < arity; ++k) {
      tup.insert(0, std::to_string(rest % d));
      if (k + 1 < arity) tup.insert(0, " ");
      rest /= d;
    }
    out += arity == 1 ? tup : "(" + tup + ")";
  }
  return out + "}";
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<Mask>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (Mask m : v) {
      h ^= m + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// A formula compiled against a fixed structure, with variables resolved to
// slots. Copies are independent (each carries its own scratch and memo).
class Program {
 public:
  Program(const Structure& s, const std::optional<Formula>& f, const std::vector<Var>& free_order)
      : d_(s.d), s_(&s) {
    if (d_ < 1) throw Error(ErrorKind::Unsupported, "domain size must be at least 1");
    for (const Var& v : free_order) {
      scope_.push_back({v, static_cast<int>(nslots_)});
      ++nslots_;
    }
    nfree_ = nslots_;
    if (f) root_ = compile(*f);
    slots_.assign(nslots_, 0);
  }

  bool run(const Mask* free_values) {
    std::copy(free_values, free_values + nfree_, slots_.begin());
    return ev(root_);
  }

  Mask run_term(const Term& t, const Mask* free_values) {
    int code = compile_term(t);
    slots_.resize(nslots_);
    std::copy(free_values, free_values + nfree_, slots_.begin());
    return tv(code);
  }

 private:
  struct TCode {
    Term::Kind kind;
    int slot = -1;
    int arity = 0;  // result arity; 0 for objects
    std::vector<int> args;
    std::string symbol;
    const std::map<Mask, int>* table = nullptr;
  };
  struct FCode {
    Formula::Kind kind;
    int a = -1, b = -1;
    int rel = -1;
    std::vector<int> terms;
    int slot = -1;
    Mask count = 0;
    bool memo = false;
    std::vector<int> free_slots;
    std::unordered_map<std::vector<Mask>, bool, VecHash> cache;
  };

  int lookup(const Var& v) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == v) return it->second;
    throw Error(ErrorKind::UnboundVariable, "no value for free variable " + v.name);
  }

  int compile_term(const Term& t) {
    TCode c;
    c.kind = t.kind();
    c.arity = t.sort().is_valid() ? t.sort().arity() : 0;
    if (!t.sort().is_valid()) throw Error(ErrorKind::SortMismatch, "ill-sorted projection");
    switch (t.kind()) {
      case Term::Kind::Var:
        c.slot = lookup(t.as_var());
        break;
      case Term::Kind::Proj:
        c.args.push_back(compile_term(t.base()));
        for (const Term& a : t.args()) c.args.push_back(compile_term(a));
        tuple_count(d_, t.base().sort().arity());
        break;
      case Term::Kind::Abs: {
        c.args.push_back(compile_term(t.arg()));
        c.symbol = t.symbol();
        auto it = s_->abstraction.find(t.symbol());
        if (it != s_->abstraction.end()) c.table = &it->second;
        break;
      }
    }
    tcodes_.push_back(std::move(c));
    return static_cast<int>(tcodes_.size()) - 1;
  }

  int compile(const Formula& f) {
    FCode c;
    c.kind = f.kind();
    switch (f.kind()) {
      case Formula::Kind::Pred: {
        c.rel = compile_term(f.rel());
        tuple_count(d_, f.rel().sort().arity());
        for (const Term& t : f.args()) c.terms.push_back(compile_term(t));
        break;
      }
      case Formula::Kind::Eq:
        c.terms.push_back(compile_term(f.lhs()));
        c.terms.push_back(compile_term(f.rhs()));
        break;
      case Formula::Kind::Not:
        c.a = compile(f.body());
        break;
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies:
      case Formula::Kind::Iff:
        c.a = compile(f.left());
        c.b = compile(f.right());
        break;
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        const Var& v = f.bound();
        c.count = v.sort.is_object() ? static_cast<Mask>(d_) : extension_count(d_, v.sort.arity());
        c.slot = static_cast<int>(nslots_++);
        scope_.push_back({v, c.slot});
        c.a = compile(f.body());
        scope_.pop_back();
        if (f.has_concept_quantifier()) {
          c.memo = true;
          for (const Var& fv : f.free_vars()) c.free_slots.push_back(lookup(fv));
        }
        break;
      }
    }
    fcodes_.push_back(std::move(c));
    return static_cast<int>(fcodes_.size()) - 1;
  }

  Mask tv(int i) {
    const TCode& c = tcodes_[i];
    switch (c.kind) {
      case Term::Kind::Var:
        return slots_[c.slot];
      case Term::Kind::Proj: {
        Mask base = tv(c.args[0]);
        int p = 0;
        for (std::size_t k = 1; k < c.args.size(); ++k) p = p * d_ + static_cast<int>(tv(c.args[k]));
        int width = tuple_count(d_, c.arity);
        Mask low = width >= 64 ? ~Mask{0} : (Mask{1} << width) - 1;
        return (base >> (p * width)) & low;
      }
      case Term::Kind::Abs: {
        Mask arg = tv(c.args[0]);
        if (c.table) {
          auto it = c.table->find(arg);
          if (it != c.table->end()) return static_cast<Mask>(it->second);
        }
        throw Error(ErrorKind::UnsupportedAbstractionTerm,
                    "abstraction " + c.symbol + " undefined on " +
                        format_extension(arg, tcodes_[c.args[0]].arity, d_));
      }
    }
    return 0;
  }

  bool ev(int i) {
    FCode& c = fcodes_[i];
    switch (c.kind) {
      case Formula::Kind::Pred: {
        Mask r = tv(c.rel);
        int idx = 0;
        for (int t : c.terms) idx = idx * d_ + static_cast<int>(tv(t));
        return r >> idx & 1;
      }
      case Formula::Kind::Eq:
        return tv(c.terms[0]) == tv(c.terms[1]);
      case Formula::Kind::Not:
        return !ev(c.a);
      case Formula::Kind::And:
        return ev(c.a) && ev(c.b);
      case Formula::Kind::Or:
        return ev(c.a) || ev(c.b);
      case Formula::Kind::Implies:
        return !ev(c.a) || ev(c.b);
      case Formula::Kind::Iff:
        return ev(c.a) == ev(c.b);
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        std::vector<Mask> key;
        if (c.memo) {
          key.reserve(c.free_slots.size());
          for (int s : c.free_slots) key.push_back(slots_[s]);
          auto it = c.cache.find(key);
          if (it != c.cache.end()) return it->second;
        }
        const bool univ = c.kind == Formula::Kind::Forall;
        bool result = univ;
        for (Mask v = 0; v < c.count; ++v) {
          slots_[c.slot] = v;
          if (ev(c.a) != univ) {
            result = !univ;
            break;
          }
        }
        if (c.memo) {
          FCode& cc = fcodes_[i];
          if (cc.cache.size() > (1u << 20)) cc.cache.clear();
          cc.cache.emplace(std::move(key), result);
        }
        return result;
      }
    }
    return false;
  }

  int d_;
  const Structure* s_;
  std::size_t nslots_ = 0;
  std::size_t nfree_ = 0;
  std::vector<std::pair<Var, int>> scope_;
  std::vector<TCode> tcodes_;
  std::vector<FCode> fcodes_;
  int root_ = -1;
  std::vector<Mask> slots_;
};

std::vector<Mask> env_values(const Env& env, std::vector<Var>& order) {
  std::vector<Mask> vals;
  for (const auto& [v, m] : env) {
    order.push_back(v);
    vals.push_back(m);
  }
  return vals;
}

unsigned worker_count(std::size_t jobs) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

// Runs body(i, worker) for i in [0, n); errors are rethrown on the caller.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t, unsigned)>& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; !failed && (i = next++) < n;) body(i, w);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::string describe(const std::vector<Var>& vars, const std::vector<Mask>& vals, int d) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += " ";
    out += vars[i].name + "=";
    out += vars[i].sort.is_object() ? std::to_string(vals[i])
                                    : format_extension(vals[i], vars[i].sort.arity(), d);
  }
  return out;
}

void split_conj(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == Formula::Kind::And) {
    split_conj(f.left(), out);
    split_conj(f.right(), out);
  } else {
    out.push_back(f);
  }
}

}  // namespace

bool eval(const Structure& s, const Env& env, const Formula& f) {
  std::vector<Var> order;
  std::vector<Mask> vals = env_values(env, order);
  Program p(s, f, order);
  return p.run(vals.data());
}

Mask eval_term(const Structure& s, const Env& env, const Term& t) {
  std::vector<Var> order;
  std::vector<Mask> vals = env_values(env, order);
  Program p(s, std::nullopt, order);
  return p.run_term(t, vals.data());
}

bool holds_universally(const Structure& s, const Formula& f, std::string* counterexample) {
  std::vector<Var> vars(f.free_vars().begin(), f.free_vars().end());
  std::set<std::string> used = all_names(f);
  std::vector<Formula> hyps;
  Formula cur = f;
  for (;;) {
    if (cur.kind() == Formula::Kind::Forall) {
      Var v = cur.bound();
      Formula body = cur.body();
      bool clash = std::any_of(vars.begin(), vars.end(), [&](const Var& w) { return w.name == v.name; });
      if (clash) {
        Var nv{fresh_name(v.name, used), v.sort};
        used.insert(nv.name);
        body = substitute(body, v, Term::var(nv));
        v = nv;
      }
      vars.push_back(v);
      cur = body;
    } else if (cur.kind() == Formula::Kind::Implies) {
      split_conj(cur.left(), hyps);
      cur = cur.right();
    } else {
      break;
    }
  }
  std::stable_sort(vars.begin(), vars.end(),
                   [](const Var& a, const Var& b) { return a.sort.arity() < b.sort.arity(); });
  const std::size_t k = vars.size();
  std::vector<Mask> counts(k);
  for (std::size_t i = 0; i < k; ++i)
    counts[i] = vars[i].sort.is_object() ? static_cast<Mask>(s.d) : extension_count(s.d, vars[i].sort.arity());

  // Hypotheses are checked as soon as their last variable is assigned.
  std::vector<std::vector<Program>> at(k + 1);
  for (const Formula& h : hyps) {
    std::size_t last = 0;
    for (const Var& v : h.free_vars()) {
      auto it = std::find(vars.begin(), vars.end(), v);
      last = std::max<std::size_t>(last, static_cast<std::size_t>(it - vars.begin()) + 1);
    }
    at[last].emplace_back(s, h, vars);
  }
  Program concl(s, cur, vars);

  std::vector<Mask> vals(k, 0);
  std::function<bool(std::size_t)> dfs = [&](std::size_t i) -> bool {
    for (Program& p : at[i])
      if (!p.run(vals.data())) return true;
    if (i == k) {
      if (concl.run(vals.data())) return true;
      if (counterexample) *counterexample = describe(vars, vals, s.d);
      return false;
    }
    for (Mask v = 0; v < counts[i]; ++v) {
      vals[i] = v;
      if (!dfs(i + 1)) return false;
    }
    return true;
  };
  return dfs(0);
}

std::vector<std::vector<bool>> equiv_matrix(const EquivDef& e, int d) {
  if (e.body.has_abstraction())
    throw Error(ErrorKind::UnsupportedAbstractionTerm, "equivalence formulas must be abstraction-free");
  for (const Var& v : e.body.free_vars())
    if (!(v == e.left) && !(v == e.right))
      throw Error(ErrorKind::BadFreeVariables, "extra free variable " + v.name);
  const Mask n = extension_count(d, e.arity());
  Structure s{d, {}};
  std::vector<Var> order{e.left, e.right};
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n));
  unsigned workers = worker_count(n);
  std::vector<std::optional<Program>> progs(workers);
  parallel_for(n, workers, [&](std::size_t r, unsigned w) {
    if (!progs[w]) progs[w].emplace(s, e.body, order);
    Mask vals[2] = {r, 0};
    for (Mask c = 0; c < n; ++c) {
      vals[1] = c;
      m[r][c] = progs[w]->run(vals);
    }
  });
  return m;
}

EquivReport check_equiv(const EquivDef& e, int d) {
  EquivReport rep;
  rep.d = d;
  rep.arity = e.arity();
  auto m = equiv_matrix(e, d);
  const std::size_t n = m.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>(words));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (m[r][c]) rows[r][c / 64] |= std::uint64_t{1} << (c % 64);

  rep.reflexive = true;
  for (std::size_t r = 0; r < n && rep.reflexive; ++r)
    if (!m[r][r]) {
      rep.reflexive = false;
      rep.reflexive_cex = {r};
    }
  rep.symmetric = true;
  for (std::size_t r = 0; r < n && rep.symmetric; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (m[r][c] && !m[c][r]) {
        rep.symmetric = false;
        rep.symmetric_cex = {r, c};
        break;
      }
  // E(R,S) and E(S,T) imply E(R,T): row(S) must be contained in row(R).
  rep.transitive = true;
  for (std::size_t r = 0; r < n && rep.transitive; ++r)
    for (std::size_t s = 0; s < n && rep.transitive; ++s) {
      if (!m[r][s]) continue;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t miss = rows[s][w] & ~rows[r][w];
        if (miss) {
          rep.transitive = false;
          std::size_t t = w * 64 + static_cast<std::size_t>(__builtin_ctzll(miss));
          rep.transitive_cex = {r, s, t};
          break;
        }
      }
    }
  if (rep.is_equivalence()) {
    std::vector<bool> seen(n);
    for (std::size_t r = 0; r < n; ++r) {
      if (seen[r]) continue;
      std::vector<Mask> cls;
      for (std::size_t c = 0; c < n; ++c)
        if (m[r][c]) {
          cls.push_back(c);
          seen[c] = true;
        }
      rep.classes.push_back(std::move(cls));
    }
    rep.class_count = static_cast<int>(rep.classes.size());
  }
  return rep;
}

AbstractionSearch search_abstraction(const EquivDef& e, int d) {
  if (e.arity() != 1) throw Error(ErrorKind::Unsupported, "abstraction search supports unary E only");
  if (d < 1 || d > 3) throw Error(ErrorKind::CapExceeded, "abstraction search needs 1 <= d <= 3");
  auto m = equiv_matrix(e, d);
  const std::size_t n = m.size();
  AbstractionSearch out;
  std::vector<int> map(n, 0);
  for (;;) {
    ++out.searched;
    bool good = true;
    for (std::size_t i = 0; i < n && good; ++i)
      for (std::size_t j = i; j < n; ++j)
        if ((map[i] == map[j]) != m[i][j]) {
          good = false;
          break;
        }
    if (good) {
      out.witness = map;
      return out;
    }
    std::size_t pos = 0;
    while (pos < n && ++map[pos] == d) map[pos++] = 0;
    if (pos == n) break;
  }
  return out;
}

ValidationReport validate_instances(const std::vector<Formula>& instances, int d_max) {
  ValidationReport rep;
  std::vector<std::vector<Falsifier>> found(instances.size());
  parallel_for(instances.size(), worker_count(instances.size()), [&](std::size_t i, unsigned) {
    for (int d = 1; d <= d_max; ++d) {
      std::string cex;
      if (!holds_universally(Structure{d, {}}, instances[i], &cex)) found[i].push_back({i, d, cex});
    }
  });
  rep.checked = instances.size() * static_cast<std::size_t>(std::max(d_max, 0));
  for (auto& f : found) rep.falsifiers.insert(rep.falsifiers.end(), f.begin(), f.end());
  return rep;
}

}  // namespace pft
