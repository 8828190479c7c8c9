#include "pft/sexpr.hpp"

#include "pft/error.hpp"

namespace pft {

namespace {

const std::string kEmpty;

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < text_.size()) {
      out.push_back(one());
      skip();
    }
    return out;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Syntax,
                std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg);
  }

  SExpr one() {
    SExpr e;
    e.line = line_;
    e.col = col_;
    char c = text_[pos_];
    if (c == ')') fail("unexpected ')'");
    if (c == '(') {
      advance();
      e.items.reserve(4);
      for (;;) {
        skip();
        if (pos_ >= text_.size()) {
          throw Error(ErrorKind::Syntax, std::to_string(e.line) + ":" + std::to_string(e.col) +
                                             ": unbalanced '('");
        }
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(one());
      }
      return e;
    }
    e.atom = true;
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\n' || d == '\r')
        break;
      ++pos_;
    }
    col_ += static_cast<int>(pos_ - start);  // atoms never span lines
    e.text.assign(text_.substr(start, pos_ - start));
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

void print(const SExpr& e, std::string& out) {
  if (e.atom) {
    out += e.text;
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    print(e.items[i], out);
  }
  out += ')';
}

}  // namespace

const std::string& SExpr::head() const {
  if (atom || items.empty() || !items.front().atom) return kEmpty;
  return items.front().text;
}

std::string SExpr::where() const { return std::to_string(line) + ":" + std::to_string(col); }

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).all(); }

SExpr read_sexpr(std::string_view text) {
  auto all = read_sexprs(text);
  if (all.size() != 1)
    throw Error(ErrorKind::Syntax, "expected exactly one expression, found " +
                                       std::to_string(all.size()));
  return std::move(all.front());
}

std::string to_string(const SExpr& e) {
  std::string out;
  print(e, out);
  return out;
}

}  // namespace pft
