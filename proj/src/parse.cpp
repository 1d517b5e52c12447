#include "pru/parse.hpp"

#include <cctype>

namespace pru {

namespace {

constexpr long kMaxInt = 1000000000;

struct Token {
  enum Type { LParen, RParen, Symbol, Int, End } type;
  std::string text;
  long value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token &peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      step();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_ = {Token::End, "", 0, line_, col_};
      return;
    }
    char c = text_[pos_];
    if (c == '(') {
      step();
      tok_ = {Token::LParen, "(", 0, tok_.line, tok_.col};
      return;
    }
    if (c == ')') {
      step();
      tok_ = {Token::RParen, ")", 0, tok_.line, tok_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_];
        step();
      }
      if (digits.size() > 10)
        throw ParseError("integer too large", tok_.line, tok_.col);
      long v = std::stol(digits);
      if (v > kMaxInt)
        throw ParseError("integer too large", tok_.line, tok_.col);
      tok_ = {Token::Int, digits, v, tok_.line, tok_.col};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string sym;
      while (pos_ < text_.size() &&
             std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
        sym += text_[pos_];
        step();
      }
      tok_ = {Token::Symbol, sym, 0, tok_.line, tok_.col};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_,
                     col_);
  }

  void step() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Term run() {
    Term t = term();
    const Token &end = lex_.peek();
    if (end.type != Token::End)
      throw ParseError("trailing input after term", end.line, end.col);
    return t;
  }

private:
  Term term() {
    Token t = lex_.take();
    if (t.type == Token::Symbol) {
      if (t.text == "z")
        return Term::z();
      if (t.text == "s")
        return Term::s();
      throw ParseError("unknown symbol '" + t.text + "'", t.line, t.col);
    }
    if (t.type != Token::LParen)
      throw ParseError("expected a term, got '" + describe(t) + "'", t.line,
                       t.col);
    Token head = lex_.take();
    if (head.type != Token::Symbol)
      throw ParseError("expected an operator after '('", head.line, head.col);
    Term result = form(head);
    Token close = lex_.take();
    if (close.type != Token::RParen)
      throw ParseError("expected ')'", close.line, close.col);
    return result;
  }

  Term form(const Token &head) {
    const std::string &op = head.text;
    if (op == "pi") {
      int w = integer("projection width");
      int i = integer("projection index");
      if (i < 1 || i > w)
        throw ParseError("projection index " + std::to_string(i) +
                             " out of range [1, " + std::to_string(w) + "]",
                         head.line, head.col);
      return Term::proj(w, i);
    }
    if (op == "comp") {
      Term g = term();
      Term f = term();
      return Term::comp(g, f);
    }
    if (op == "rec") {
      Term f = term();
      Term g = term();
      return Term::rec(f, g);
    }
    if (op == "pair") {
      Term f = term();
      Term g = term();
      return Term::pair(f, g);
    }
    if (op == "id")
      return identity(integer("identity width"));
    if (op == "diag")
      return diagonal(integer("diagonal width"));
    if (op == "tw") {
      int a = integer("twist block");
      int b = integer("twist block");
      return twist(a, b);
    }
    if (op == "proj") {
      int w = integer("projection width");
      std::vector<int> outs;
      while (lex_.peek().type == Token::Int)
        outs.push_back(integer("projection output"));
      if (outs.empty())
        throw ParseError("(proj ...) needs at least one output index",
                         head.line, head.col);
      return multi_proj(w, outs);
    }
    if (op == "prod") {
      Term f = term();
      Term g = term();
      return product(f, g);
    }
    throw ParseError("unknown operator '" + op + "'", head.line, head.col);
  }

  int integer(const char *what) {
    Token t = lex_.take();
    if (t.type != Token::Int)
      throw ParseError(std::string("expected ") + what + ", got '" +
                           describe(t) + "'",
                       t.line, t.col);
    return static_cast<int>(t.value);
  }

  static std::string describe(const Token &t) {
    switch (t.type) {
    case Token::End:
      return "end of input";
    default:
      return t.text;
    }
  }

  Lexer lex_;
};

} // namespace

Term parse(std::string_view text) { return Parser(text).run(); }

} // namespace pru
