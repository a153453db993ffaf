#include "catmip/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "catmip/errors.hpp"

namespace catmip {

namespace {

enum class Tok {
  True,
  Cat,
  Aug,
  Limit,
  F,
  G,
  U,
  Bang,
  Amp,
  Pipe,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  String,
  Int,
  End,
};

struct Token {
  Tok kind;
  std::string text;  // String: unquoted content; Int: digits
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      int line = line_, col = col_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      char c = text_[pos_];
      if (c == '"') {
        out.push_back({Tok::String, read_string(), line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back({Tok::Int, read_digits(), line, col});
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word = read_word();
        out.push_back({keyword(word, line, col), word, line, col});
      } else {
        advance();
        switch (c) {
          case '!': out.push_back({Tok::Bang, "!", line, col}); break;
          case '&': out.push_back({Tok::Amp, "&", line, col}); break;
          case '|': out.push_back({Tok::Pipe, "|", line, col}); break;
          case '(': out.push_back({Tok::LParen, "(", line, col}); break;
          case ')': out.push_back({Tok::RParen, ")", line, col}); break;
          case '[': out.push_back({Tok::LBracket, "[", line, col}); break;
          case ']': out.push_back({Tok::RBracket, "]", line, col}); break;
          case ',': out.push_back({Tok::Comma, ",", line, col}); break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'",
                             line, col);
        }
      }
    }
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

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      advance();
    }
  }

  std::string read_string() {
    int line = line_, col = col_;
    advance();  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
      out += text_[pos_];
      advance();
    }
    if (pos_ >= text_.size() || text_[pos_] != '"') {
      throw ParseError("unterminated string literal", line, col);
    }
    advance();  // closing quote
    return out;
  }

  std::string read_digits() {
    std::string out;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      out += text_[pos_];
      advance();
    }
    return out;
  }

  std::string read_word() {
    std::string out;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      out += text_[pos_];
      advance();
    }
    return out;
  }

  Tok keyword(const std::string& word, int line, int col) {
    if (word == "TRUE") return Tok::True;
    if (word == "CAT") return Tok::Cat;
    if (word == "aug") return Tok::Aug;
    if (word == "limit") return Tok::Limit;
    if (word == "F") return Tok::F;
    if (word == "G") return Tok::G;
    if (word == "U") return Tok::U;
    throw ParseError("unknown word '" + word + "'", line, col);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::set<std::string>& labels,
         const std::set<std::string>& capabilities)
      : toks_(std::move(tokens)), labels_(labels), caps_(capabilities) {}

  FormulaPtr run() {
    FormulaPtr f = parse_until();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.line, at.col);
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) {
      fail("expected " + what + ", got '" + describe(peek()) + "'", peek());
    }
    return take();
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    if (t.kind == Tok::String) return "\"" + t.text + "\"";
    return t.text;
  }

  // Weakest binding level; right-associative.
  FormulaPtr parse_until() {
    FormulaPtr lhs = parse_or();
    if (peek().kind == Tok::U) {
      take();
      Interval w = parse_window();
      FormulaPtr rhs = parse_until();
      return Formula::until(std::move(lhs), w, std::move(rhs));
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (peek().kind == Tok::Pipe) {
      take();
      f = Formula::disj(std::move(f), parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_prefix();
    while (peek().kind == Tok::Amp) {
      take();
      f = Formula::conj(std::move(f), parse_prefix());
    }
    return f;
  }

  FormulaPtr parse_prefix() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Bang:
        take();
        return Formula::negation(parse_prefix());
      case Tok::F: {
        take();
        Interval w = parse_window();
        return Formula::eventually(w, parse_prefix());
      }
      case Tok::G: {
        take();
        Interval w = parse_window();
        return Formula::always(w, parse_prefix());
      }
      default:
        return parse_primary();
    }
  }

  FormulaPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::True:
        take();
        return Formula::truth();
      case Tok::Cat:
        return parse_cat();
      case Tok::LParen: {
        take();
        FormulaPtr f = parse_until();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        fail("expected a formula, got '" + describe(t) + "'", t);
    }
  }

  Interval parse_window() {
    expect(Tok::LBracket, "'['");
    const Token& lo_tok = expect(Tok::Int, "integer");
    int lo = to_int(lo_tok);
    expect(Tok::Comma, "','");
    const Token& hi_tok = expect(Tok::Int, "integer");
    int hi = to_int(hi_tok);
    if (hi < lo) {
      fail("window upper bound " + std::to_string(hi) +
               " below lower bound " + std::to_string(lo),
           hi_tok);
    }
    expect(Tok::RBracket, "']'");
    return {lo, hi};
  }

  int to_int(const Token& t) const {
    if (t.text.size() > 9) fail("integer too large", t);
    return std::stoi(t.text);
  }

  FormulaPtr parse_cat() {
    const Token& cat_tok = expect(Tok::Cat, "'CAT'");
    expect(Tok::LParen, "'('");
    CatAtom atom;
    if (peek().kind == Tok::Bang) {
      take();
      atom.target.negated = true;
    }
    const Token& label_tok = expect(Tok::String, "label string");
    atom.target.label = label_tok.text;
    if (!labels_.count(atom.target.label)) {
      fail("label \"" + atom.target.label + "\" is not declared", label_tok);
    }
    if (peek().kind == Tok::Comma) {
      take();
      if (peek().kind == Tok::Limit) {
        fail("limit clause requires an aug clause before it", peek());
      }
      expect(Tok::Aug, "'aug'");
      atom.aug = parse_qcap("aug");
      if (peek().kind == Tok::Comma) {
        take();
        expect(Tok::Limit, "'limit'");
        atom.limit = parse_qcap("limit");
      }
    }
    expect(Tok::RParen, "')'");
    try {
      return Formula::cat(std::move(atom));
    } catch (const Error& e) {
      fail(e.what(), cat_tok);
    }
  }

  CapClause parse_qcap(const std::string& what) {
    expect(Tok::LParen, "'('");
    const Token& cap_tok = expect(Tok::String, "capability string");
    CapClause clause;
    clause.capability = cap_tok.text;
    if (!caps_.count(clause.capability)) {
      fail("capability \"" + clause.capability + "\" is not declared",
           cap_tok);
    }
    expect(Tok::Comma, "','");
    const Token& n_tok = expect(Tok::Int, "integer");
    clause.threshold = to_int(n_tok);
    if (clause.threshold < 1) {
      fail(what + " threshold must be at least 1", n_tok);
    }
    expect(Tok::RParen, "')'");
    return clause;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::set<std::string>& labels_;
  const std::set<std::string>& caps_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text,
                         const std::set<std::string>& labels,
                         const std::set<std::string>& capabilities) {
  Lexer lexer(text);
  Parser parser(lexer.run(), labels, capabilities);
  return parser.run();
}

}  // namespace catmip
