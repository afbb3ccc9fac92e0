#include <cctype>
#include <string>
#include <vector>

#include "zolab/error.hpp"
#include "zolab/formula.hpp"

namespace zolab {

namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  Comma,
  Dot,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Equals,
  Forall,
  Exists,
  True,
  False,
  DistGt,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view s) {
  struct Symbol {
    std::string_view spelling;
    Tok kind;
  };
  // Longest spellings first.
  static constexpr Symbol kSymbols[] = {
      {"<->", Tok::Iff},           {"->", Tok::Implies},        {"\xE2\x86\x94", Tok::Iff},
      {"\xE2\x86\x92", Tok::Implies}, {"\xE2\x88\xA7", Tok::And}, {"\xE2\x88\xA8", Tok::Or},
      {"\xC2\xAC", Tok::Not},      {"\xE2\x88\x80", Tok::Forall}, {"\xE2\x88\x83", Tok::Exists},
      {"(", Tok::LParen},          {")", Tok::RParen},          {",", Tok::Comma},
      {".", Tok::Dot},             {"~", Tok::Not},             {"!", Tok::Not},
      {"&", Tok::And},             {"|", Tok::Or},              {"=", Tok::Equals},
  };

  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (ident_start(c)) {
      const std::size_t start = i;
      while (i < s.size() && ident_char(s[i])) ++i;
      std::string word(s.substr(start, i - start));
      if (word == "dist" && i < s.size() && s[i] == '>') {
        ++i;
        out.push_back({Tok::DistGt, "dist>", start});
      } else if (word == "forall") {
        out.push_back({Tok::Forall, word, start});
      } else if (word == "exists") {
        out.push_back({Tok::Exists, word, start});
      } else if (word == "not") {
        out.push_back({Tok::Not, word, start});
      } else if (word == "true") {
        out.push_back({Tok::True, word, start});
      } else if (word == "false") {
        out.push_back({Tok::False, word, start});
      } else {
        out.push_back({Tok::Ident, std::move(word), start});
      }
      continue;
    }
    bool matched = false;
    for (const auto& sym : kSymbols) {
      if (s.substr(i, sym.spelling.size()) == sym.spelling) {
        out.push_back({sym.kind, std::string(sym.spelling), i});
        i += sym.spelling.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError(i, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(peek().pos, message); }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      fail(std::string("expected ") + what +
           (peek().kind == Tok::End ? " at end of input" : " before '" + peek().text + "'"));
    }
    return next();
  }

  Formula formula() {
    if (peek().kind == Tok::Forall || peek().kind == Tok::Exists) return quantified();
    return iff();
  }

  Formula quantified() {
    const bool universal = next().kind == Tok::Forall;
    std::string var = expect(Tok::Ident, "variable").text;
    expect(Tok::Dot, "'.'");
    Formula body = formula();
    return universal ? fo::forall(std::move(var), std::move(body))
                     : fo::exists(std::move(var), std::move(body));
  }

  Formula iff() {
    Formula lhs = implies();
    if (accept(Tok::Iff)) return fo::iff(std::move(lhs), operand_or(&Parser::iff));
    return lhs;
  }

  Formula implies() {
    Formula lhs = disjunction();
    if (accept(Tok::Implies)) return fo::implies(std::move(lhs), operand_or(&Parser::implies));
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (accept(Tok::Or)) lhs = fo::disj(std::move(lhs), operand_or(&Parser::conjunction));
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (accept(Tok::And)) lhs = fo::conj(std::move(lhs), unary());
    return lhs;
  }

  // A quantifier in operand position swallows the rest of the input.
  Formula operand_or(Formula (Parser::*rule)()) {
    if (peek().kind == Tok::Forall || peek().kind == Tok::Exists) return quantified();
    return (this->*rule)();
  }

  Formula unary() {
    if (accept(Tok::Not)) return fo::negate(unary());
    if (peek().kind == Tok::Forall || peek().kind == Tok::Exists) return quantified();
    if (accept(Tok::LParen)) {
      Formula inner = formula();
      expect(Tok::RParen, "')'");
      return inner;
    }
    return atom();
  }

  std::string variable() { return expect(Tok::Ident, "variable").text; }

  Formula atom() {
    if (accept(Tok::True)) return fo::top();
    if (accept(Tok::False)) return fo::bottom();
    if (accept(Tok::DistGt)) {
      expect(Tok::LParen, "'('");
      std::string v = variable();
      expect(Tok::Comma, "','");
      std::string w = variable();
      expect(Tok::Comma, "','");
      const Token& num = expect(Tok::Number, "distance bound");
      if (num.text.size() > 9) throw SyntaxError(num.pos, "distance bound too large");
      const int bound = std::stoi(num.text);
      expect(Tok::RParen, "')'");
      return fo::dist_gt(std::move(v), std::move(w), bound);
    }
    if (peek().kind != Tok::Ident) {
      fail(peek().kind == Tok::End ? "unexpected end of input"
                                   : "expected an atom before '" + peek().text + "'");
    }
    const Token& head = next();
    if (peek().kind == Tok::LParen) {
      const std::string& name = head.text;
      if (name == "C") {
        next();
        std::string v = variable();
        expect(Tok::RParen, "')'");
        return fo::color(std::move(v));
      }
      using Builder = Formula (*)(std::string, std::string);
      Builder build = nullptr;
      if (name == "U") build = fo::up;
      else if (name == "R") build = fo::right;
      else if (name == "D1") build = fo::diag1;
      else if (name == "D2") build = fo::diag2;
      if (build == nullptr) throw SyntaxError(head.pos, "unknown relation '" + name + "'");
      next();
      std::string v = variable();
      expect(Tok::Comma, "','");
      std::string w = variable();
      expect(Tok::RParen, "')'");
      return build(std::move(v), std::move(w));
    }
    expect(Tok::Equals, "'=' after variable");
    return fo::equal(head.text, variable());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(tokenize(text)).parse_all(); }

Formula parse_formula_file(std::string_view text) {
  std::string stripped;
  stripped.reserve(text.size());
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    stripped += comment ? ' ' : c;
  }
  return parse(stripped);
}

}  // namespace zolab
