#include "proto_tqtl/tqtl/parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <optional>

namespace proto_tqtl::tqtl {

namespace {

constexpr std::array kKeywords = {
    "true", "not", "and", "or", "until", "eventually", "always", "freeze", "exists", "forall",
    "at",   "in",  "class", "inclass", "S", "abs", "REAL", "FAKE", "T",
};

// Nesting limit; keeps adversarial input from exhausting the stack.
constexpr int kMaxDepth = 256;

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blank();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    return out;
  }

  SourceSpan here(std::size_t len = 1) const { return {line_, col_, len}; }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t start, SourceSpan span) {
    span.length = pos_ - start;
    return {kind, std::string(src_.substr(start, pos_ - start)), span};
  }

  Token next() {
    const std::size_t start = pos_;
    const SourceSpan span = here();
    const char c = peek();

    if (is_ident_start(c)) {
      while (is_ident_char(peek())) advance();
      while (peek() == '\'') advance();
      Token tok = make(TokenKind::Identifier, start, span);
      if (std::find(kKeywords.begin(), kKeywords.end(), tok.lexeme) != kKeywords.end()) {
        tok.kind = TokenKind::Keyword;
      }
      return tok;
    }

    if (is_digit(c)) {
      bool real = false;
      while (is_digit(peek())) advance();
      if (peek() == '.' && is_digit(peek(1))) {
        real = true;
        advance();
        while (is_digit(peek())) advance();
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
        real = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (is_digit(peek())) advance();
      }
      return make(real ? TokenKind::Real : TokenKind::Integer, start, span);
    }

    static constexpr std::array<std::string_view, 5> kTwoChar = {"->", "<=", ">=", "==", "!="};
    for (auto op : kTwoChar) {
      if (src_.substr(pos_, 2) == op) {
        advance();
        advance();
        return make(TokenKind::Operator, start, span);
      }
    }
    switch (c) {
      case '<':
      case '>':
      case '+':
      case '-': advance(); return make(TokenKind::Operator, start, span);
      case '(':
      case ')':
      case ',':
      case '.': advance(); return make(TokenKind::Punctuation, start, span);
      default: break;
    }
    throw ParseError(span, "unexpected character '" + describe_char(c) + "'");
  }

  static std::string describe_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x20 && u < 0x7f) return std::string(1, c);
    static constexpr char kHex[] = "0123456789abcdef";
    return std::string("\\x") + kHex[u >> 4] + kHex[u & 0xf];
  }
};

// ---------------------------------------------------------------------------

struct Operand {
  enum class Kind { Score, Time, Int } kind = Kind::Score;
  ScoreExpr score;
  TimeTerm time;
  std::int64_t int_value = 0;
  std::string int_lexeme;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, SourceSpan end_span) : toks_(std::move(tokens)) {
    toks_.push_back({TokenKind::End, "", end_span});
  }

  Formula run() {
    if (peek().kind == TokenKind::End) fail({"formula"}, "empty input");
    Formula f = parse_until();
    if (peek().kind != TokenKind::End) fail({"'until'", "'->'", "'or'", "'and'", "end of input"});
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        throw ParseError(p.peek().span, "nesting deeper than " + std::to_string(kMaxDepth));
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at(std::string_view lexeme) const {
    const Token& t = peek();
    return (t.kind == TokenKind::Keyword || t.kind == TokenKind::Operator ||
            t.kind == TokenKind::Punctuation) &&
           t.lexeme == lexeme;
  }
  bool accept(std::string_view lexeme) {
    if (!at(lexeme)) return false;
    take();
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected, std::string detail = {}) const {
    const Token& t = peek();
    if (detail.empty()) {
      detail = t.kind == TokenKind::End ? "unexpected end of input" : "unexpected '" + t.lexeme + "'";
    }
    throw ParseError(t.span, std::move(detail), std::move(expected));
  }

  void expect(std::string_view lexeme) {
    if (!accept(lexeme)) fail({"'" + std::string(lexeme) + "'"});
  }

  std::string expect_ident() {
    if (peek().kind != TokenKind::Identifier) fail({"identifier"});
    return take().lexeme;
  }

  Label expect_class() {
    if (accept("REAL")) return Label::Real;
    if (accept("FAKE")) return Label::Fake;
    fail({"'REAL'", "'FAKE'"});
  }

  static bool is_comparison(const Token& t) {
    if (t.kind != TokenKind::Operator) return false;
    return t.lexeme == "<" || t.lexeme == "<=" || t.lexeme == ">" || t.lexeme == ">=" ||
           t.lexeme == "==" || t.lexeme == "!=";
  }

  static Comparison comparison_of(const std::string& op) {
    if (op == "<") return Comparison::Lt;
    if (op == "<=") return Comparison::Le;
    if (op == ">") return Comparison::Gt;
    if (op == ">=") return Comparison::Ge;
    if (op == "==") return Comparison::Eq;
    return Comparison::Ne;
  }

  // -- formulas --------------------------------------------------------------

  Formula parse_until() {
    Formula lhs = parse_implies();
    while (accept("until")) lhs = until(std::move(lhs), parse_implies());
    return lhs;
  }

  Formula parse_implies() {
    DepthGuard guard(*this);
    Formula lhs = parse_or();
    if (accept("->")) return implies(std::move(lhs), parse_implies());
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (accept("or")) lhs = lor(std::move(lhs), parse_and());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (accept("and")) lhs = land(std::move(lhs), parse_unary());
    return lhs;
  }

  Formula parse_unary() {
    DepthGuard guard(*this);
    if (accept("not")) return lnot(parse_unary());
    if (accept("eventually")) return eventually(parse_unary());
    if (accept("always")) return always(parse_unary());
    if (accept("freeze")) {
      std::string var = expect_ident();
      expect(".");
      return freeze(std::move(var), parse_unary());
    }
    const bool is_exists = at("exists");
    if (is_exists || at("forall")) {
      take();
      std::string var = expect_ident();
      expect("at");
      std::string at_var = expect_ident();
      expect(".");
      Formula body = parse_unary();
      return is_exists ? exists(std::move(var), std::move(at_var), std::move(body))
                       : forall(std::move(var), std::move(at_var), std::move(body));
    }
    return parse_primary();
  }

  Formula parse_primary() {
    if (accept("true")) return top();
    if (at("(") && !paren_starts_operand()) {
      take();
      Formula inner = parse_until();
      if (!accept(")")) fail({"')'", "'until'", "'->'", "'or'", "'and'"});
      return inner;
    }
    if (accept("class")) {
      expect("(");
      expect(")");
      expect("==");
      return class_is(expect_class());
    }
    if (accept("inclass")) {
      expect("(");
      std::string var = expect_ident();
      expect(",");
      Label label = expect_class();
      expect(")");
      return in_class(std::move(var), label);
    }
    if (peek().kind == TokenKind::Identifier && peek(1).kind == TokenKind::Keyword &&
        peek(1).lexeme == "in") {
      std::string var = take().lexeme;
      take();
      return in_class(std::move(var), expect_class());
    }
    return parse_comparison();
  }

  // A parenthesis opens a score expression when the matching ')' is followed
  // by a comparison or a subtraction.
  bool paren_starts_operand() const {
    int level = 0;
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.kind == TokenKind::Punctuation && t.lexeme == "(") ++level;
      if (t.kind == TokenKind::Punctuation && t.lexeme == ")" && --level == 0) {
        const Token& after = toks_[std::min(i + 1, toks_.size() - 1)];
        return is_comparison(after) || (after.kind == TokenKind::Operator && after.lexeme == "-");
      }
    }
    return false;
  }

  Formula parse_comparison() {
    const SourceSpan start = peek().span;
    Operand lhs = parse_operand();
    if (!is_comparison(peek())) {
      fail({"'<'", "'<='", "'>'", "'>='", "'=='", "'!='"});
    }
    const Comparison op = comparison_of(take().lexeme);
    Operand rhs = parse_operand();

    using K = Operand::Kind;
    if (lhs.kind == K::Score || rhs.kind == K::Score) {
      if (lhs.kind == K::Time || rhs.kind == K::Time) {
        throw ParseError(start, "cannot compare a similarity expression with a time term");
      }
      return predicate(as_score(std::move(lhs)), op, as_score(std::move(rhs)));
    }
    return time_cmp(as_time(std::move(lhs)), op, as_time(std::move(rhs)));
  }

  static ScoreExpr as_score(Operand o) {
    if (o.kind == Operand::Kind::Int) return constant(to_real(o.int_lexeme));
    return std::move(o.score);
  }

  static TimeTerm as_time(Operand o) {
    if (o.kind == Operand::Kind::Int) return tconst(o.int_value);
    return std::move(o.time);
  }

  static double to_real(const std::string& lexeme) {
    double v = 0.0;
    std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
    return v;
  }

  std::int64_t to_integer(const Token& t) const {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
    if (ec != std::errc{}) throw ParseError(t.span, "integer literal out of range");
    return v;
  }

  Operand parse_operand() {
    Operand out;
    const Token& t = peek();
    if (t.kind == TokenKind::Identifier) {
      std::string name = take().lexeme;
      out.kind = Operand::Kind::Time;
      if (accept("+")) {
        if (peek().kind != TokenKind::Integer) fail({"integer"});
        out.time = tplus(std::move(name), to_integer(take()));
      } else {
        out.time = tvar(std::move(name));
      }
      return out;
    }
    if (accept("T")) {
      out.kind = Operand::Kind::Time;
      out.time = trace_end();
      return out;
    }
    if (t.kind == TokenKind::Integer && !(peek(1).kind == TokenKind::Operator && peek(1).lexeme == "-")) {
      out.kind = Operand::Kind::Int;
      out.int_value = to_integer(t);
      out.int_lexeme = take().lexeme;
      return out;
    }
    out.kind = Operand::Kind::Score;
    out.score = parse_score();
    return out;
  }

  // -- score expressions -----------------------------------------------------

  ScoreExpr parse_score() {
    DepthGuard guard(*this);
    ScoreExpr lhs = parse_score_term();
    while (at("-")) {
      take();
      lhs = minus(std::move(lhs), parse_score_term());
    }
    return lhs;
  }

  ScoreExpr parse_score_term() {
    if (accept("S")) {
      expect("(");
      std::string t = expect_ident();
      expect(",");
      std::string p = expect_ident();
      expect(")");
      return sim(std::move(t), std::move(p));
    }
    if (accept("abs")) {
      expect("(");
      ScoreExpr inner = parse_score();
      expect(")");
      return abs_of(std::move(inner));
    }
    if (accept("(")) {
      ScoreExpr inner = parse_score();
      expect(")");
      return inner;
    }
    const bool negative = accept("-");
    if (peek().kind == TokenKind::Integer || peek().kind == TokenKind::Real) {
      const double v = to_real(take().lexeme);
      return constant(negative ? -v : v);
    }
    if (negative) fail({"number"});
    fail({"'S'", "'abs'", "number", "'('", "time term"});
  }
};

} // namespace

std::vector<Token> tokenize(std::string_view input) { return Lexer(input).run(); }

Formula parse(std::string_view input) {
  Lexer lexer(input);
  std::vector<Token> tokens = lexer.run();
  SourceSpan end = tokens.empty() ? SourceSpan{1, 1, 0} : tokens.back().span;
  if (!tokens.empty()) end.column += end.length;
  end.length = 0;
  return Parser(std::move(tokens), end).run();
}

} // namespace proto_tqtl::tqtl
