#pragma once

#include "proto_tqtl/error.hpp"
#include "proto_tqtl/tqtl/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace proto_tqtl::tqtl {

enum class TokenKind { Keyword, Identifier, Integer, Real, Operator, Punctuation, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string lexeme;
  SourceSpan span;

  bool operator==(const Token&) const = default;
};

/// Splits TQTL source into tokens. `#` starts a comment running to end of
/// line. Throws ParseError on any character outside the token classes.
/// The returned sequence does not include the End token.
std::vector<Token> tokenize(std::string_view input);

/// Parses one closed or open formula. Throws ParseError with the expected
/// token set on the first syntax error; no recovery is attempted.
///
/// Grammar (loosest first):
///
///   formula    ::= implies { "until" implies }
///   implies    ::= or [ "->" implies ]
///   or         ::= and { "or" and }
///   and        ::= unary { "and" unary }
///   unary      ::= ("not" | "eventually" | "always") unary
///                | "freeze" IDENT "." unary
///                | ("exists" | "forall") IDENT "at" IDENT "." unary
///                | primary
///   primary    ::= "true" | "(" formula ")"
///                | "class" "(" ")" "==" CLASS
///                | "inclass" "(" IDENT "," CLASS ")" | IDENT "in" CLASS
///                | operand CMP operand
///   operand    ::= score | time
///   score      ::= sterm { "-" sterm }
///   sterm      ::= "S" "(" IDENT "," IDENT ")" | "abs" "(" score ")"
///                | ["-"] NUMBER | "(" score ")"
///   time       ::= IDENT [ "+" INTEGER ] | "T" | INTEGER
///   CMP        ::= "<" | "<=" | ">" | ">=" | "==" | "!="
///   CLASS      ::= "REAL" | "FAKE"
///
/// A comparison whose sides mention S, abs, subtraction or a real literal is
/// a predicate; one whose sides mention a time variable or T is a time
/// constraint. Two bare integers form a time constraint.
Formula parse(std::string_view input);

} // namespace proto_tqtl::tqtl
