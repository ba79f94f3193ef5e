#pragma once

// Concrete syntax for While programs (.whl files) and for value, store and
// input-stream literals.
//
//   program := seq
//   seq     := stmt (';' stmt)* [';']
//   stmt    := 'skip' | 'alloc' ID | ID ':=' expr
//            | 'if' expr block 'else' block | 'while' expr block
//            | 'throw' value | 'try' block 'catch' block | block
//   block   := '{' seq '}'
//   expr    := term (('+' | '-') term)*
//   term    := atom ('*' atom)*
//   atom    := NAT | 'null' | 'input' | ID | '(' expr ')'
//
// `;` is right-associative, `#` starts a line comment.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "whilesos/syntax.hpp"

namespace whilesos {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t offset, std::size_t line, std::size_t column);

  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t offset_, line_, column_;
};

Cmd parse_cmd(std::string_view text);
Expr parse_expr(std::string_view text);
Val parse_value(std::string_view text);
/// Comma-separated values, e.g. "1,0,null". Blank text is the empty stream.
InputStream parse_stream(std::string_view text);
/// `{x |-> 1, y |-> null}`; `↦` is accepted in place of `|->`.
Store parse_store(std::string_view text);

bool is_reserved_word(std::string_view word);

std::string pretty_cmd(const Cmd& c);
std::string pretty_expr(const Expr& e);
std::string pretty_val(const Val& v);
std::string pretty_store(const Store& s);
std::string pretty_stream(const InputStream& s);
std::string pretty_semcmd(const SemCmd& c);
std::string pretty_outcome(const Outcome& o);
std::string pretty_status(const Status& s);
/// "Converged {c↦0, r↦24}", "Stuck (reason)", "DivergesProven (lasso, cycle=2)", ...
std::string verdict_text(const Verdict& v);

}  // namespace whilesos
