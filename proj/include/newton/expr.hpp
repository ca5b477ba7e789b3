#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "newton/complex.hpp"
#include "newton/jet.hpp"

namespace newton::expr {

// Parse mode. Entire mode rejects anything that could introduce poles or
// branch points: division by a z-dependent denominator, log, and negative
// integer powers of z-dependent bases.
enum class Mode { Entire, Meromorphic };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct Node;
using NodeRef = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Var, Literal, Constant, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind;
  std::size_t offset = 0;  // byte offset of the token that produced the node
  Complex value{};         // Literal, Constant
  std::string name;        // Constant, Call
  long exponent = 0;       // Pow
  NodeRef a, b;            // operands (a only for unary nodes)
};

struct ExprAst {
  NodeRef root;
  std::string source;
  std::string var;  // the free variable, "z" by default
  Mode mode = Mode::Entire;
};

// Grammar (documented in README.md):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          -- exponent must be a constant integer
//   atom    := number | ident | ident '(' expr ')' | '(' expr ')'
// so precedence is ^ > unary minus > * / > + -.
ExprAst parse_function(std::string_view source, Mode mode,
                       std::string_view var = "z");

// Forward-mode jet evaluation; overflow yields a non-finite Jet, never throws.
Jet eval_jet(const ExprAst& ast, Complex z);
Jet eval_jet(const Node& node, Complex z);

bool depends_on_var(const Node& node);

std::string to_string(const ExprAst& ast);
bool structurally_equal(const ExprAst& a, const ExprAst& b);

// Parses a closed constant expression ("0.25-1i", "2*pi") and evaluates it.
Complex eval_constant(std::string_view source);

}  // namespace newton::expr
