#include "newton/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace newton::expr {

namespace {

struct Token {
  enum class Kind { Number, Ident, Op, LParen, RParen, End };
  Kind kind;
  std::size_t offset;
  double number = 0.0;
  bool imaginary = false;  // number carried an 'i' suffix
  char op = 0;
  std::string ident;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return lex_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      t.kind = Token::Kind::Ident;
      t.ident.assign(src_.substr(start, pos_ - start));
      return t;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        t.kind = Token::Kind::Op;
        t.op = c;
        ++pos_;
        return t;
      case '(':
        t.kind = Token::Kind::LParen;
        ++pos_;
        return t;
      case ')':
        t.kind = Token::Kind::RParen;
        ++pos_;
        return t;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  Token lex_number() {
    std::size_t start = pos_;
    // strtod needs a NUL-terminated buffer; copy the tail.
    std::string buf(src_.substr(start));
    const char* begin = buf.c_str();
    char* end = nullptr;
    double val = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", start);
    pos_ = start + static_cast<std::size_t>(end - begin);
    Token t;
    t.kind = Token::Kind::Number;
    t.offset = start;
    t.number = val;
    // 'i' suffix makes an imaginary literal, as in "0.25-1i".
    if (pos_ < src_.size() && src_[pos_] == 'i') {
      bool followed_by_word =
          pos_ + 1 < src_.size() &&
          (std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '_');
      if (!followed_by_word) {
        t.imaginary = true;
        ++pos_;
      }
    }
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

NodeRef make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
 public:
  Parser(std::string_view src, std::string_view var) : lexer_(src), var_(var) {
    advance();
  }

  NodeRef parse() {
    NodeRef e = parse_expr();
    if (cur_.kind != Token::Kind::End) {
      throw ParseError("trailing input after expression", cur_.offset);
    }
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  bool at_op(char c) const { return cur_.kind == Token::Kind::Op && cur_.op == c; }

  NodeRef parse_expr() {
    NodeRef lhs = parse_term();
    while (at_op('+') || at_op('-')) {
      char op = cur_.op;
      std::size_t off = cur_.offset;
      advance();
      NodeRef rhs = parse_term();
      Node n;
      n.kind = op == '+' ? Node::Kind::Add : Node::Kind::Sub;
      n.offset = off;
      n.a = lhs;
      n.b = rhs;
      lhs = make_node(std::move(n));
    }
    return lhs;
  }

  NodeRef parse_term() {
    NodeRef lhs = parse_unary();
    while (at_op('*') || at_op('/')) {
      char op = cur_.op;
      std::size_t off = cur_.offset;
      advance();
      NodeRef rhs = parse_unary();
      Node n;
      n.kind = op == '*' ? Node::Kind::Mul : Node::Kind::Div;
      n.offset = off;
      n.a = lhs;
      n.b = rhs;
      lhs = make_node(std::move(n));
    }
    return lhs;
  }

  NodeRef parse_unary() {
    if (at_op('-')) {
      std::size_t off = cur_.offset;
      advance();
      Node n;
      n.kind = Node::Kind::Neg;
      n.offset = off;
      n.a = parse_unary();
      return make_node(std::move(n));
    }
    return parse_power();
  }

  NodeRef parse_power() {
    NodeRef base = parse_atom();
    if (!at_op('^')) return base;
    std::size_t off = cur_.offset;
    advance();
    std::size_t exp_off = cur_.offset;
    NodeRef exp = parse_unary();  // right-associative: z^2^3 == z^(2^3)
    if (depends_on_var(*exp)) {
      throw ParseError("exponent must be a constant integer", exp_off);
    }
    Complex val = eval_jet(*exp, Complex(0.0, 0.0)).v;
    double r = std::round(val.real());
    if (!is_finite(val) || std::abs(val.imag()) > 1e-12 * (1.0 + std::abs(val.real())) ||
        std::abs(val.real() - r) > 1e-9) {
      throw ParseError("exponent must be a constant integer", exp_off);
    }
    Node n;
    n.kind = Node::Kind::Pow;
    n.offset = off;
    n.exponent = static_cast<long>(r);
    n.a = base;
    return make_node(std::move(n));
  }

  NodeRef parse_atom() {
    switch (cur_.kind) {
      case Token::Kind::Number: {
        Node n;
        n.kind = Node::Kind::Literal;
        n.offset = cur_.offset;
        n.value = cur_.imaginary ? Complex(0.0, cur_.number) : Complex(cur_.number, 0.0);
        advance();
        return make_node(std::move(n));
      }
      case Token::Kind::LParen: {
        advance();
        NodeRef e = parse_expr();
        if (cur_.kind != Token::Kind::RParen) {
          throw ParseError("expected ')'", cur_.offset);
        }
        advance();
        return e;
      }
      case Token::Kind::Ident:
        return parse_ident();
      default:
        throw ParseError("expected a number, identifier or '('", cur_.offset);
    }
  }

  NodeRef parse_ident() {
    std::string name = cur_.ident;
    std::size_t off = cur_.offset;
    advance();
    if (cur_.kind == Token::Kind::LParen) {
      if (name != "exp" && name != "sin" && name != "cos" && name != "log") {
        throw ParseError("unknown function '" + name + "'", off);
      }
      advance();
      NodeRef arg = parse_expr();
      if (cur_.kind != Token::Kind::RParen) {
        throw ParseError("expected ')' after call argument", cur_.offset);
      }
      advance();
      Node n;
      n.kind = Node::Kind::Call;
      n.offset = off;
      n.name = name;
      n.a = arg;
      return make_node(std::move(n));
    }
    if (!var_.empty() && name == var_) {
      Node n;
      n.kind = Node::Kind::Var;
      n.offset = off;
      return make_node(std::move(n));
    }
    Node n;
    n.kind = Node::Kind::Constant;
    n.offset = off;
    n.name = name;
    if (name == "pi") {
      n.value = Complex(kPi, 0.0);
    } else if (name == "e") {
      n.value = Complex(std::exp(1.0), 0.0);
    } else if (name == "i") {
      n.value = Complex(0.0, 1.0);
    } else {
      throw ParseError("unknown identifier '" + name + "'", off);
    }
    return make_node(std::move(n));
  }

  Lexer lexer_;
  Token cur_;
  std::string var_;
};

void check_entire(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Div:
      if (depends_on_var(*n.b)) {
        throw ParseError("z-dependent denominator is not allowed in entire mode", n.offset);
      }
      check_entire(*n.a);
      check_entire(*n.b);
      return;
    case Node::Kind::Call:
      if (n.name == "log") {
        throw ParseError("log is not allowed in entire mode", n.offset);
      }
      check_entire(*n.a);
      return;
    case Node::Kind::Pow:
      if (n.exponent < 0 && depends_on_var(*n.a)) {
        throw ParseError("z-dependent denominator is not allowed in entire mode", n.offset);
      }
      check_entire(*n.a);
      return;
    default:
      if (n.a) check_entire(*n.a);
      if (n.b) check_entire(*n.b);
      return;
  }
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Add:
    case Node::Kind::Sub: return 1;
    case Node::Kind::Mul:
    case Node::Kind::Div: return 2;
    case Node::Kind::Neg: return 3;
    case Node::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_literal(Complex v) {
  if (v.imag() == 0.0) return format_double(v.real());
  if (v.real() == 0.0) return format_double(v.imag()) + "i";
  // General complex literals only arise from programmatic construction.
  return "(" + format_double(v.real()) + "+" + format_double(v.imag()) + "i)";
}

void print_node(const Node& n, std::string& out) {
  auto child = [&out](const Node& parent, const Node& kid, bool strict) {
    bool parens = strict ? precedence(kid) <= precedence(parent)
                         : precedence(kid) < precedence(parent);
    if (parens) out += '(';
    print_node(kid, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case Node::Kind::Var: out += "z"; return;  // overwritten by to_string for other vars
    case Node::Kind::Literal: out += format_literal(n.value); return;
    case Node::Kind::Constant: out += n.name; return;
    case Node::Kind::Neg:
      out += '-';
      child(n, *n.a, false);
      return;
    case Node::Kind::Add:
      child(n, *n.a, false);
      out += " + ";
      child(n, *n.b, true);
      return;
    case Node::Kind::Sub:
      child(n, *n.a, false);
      out += " - ";
      child(n, *n.b, true);
      return;
    case Node::Kind::Mul:
      child(n, *n.a, false);
      out += "*";
      child(n, *n.b, true);
      return;
    case Node::Kind::Div:
      child(n, *n.a, false);
      out += "/";
      child(n, *n.b, true);
      return;
    case Node::Kind::Pow: {
      bool parens = precedence(*n.a) < 5;
      if (parens) out += '(';
      print_node(*n.a, out);
      if (parens) out += ')';
      out += '^';
      if (n.exponent < 0) {
        out += "(" + std::to_string(n.exponent) + ")";
      } else {
        out += std::to_string(n.exponent);
      }
      return;
    }
    case Node::Kind::Call:
      out += n.name;
      out += '(';
      print_node(*n.a, out);
      out += ')';
      return;
  }
}

void print_with_var(const Node& n, const std::string& var, std::string& out);

}  // namespace

ExprAst parse_function(std::string_view source, Mode mode, std::string_view var) {
  if (source.empty()) throw ParseError("empty formula", 0);
  Parser p(source, var);
  ExprAst ast;
  ast.root = p.parse();
  ast.source.assign(source);
  ast.var.assign(var);
  ast.mode = mode;
  if (mode == Mode::Entire) check_entire(*ast.root);
  return ast;
}

bool depends_on_var(const Node& node) {
  if (node.kind == Node::Kind::Var) return true;
  if (node.a && depends_on_var(*node.a)) return true;
  if (node.b && depends_on_var(*node.b)) return true;
  return false;
}

Jet eval_jet(const Node& node, Complex z) {
  switch (node.kind) {
    case Node::Kind::Var: return jet_var(z);
    case Node::Kind::Literal:
    case Node::Kind::Constant: return jet_const(node.value);
    case Node::Kind::Neg: return -eval_jet(*node.a, z);
    case Node::Kind::Add: return eval_jet(*node.a, z) + eval_jet(*node.b, z);
    case Node::Kind::Sub: return eval_jet(*node.a, z) - eval_jet(*node.b, z);
    case Node::Kind::Mul: return eval_jet(*node.a, z) * eval_jet(*node.b, z);
    case Node::Kind::Div: return eval_jet(*node.a, z) / eval_jet(*node.b, z);
    case Node::Kind::Pow: return pow(eval_jet(*node.a, z), node.exponent);
    case Node::Kind::Call: {
      Jet a = eval_jet(*node.a, z);
      if (node.name == "exp") return exp(a);
      if (node.name == "sin") return sin(a);
      if (node.name == "cos") return cos(a);
      return log(a);
    }
  }
  return jet_const(Complex(0.0, 0.0));
}

Jet eval_jet(const ExprAst& ast, Complex z) { return eval_jet(*ast.root, z); }

namespace {
void print_with_var(const Node& n, const std::string& var, std::string& out) {
  std::string tmp;
  print_node(n, tmp);
  if (var == "z") {
    out += tmp;
    return;
  }
  // Var nodes were printed as "z"; substitute. Identifiers in the output can
  // only come from constants/calls, none of which are a bare "z".
  for (std::size_t i = 0; i < tmp.size(); ++i) {
    if (tmp[i] == 'z') {
      out += var;
    } else {
      out += tmp[i];
    }
  }
}
}  // namespace

std::string to_string(const ExprAst& ast) {
  std::string out;
  print_with_var(*ast.root, ast.var, out);
  return out;
}

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  struct Cmp {
    static bool eq(const Node& x, const Node& y) {
      if (x.kind != y.kind) return false;
      switch (x.kind) {
        case Node::Kind::Literal:
        case Node::Kind::Constant:
          if (x.value != y.value) return false;
          if (x.kind == Node::Kind::Constant && x.name != y.name) return false;
          break;
        case Node::Kind::Pow:
          if (x.exponent != y.exponent) return false;
          break;
        case Node::Kind::Call:
          if (x.name != y.name) return false;
          break;
        default: break;
      }
      if (static_cast<bool>(x.a) != static_cast<bool>(y.a)) return false;
      if (static_cast<bool>(x.b) != static_cast<bool>(y.b)) return false;
      if (x.a && !eq(*x.a, *y.a)) return false;
      if (x.b && !eq(*x.b, *y.b)) return false;
      return true;
    }
  };
  return Cmp::eq(*a.root, *b.root);
}

Complex eval_constant(std::string_view source) {
  // Parse with an unmatchable variable name so every identifier must be a
  // known constant.
  ExprAst ast = parse_function(source, Mode::Meromorphic, "");
  return eval_jet(ast, Complex(0.0, 0.0)).v;
}

}  // namespace newton::expr
