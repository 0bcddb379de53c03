#include "pllab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pllab/errors.hpp"

namespace pllab {

namespace {

struct Token {
  enum Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Kind kind;
  std::size_t pos;
  double value = 0.0;   // number
  std::string text;     // ident
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
      ++i_;
    const std::size_t pos = i_;
    if (i_ >= src_.size()) return {Token::end, pos};
    const char c = src_[i_];
    switch (c) {
      case '+': ++i_; return {Token::plus, pos};
      case '-': ++i_; return {Token::minus, pos};
      case '*': ++i_; return {Token::star, pos};
      case '/': ++i_; return {Token::slash, pos};
      case '^': ++i_; return {Token::caret, pos};
      case '(': ++i_; return {Token::lparen, pos};
      case ')': ++i_; return {Token::rparen, pos};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + i_;
      char* after = nullptr;
      const double v = std::strtod(begin, &after);
      if (after == begin) throw SyntaxError(pos, "malformed number");
      i_ += static_cast<std::size_t>(after - begin);
      Token t{Token::number, pos};
      t.value = v;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      Token t{Token::ident, pos};
      t.text = src_.substr(i_, j - i_);
      i_ = j;
      return t;
    }
    throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
  }

 private:
  const std::string& src_;
  std::size_t i_ = 0;
};

ExprPtr make(ExprAst ast) { return std::make_shared<const ExprAst>(std::move(ast)); }

class Parser {
 public:
  Parser(const std::string& src, int dim) : lex_(src), dim_(dim) { advance(); }

  ExprPtr run() {
    ExprPtr e = expression();
    if (tok_.kind != Token::end)
      throw SyntaxError(tok_.pos, "unexpected trailing input");
    return e;
  }

 private:
  void advance() { tok_ = lex_.next(); }

  ExprPtr expression() {
    ExprPtr e = term();
    while (tok_.kind == Token::plus || tok_.kind == Token::minus) {
      const BinaryOp op =
          tok_.kind == Token::plus ? BinaryOp::add : BinaryOp::sub;
      advance();
      e = make({BinaryNode{op, e, term()}});
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = unary();
    while (tok_.kind == Token::star || tok_.kind == Token::slash) {
      const BinaryOp op =
          tok_.kind == Token::star ? BinaryOp::mul : BinaryOp::div;
      advance();
      e = make({BinaryNode{op, e, unary()}});
    }
    return e;
  }

  ExprPtr unary() {
    if (tok_.kind == Token::minus) {
      advance();
      ExprPtr child = unary();
      // Fold "-literal" into a negative constant so printing round-trips.
      if (const auto* c = std::get_if<ConstantNode>(&child->node))
        return make({ConstantNode{-c->value}});
      return make({UnaryNode{UnaryOp::neg, child}});
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (tok_.kind == Token::caret) {
      advance();
      return make({BinaryNode{BinaryOp::pow, base, unary()}});
    }
    return base;
  }

  ExprPtr atom() {
    const Token t = tok_;
    switch (t.kind) {
      case Token::number:
        advance();
        return make({ConstantNode{t.value}});
      case Token::lparen: {
        advance();
        ExprPtr e = expression();
        if (tok_.kind != Token::rparen)
          throw SyntaxError(tok_.pos, "expected ')'");
        advance();
        return e;
      }
      case Token::ident:
        advance();
        if (tok_.kind == Token::lparen) return function_call(t);
        return variable(t);
      case Token::end:
        throw SyntaxError(t.pos, "unexpected end of input");
      default:
        throw SyntaxError(t.pos, "expected a number, variable, or '('");
    }
  }

  ExprPtr function_call(const Token& name) {
    UnaryOp op;
    if (name.text == "sin") op = UnaryOp::sin;
    else if (name.text == "cos") op = UnaryOp::cos;
    else if (name.text == "exp") op = UnaryOp::exp;
    else if (name.text == "log") op = UnaryOp::log;
    else if (name.text == "sqrt") op = UnaryOp::sqrt;
    else if (name.text == "abs") op = UnaryOp::abs;
    else
      throw UnknownIdentifier(name.pos, "unknown function '" + name.text + "'");
    advance();  // consume '('
    ExprPtr arg = expression();
    if (tok_.kind != Token::rparen) throw SyntaxError(tok_.pos, "expected ')'");
    advance();
    return make({UnaryNode{op, arg}});
  }

  ExprPtr variable(const Token& name) {
    if (name.text.size() >= 2 && name.text[0] == 'x') {
      bool digits = true;
      for (std::size_t k = 1; k < name.text.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(name.text[k]))) digits = false;
      if (digits) {
        const long idx = std::strtol(name.text.c_str() + 1, nullptr, 10);
        if (idx < 1 || idx > dim_)
          throw VariableOutOfRange(
              name.pos, "variable " + name.text + " out of range [1," +
                            std::to_string(dim_) + "]");
        return make({VariableNode{static_cast<int>(idx)}});
      }
    }
    throw UnknownIdentifier(name.pos, "unknown identifier '" + name.text + "'");
  }

  Lexer lex_;
  int dim_;
  Token tok_{};
};

}  // namespace

ExprPtr parse(const std::string& src, int dim) {
  if (dim < 1) throw InvalidParams("parse: dim must be >= 1");
  if (src.empty()) throw SyntaxError(0, "empty input");
  return Parser(src, dim).run();
}

double eval_ast(const ExprAst& ast, const Vector& x) {
  struct V {
    const Vector& x;
    double operator()(const ConstantNode& c) const { return c.value; }
    double operator()(const VariableNode& v) const { return x[v.index - 1]; }
    double operator()(const UnaryNode& u) const {
      const double a = eval_ast(*u.child, x);
      switch (u.op) {
        case UnaryOp::neg: return -a;
        case UnaryOp::sin: return std::sin(a);
        case UnaryOp::cos: return std::cos(a);
        case UnaryOp::exp: return std::exp(a);
        case UnaryOp::log: return std::log(a);
        case UnaryOp::sqrt: return std::sqrt(a);
        case UnaryOp::abs: return std::abs(a);
      }
      return 0.0;
    }
    double operator()(const BinaryNode& b) const {
      const double l = eval_ast(*b.left, x);
      const double r = eval_ast(*b.right, x);
      switch (b.op) {
        case BinaryOp::add: return l + r;
        case BinaryOp::sub: return l - r;
        case BinaryOp::mul: return l * r;
        case BinaryOp::div: return l / r;
        case BinaryOp::pow: return std::pow(l, r);
      }
      return 0.0;
    }
  };
  return std::visit(V{x}, ast.node);
}

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* ca = std::get_if<ConstantNode>(&a.node))
    return ca->value == std::get<ConstantNode>(b.node).value;
  if (const auto* va = std::get_if<VariableNode>(&a.node))
    return va->index == std::get<VariableNode>(b.node).index;
  if (const auto* ua = std::get_if<UnaryNode>(&a.node)) {
    const auto& ub = std::get<UnaryNode>(b.node);
    return ua->op == ub.op && structurally_equal(*ua->child, *ub.child);
  }
  const auto& ba = std::get<BinaryNode>(a.node);
  const auto& bb = std::get<BinaryNode>(b.node);
  return ba.op == bb.op && structurally_equal(*ba.left, *bb.left) &&
         structurally_equal(*ba.right, *bb.right);
}

namespace {

// Precedence used for printing: + - are 1, * / are 2, unary minus 3, ^ 4,
// atoms 5. Matches the grammar.
int prec(const ExprAst& ast) {
  struct V {
    int operator()(const ConstantNode&) const { return 5; }
    int operator()(const VariableNode&) const { return 5; }
    int operator()(const UnaryNode& u) const {
      return u.op == UnaryOp::neg ? 3 : 5;
    }
    int operator()(const BinaryNode& b) const {
      switch (b.op) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
      }
      return 5;
    }
  };
  return std::visit(V{}, ast.node);
}

std::string fn_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "-";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::abs: return "abs";
  }
  return "?";
}

std::string render(const ExprAst& ast);

std::string wrap_if(const ExprAst& child, bool parens) {
  const std::string s = render(child);
  return parens ? "(" + s + ")" : s;
}

std::string render(const ExprAst& ast) {
  struct V {
    std::string operator()(const ConstantNode& c) const {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(c.value));
      // A bare leading '-' would reparse as unary negation of a literal;
      // the parser folds that back, but parenthesize for clarity anyway.
      if (std::signbit(c.value) && c.value != 0.0)
        return std::string("(-") + buf + ")";
      return buf;
    }
    std::string operator()(const VariableNode& v) const {
      return "x" + std::to_string(v.index);
    }
    std::string operator()(const UnaryNode& u) const {
      if (u.op == UnaryOp::neg)
        return "-" + wrap_if(*u.child, prec(*u.child) < 3);
      return fn_name(u.op) + "(" + render(*u.child) + ")";
    }
    std::string operator()(const BinaryNode& b) const {
      const int p =
          (b.op == BinaryOp::add || b.op == BinaryOp::sub) ? 1
          : (b.op == BinaryOp::mul || b.op == BinaryOp::div) ? 2
                                                             : 4;
      const char* sym = b.op == BinaryOp::add   ? "+"
                        : b.op == BinaryOp::sub ? "-"
                        : b.op == BinaryOp::mul ? "*"
                        : b.op == BinaryOp::div ? "/"
                                                : "^";
      if (b.op == BinaryOp::pow)
        // right-associative; the grammar's exponent slot parses at unary level
        return wrap_if(*b.left, prec(*b.left) <= p) + sym +
               wrap_if(*b.right, prec(*b.right) < 3);
      return wrap_if(*b.left, prec(*b.left) < p) + sym +
             wrap_if(*b.right, prec(*b.right) <= p);
    }
  };
  return std::visit(V{}, ast.node);
}

}  // namespace

std::string to_text(const ExprAst& ast) { return render(ast); }

bool uses_nonsmooth_ops(const ExprAst& ast) {
  struct V {
    bool operator()(const ConstantNode&) const { return false; }
    bool operator()(const VariableNode&) const { return false; }
    bool operator()(const UnaryNode& u) const {
      if (u.op == UnaryOp::abs || u.op == UnaryOp::sqrt || u.op == UnaryOp::log)
        return true;
      return uses_nonsmooth_ops(*u.child);
    }
    bool operator()(const BinaryNode& b) const {
      return uses_nonsmooth_ops(*b.left) || uses_nonsmooth_ops(*b.right);
    }
  };
  return std::visit(V{}, ast.node);
}

ScalarField compile(const ExprPtr& ast, int dim) {
  if (!ast) throw InvalidParams("compile: null AST");
  if (dim < 1) throw InvalidParams("compile: dim must be >= 1");
  ScalarField f;
  f.dim = dim;
  f.name = "expr(" + to_text(*ast) + ")";
  f.value = [ast](const Vector& x) { return eval_ast(*ast, x); };
  f.smoothness =
      uses_nonsmooth_ops(*ast) ? Smoothness::C0 : Smoothness::C_inf;
  return f;
}

ScalarField compile(const std::string& src, int dim) {
  return compile(parse(src, dim), dim);
}

}  // namespace pllab
