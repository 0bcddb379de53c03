#pragma once

// Tiny arithmetic-expression language for defining scalar fields from text.
// Grammar (whitespace-insensitive, variables written x1..xn):
//
//   expression := term (('+'|'-') term)*
//   term       := unary (('*'|'/') unary)*
//   unary      := '-' unary | power
//   power      := atom ('^' unary)?          (right-associative)
//   atom       := number | name '(' expression ')' | variable | '(' expression ')'
//
// so ^ binds tighter than unary minus, which binds tighter than * and /.
// Recognized functions: sin cos exp log sqrt abs. No user functions, no
// let-bindings. Domain errors (log of a negative, ...) surface as
// NonFiniteValue at evaluation time, never at parse time.

#include <memory>
#include <string>
#include <variant>

#include "pllab/scalar_field.hpp"
#include "pllab/types.hpp"

namespace pllab {

enum class UnaryOp { neg, sin, cos, exp, log, sqrt, abs };
enum class BinaryOp { add, sub, mul, div, pow };

struct ExprAst;
using ExprPtr = std::shared_ptr<const ExprAst>;

struct ConstantNode {
  double value = 0.0;
};
struct VariableNode {
  int index = 1;  // 1-based: x1..xn
};
struct UnaryNode {
  UnaryOp op;
  ExprPtr child;
};
struct BinaryNode {
  BinaryOp op;
  ExprPtr left, right;
};

struct ExprAst {
  std::variant<ConstantNode, VariableNode, UnaryNode, BinaryNode> node;
};

// Parses src against the grammar above. Variable indices are checked against
// dim. Unary minus applied directly to a numeric literal is folded into a
// negative constant, so parse and to_text round-trip structurally.
// Throws SyntaxError / UnknownIdentifier / VariableOutOfRange; every error
// carries a character position in [0, len(src)].
ExprPtr parse(const std::string& src, int dim);

// Raw interpretation; NaN/inf results are returned as computed.
double eval_ast(const ExprAst& ast, const Vector& x);

bool structurally_equal(const ExprAst& a, const ExprAst& b);

// Minimal-parenthesis rendering; parse(to_text(a)) is structurally equal to a.
std::string to_text(const ExprAst& ast);

// True when the tree contains abs, sqrt, or log (possible kinks or domain
// boundaries; the compiled field is then tagged C0).
bool uses_nonsmooth_ops(const ExprAst& ast);

// Wraps the AST as a ScalarField of the given dimension. Derivatives are left
// to the finite-difference fallbacks; smoothness C_inf unless
// uses_nonsmooth_ops, in which case C0 with no declared kink locations.
ScalarField compile(const ExprPtr& ast, int dim);
ScalarField compile(const std::string& src, int dim);

}  // namespace pllab
