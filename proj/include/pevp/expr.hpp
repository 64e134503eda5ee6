#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pevp {

/// Immutable expression tree in the single variable `mu`.
struct ExprNode {
  enum class Op { Number, Mu, Neg, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos, Sqrt, Log };

  Op op;
  double value = 0.0;  // Number
  int exponent = 0;    // Pow
  std::vector<std::shared_ptr<const ExprNode>> args;
};

using Expr = std::shared_ptr<const ExprNode>;

/// Grammar (whitespace-insensitive):
///
///   expr    := term (('+' | '-') term)*
///   term    := '-' term | product
///   product := factor (('*' | '/') factor)*
///   factor  := base ('^' integer)?
///   base    := number | 'mu' | func '(' expr ')' | '(' expr ')' | '-' base
///   func    := exp | sin | cos | sqrt | log
///
/// A leading minus on a term negates the whole product, so "-mu*2" parses
/// as Neg(Mul(mu, 2)). Throws ParseError with a 1-based byte offset.
Expr parse_expression(std::string_view text);

/// Compact structural form, e.g. "Mul(2, Pow(Add(mu, 1), 3))".
std::string to_string(const ExprNode& node);

/// Direct evaluation. Non-finite results raise a Domain error.
double evaluate(const ExprNode& node, double mu);

/// Derivative values d^k f / dmu^k at mu0 for k = 0..order, by truncated
/// Taylor-series arithmetic. Raises Domain errors for division by a series
/// with zero constant term and for sqrt/log of a nonpositive constant term.
std::vector<double> taylor_arith_eval(const ExprNode& node, double mu0, int order);

}  // namespace pevp
