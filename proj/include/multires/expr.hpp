#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "multires/interval.hpp"
#include "multires/vec.hpp"

namespace multires {

enum class ExprKind { Constant, Var, Add, Sub, Mul, Div, Neg, Pow, Abs, Piecewise };

enum class CmpOp { Lt, Le, Gt, Ge };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression tree node. Piecewise nodes carry a guard "glhs cmp grhs";
// guard sides are restricted to affine forms optionally wrapped in abs().
struct Expr {
  ExprKind kind;
  double value = 0.0;  // Constant
  int var = -1;        // Var
  int exponent = 0;    // Pow
  ExprPtr a, b;        // operands; Piecewise: a = then, b = else
  ExprPtr glhs, grhs;  // Piecewise guard sides
  CmpOp cmp = CmpOp::Lt;
};

ExprPtr make_const(double v);
ExprPtr make_var(int i);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_pow(ExprPtr a, int k);
ExprPtr make_abs(ExprPtr a);
ExprPtr make_piecewise(ExprPtr glhs, CmpOp cmp, ExprPtr grhs, ExprPtr then_e, ExprPtr else_e);

double eval(const Expr& e, const Vec& x);
Interval eval(const Expr& e, const IBox& x);

// c0 + sum c[i]*x[i]
struct AffineForm {
  Vec coeffs;
  double constant = 0.0;
};

// returns the affine form of an expression, or nullopt if non-affine
std::optional<AffineForm> affine_form(const Expr& e, int dim);

// parses the infix mini-grammar: numbers, variables (x, y, z or x0..xN),
// + - * / unary-, ^int, pow(e, k), piecewise(cond, a, b), abs() inside guards
ExprPtr parse_expr(const std::string& src, int dim);

// vector-valued map R^in_dim -> R^{outs.size()}
struct ExpressionMap {
  int in_dim = 0;
  std::vector<ExprPtr> outs;
  std::vector<std::string> sources;  // original text, kept for serialization

  int out_dim() const { return static_cast<int>(outs.size()); }
  Vec evaluate(const Vec& x) const;
  IBox interval_evaluate(const IBox& x) const;
  Box interval_evaluate(const Box& x) const;
  bool is_affine() const;
  // x -> M x + c when every output is affine
  std::optional<std::pair<std::vector<Vec>, Vec>> as_affine() const;
};

ExpressionMap parse_map(const std::vector<std::string>& exprs, int in_dim);

}  // namespace multires
