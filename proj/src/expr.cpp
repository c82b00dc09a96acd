#include "multires/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "multires/errors.hpp"

namespace multires {

ExprPtr make_const(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Constant;
  e->value = v;
  return e;
}

ExprPtr make_var(int i) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->var = i;
  return e;
}

static ExprPtr make_binary(ExprKind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr make_add(ExprPtr a, ExprPtr b) { return make_binary(ExprKind::Add, std::move(a), std::move(b)); }
ExprPtr make_sub(ExprPtr a, ExprPtr b) { return make_binary(ExprKind::Sub, std::move(a), std::move(b)); }
ExprPtr make_mul(ExprPtr a, ExprPtr b) { return make_binary(ExprKind::Mul, std::move(a), std::move(b)); }
ExprPtr make_div(ExprPtr a, ExprPtr b) { return make_binary(ExprKind::Div, std::move(a), std::move(b)); }

ExprPtr make_neg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Neg;
  e->a = std::move(a);
  return e;
}

ExprPtr make_pow(ExprPtr a, int k) {
  if (k < 0) throw SpecError("power: exponent must be a nonnegative integer");
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Pow;
  e->a = std::move(a);
  e->exponent = k;
  return e;
}

ExprPtr make_abs(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Abs;
  e->a = std::move(a);
  return e;
}

ExprPtr make_piecewise(ExprPtr glhs, CmpOp cmp, ExprPtr grhs, ExprPtr then_e, ExprPtr else_e) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Piecewise;
  e->glhs = std::move(glhs);
  e->grhs = std::move(grhs);
  e->cmp = cmp;
  e->a = std::move(then_e);
  e->b = std::move(else_e);
  return e;
}

double eval(const Expr& e, const Vec& x) {
  switch (e.kind) {
    case ExprKind::Constant: return e.value;
    case ExprKind::Var: return x[e.var];
    case ExprKind::Add: return eval(*e.a, x) + eval(*e.b, x);
    case ExprKind::Sub: return eval(*e.a, x) - eval(*e.b, x);
    case ExprKind::Mul: return eval(*e.a, x) * eval(*e.b, x);
    case ExprKind::Div: {
      const double d = eval(*e.b, x);
      if (d == 0.0) throw EvaluationError("division by zero");
      return eval(*e.a, x) / d;
    }
    case ExprKind::Neg: return -eval(*e.a, x);
    case ExprKind::Pow: {
      double base = eval(*e.a, x);
      double acc = 1.0;
      for (int i = 0; i < e.exponent; ++i) acc *= base;
      return acc;
    }
    case ExprKind::Abs: return std::fabs(eval(*e.a, x));
    case ExprKind::Piecewise: {
      const double l = eval(*e.glhs, x);
      const double r = eval(*e.grhs, x);
      bool take;
      switch (e.cmp) {
        case CmpOp::Lt: take = l < r; break;
        case CmpOp::Le: take = l <= r; break;
        case CmpOp::Gt: take = l > r; break;
        default: take = l >= r; break;
      }
      return take ? eval(*e.a, x) : eval(*e.b, x);
    }
  }
  throw EvaluationError("eval: corrupt expression node");
}

Interval eval(const Expr& e, const IBox& x) {
  switch (e.kind) {
    case ExprKind::Constant: return {e.value, e.value};
    case ExprKind::Var: return x[e.var];
    case ExprKind::Add: return eval(*e.a, x) + eval(*e.b, x);
    case ExprKind::Sub: return eval(*e.a, x) - eval(*e.b, x);
    case ExprKind::Mul: return eval(*e.a, x) * eval(*e.b, x);
    case ExprKind::Div: return eval(*e.a, x) / eval(*e.b, x);
    case ExprKind::Neg: return -eval(*e.a, x);
    case ExprKind::Pow: return iv_pow(eval(*e.a, x), e.exponent);
    case ExprKind::Abs: return iv_abs(eval(*e.a, x));
    case ExprKind::Piecewise: {
      const Interval l = eval(*e.glhs, x);
      const Interval r = eval(*e.grhs, x);
      // decided only when the guard holds (or fails) over the whole box
      bool strict = e.cmp == CmpOp::Lt || e.cmp == CmpOp::Gt;
      bool lhs_first = e.cmp == CmpOp::Lt || e.cmp == CmpOp::Le;
      const Interval& lo_side = lhs_first ? l : r;
      const Interval& hi_side = lhs_first ? r : l;
      if (strict ? lo_side.hi < hi_side.lo : lo_side.hi <= hi_side.lo) return eval(*e.a, x);
      if (strict ? lo_side.lo >= hi_side.hi : lo_side.lo > hi_side.hi) return eval(*e.b, x);
      return hull(eval(*e.a, x), eval(*e.b, x));
    }
  }
  throw EvaluationError("eval: corrupt expression node");
}

std::optional<AffineForm> affine_form(const Expr& e, int dim) {
  switch (e.kind) {
    case ExprKind::Constant: return AffineForm{Vec(dim, 0.0), e.value};
    case ExprKind::Var: {
      AffineForm f{Vec(dim, 0.0), 0.0};
      f.coeffs[e.var] = 1.0;
      return f;
    }
    case ExprKind::Add:
    case ExprKind::Sub: {
      auto fa = affine_form(*e.a, dim);
      auto fb = affine_form(*e.b, dim);
      if (!fa || !fb) return std::nullopt;
      const double s = e.kind == ExprKind::Add ? 1.0 : -1.0;
      for (int i = 0; i < dim; ++i) fa->coeffs[i] += s * fb->coeffs[i];
      fa->constant += s * fb->constant;
      return fa;
    }
    case ExprKind::Mul: {
      auto fa = affine_form(*e.a, dim);
      auto fb = affine_form(*e.b, dim);
      if (!fa || !fb) return std::nullopt;
      auto is_const = [&](const AffineForm& f) {
        for (double c : f.coeffs)
          if (c != 0.0) return false;
        return true;
      };
      if (!is_const(*fa) && !is_const(*fb)) return std::nullopt;
      const AffineForm& lin = is_const(*fa) ? *fb : *fa;
      const double k = is_const(*fa) ? fa->constant : fb->constant;
      AffineForm out{Vec(dim, 0.0), lin.constant * k};
      for (int i = 0; i < dim; ++i) out.coeffs[i] = lin.coeffs[i] * k;
      return out;
    }
    case ExprKind::Div: {
      auto fa = affine_form(*e.a, dim);
      auto fb = affine_form(*e.b, dim);
      if (!fa || !fb) return std::nullopt;
      for (double c : fb->coeffs)
        if (c != 0.0) return std::nullopt;
      if (fb->constant == 0.0) return std::nullopt;
      for (double& c : fa->coeffs) c /= fb->constant;
      fa->constant /= fb->constant;
      return fa;
    }
    case ExprKind::Neg: {
      auto fa = affine_form(*e.a, dim);
      if (!fa) return std::nullopt;
      for (double& c : fa->coeffs) c = -c;
      fa->constant = -fa->constant;
      return fa;
    }
    case ExprKind::Pow: {
      if (e.exponent == 0) return AffineForm{Vec(dim, 0.0), 1.0};
      if (e.exponent == 1) return affine_form(*e.a, dim);
      auto fa = affine_form(*e.a, dim);
      if (!fa) return std::nullopt;
      for (double c : fa->coeffs)
        if (c != 0.0) return std::nullopt;
      double acc = 1.0;
      for (int i = 0; i < e.exponent; ++i) acc *= fa->constant;
      return AffineForm{Vec(dim, 0.0), acc};
    }
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;
  int dim;
  bool in_guard = false;

  explicit Parser(const std::string& s, int d) : src(s), dim(d) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw SpecError("parse error at offset " + std::to_string(pos) + " in '" + src + "': " + msg);
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < src.size() && src[pos] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    return src.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    const char* begin = src.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }

  int integer() {
    skip_ws();
    bool neg = accept('-');
    if (!(pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))))
      fail("expected an integer exponent");
    int v = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
      v = v * 10 + (src[pos++] - '0');
    return neg ? -v : v;
  }

  int var_index(const std::string& name) {
    static const std::string aliases = "xyz";
    if (name.size() == 1) {
      auto p = aliases.find(name[0]);
      if (p != std::string::npos && static_cast<int>(p) < dim) return static_cast<int>(p);
    }
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        int idx = std::atoi(name.c_str() + 1);
        if (idx >= 0 && idx < dim) return idx;
        fail("variable '" + name + "' out of range for dimension " + std::to_string(dim));
      }
    }
    fail("unknown identifier '" + name + "'");
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_add(lhs, term());
      else if (accept('-'))
        lhs = make_sub(lhs, term());
      else
        return lhs;
    }
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = make_mul(lhs, factor());
      else if (accept('/'))
        lhs = make_div(lhs, factor());
      else
        return lhs;
    }
  }

  ExprPtr factor() {
    if (accept('-')) return make_neg(factor());
    ExprPtr base = primary();
    if (accept('^')) return make_pow(base, integer());
    return base;
  }

  CmpOp comparison() {
    skip_ws();
    if (accept('<')) return accept('=') ? CmpOp::Le : CmpOp::Lt;
    if (accept('>')) return accept('=') ? CmpOp::Ge : CmpOp::Gt;
    fail("expected a comparison in piecewise guard");
  }

  ExprPtr primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_const(number());
    if (c == '(') {
      ++pos;
      ExprPtr inner = expr();
      expect(')');
      return inner;
    }
    std::string name = ident();
    if (name.empty()) fail("unexpected character");
    if (name == "pow") {
      expect('(');
      ExprPtr a = expr();
      expect(',');
      int k = integer();
      expect(')');
      return make_pow(a, k);
    }
    if (name == "abs") {
      if (!in_guard) fail("abs() is only allowed inside piecewise guards");
      expect('(');
      ExprPtr a = expr();
      expect(')');
      return make_abs(a);
    }
    if (name == "piecewise") {
      expect('(');
      in_guard = true;
      ExprPtr gl = expr();
      CmpOp op = comparison();
      ExprPtr gr = expr();
      in_guard = false;
      expect(',');
      ExprPtr then_e = expr();
      expect(',');
      ExprPtr else_e = expr();
      expect(')');
      validate_guard_side(*gl);
      validate_guard_side(*gr);
      return make_piecewise(gl, op, gr, then_e, else_e);
    }
    return make_var(var_index(name));
  }

  // guard sides must be affine or abs(affine) so interval resolution is exact
  void validate_guard_side(const Expr& e) {
    const Expr* body = &e;
    if (e.kind == ExprKind::Abs) body = e.a.get();
    if (!affine_form(*body, dim))
      fail("piecewise guard sides must be affine or abs of affine");
  }
};

}  // namespace

ExprPtr parse_expr(const std::string& src, int dim) {
  Parser p(src, dim);
  ExprPtr e = p.expr();
  p.skip_ws();
  if (p.pos != src.size()) p.fail("trailing input");
  return e;
}

Vec ExpressionMap::evaluate(const Vec& x) const {
  Vec out(outs.size());
  for (std::size_t i = 0; i < outs.size(); ++i) out[i] = eval(*outs[i], x);
  return out;
}

IBox ExpressionMap::interval_evaluate(const IBox& x) const {
  IBox out(outs.size());
  for (std::size_t i = 0; i < outs.size(); ++i) out[i] = eval(*outs[i], x);
  return out;
}

Box ExpressionMap::interval_evaluate(const Box& x) const {
  IBox out = interval_evaluate(to_ibox(x));
  Box b;
  b.lo.resize(out.size());
  b.hi.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    b.lo[i] = out[i].lo;
    b.hi[i] = out[i].hi;
  }
  return b;
}

bool ExpressionMap::is_affine() const {
  for (const auto& e : outs)
    if (!affine_form(*e, in_dim)) return false;
  return true;
}

std::optional<std::pair<std::vector<Vec>, Vec>> ExpressionMap::as_affine() const {
  std::vector<Vec> M;
  Vec c;
  for (const auto& e : outs) {
    auto f = affine_form(*e, in_dim);
    if (!f) return std::nullopt;
    M.push_back(f->coeffs);
    c.push_back(f->constant);
  }
  return std::make_pair(std::move(M), std::move(c));
}

ExpressionMap parse_map(const std::vector<std::string>& exprs, int in_dim) {
  ExpressionMap map;
  map.in_dim = in_dim;
  map.sources = exprs;
  for (const auto& s : exprs) map.outs.push_back(parse_expr(s, in_dim));
  return map;
}

}  // namespace multires
