#include "pevp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "pevp/error.hpp"

namespace pevp {

namespace {

Expr make_node(ExprNode::Op op, std::vector<Expr> args = {}, double value = 0.0,
               int exponent = 0) {
  auto node = std::make_shared<ExprNode>();
  node->op = op;
  node->value = value;
  node->exponent = exponent;
  node->args = std::move(args);
  return node;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    Expr e = expr();
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        lhs = make_node(ExprNode::Op::Add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make_node(ExprNode::Op::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    skip_space();
    if (accept('-')) return make_node(ExprNode::Op::Neg, {term()});
    return product();
  }

  Expr product() {
    Expr lhs = factor();
    for (;;) {
      skip_space();
      if (accept('*')) {
        lhs = make_node(ExprNode::Op::Mul, {lhs, factor()});
      } else if (accept('/')) {
        lhs = make_node(ExprNode::Op::Div, {lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    Expr b = base();
    skip_space();
    if (!accept('^')) return b;
    skip_space();
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a nonnegative integer literal");
    int exponent = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
    if (ec != std::errc{} || exponent > 1024) {
      pos_ = start;
      fail("exponent out of range");
    }
    return make_node(ExprNode::Op::Pow, {b}, 0.0, exponent);
  }

  Expr base() {
    skip_space();
    if (at_end()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make_node(ExprNode::Op::Neg, {base()});
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc{}) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (pos_ == start) fail("malformed number");
    return make_node(ExprNode::Op::Number, {}, value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "mu") return make_node(ExprNode::Op::Mu);

    ExprNode::Op op{};
    if (name == "exp") op = ExprNode::Op::Exp;
    else if (name == "sin") op = ExprNode::Op::Sin;
    else if (name == "cos") op = ExprNode::Op::Cos;
    else if (name == "sqrt") op = ExprNode::Op::Sqrt;
    else if (name == "log") op = ExprNode::Op::Log;
    else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    skip_space();
    expect('(');
    Expr arg = expr();
    expect(')');
    return make_node(op, {arg});
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool accept(char c) {
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() const { return pos_ >= text_.size(); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_ + 1, what); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

const char* op_name(ExprNode::Op op) {
  switch (op) {
    case ExprNode::Op::Neg: return "Neg";
    case ExprNode::Op::Add: return "Add";
    case ExprNode::Op::Sub: return "Sub";
    case ExprNode::Op::Mul: return "Mul";
    case ExprNode::Op::Div: return "Div";
    case ExprNode::Op::Pow: return "Pow";
    case ExprNode::Op::Exp: return "Exp";
    case ExprNode::Op::Sin: return "Sin";
    case ExprNode::Op::Cos: return "Cos";
    case ExprNode::Op::Sqrt: return "Sqrt";
    case ExprNode::Op::Log: return "Log";
    default: return "?";
  }
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

[[noreturn]] void domain_error(const std::string& what) { throw Error(ErrorKind::Domain, what); }

// Truncated Taylor series in normalized form: c_k = f^(k)(mu0) / k!.
using Coeffs = std::vector<double>;

Coeffs mul(const Coeffs& a, const Coeffs& b) {
  Coeffs c(a.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    for (std::size_t i = 0; i <= k; ++i) c[k] += a[i] * b[k - i];
  }
  return c;
}

Coeffs div(const Coeffs& a, const Coeffs& b) {
  if (b[0] == 0.0) domain_error("division by a series with zero constant term");
  Coeffs c(a.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    double acc = a[k];
    for (std::size_t i = 1; i <= k; ++i) acc -= b[i] * c[k - i];
    c[k] = acc / b[0];
  }
  return c;
}

Coeffs exp_series(const Coeffs& a) {
  Coeffs e(a.size(), 0.0);
  e[0] = std::exp(a[0]);
  for (std::size_t k = 1; k < e.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= k; ++i) acc += static_cast<double>(i) * a[i] * e[k - i];
    e[k] = acc / static_cast<double>(k);
  }
  return e;
}

Coeffs log_series(const Coeffs& a) {
  if (!(a[0] > 0.0)) domain_error("log of a series with nonpositive constant term");
  Coeffs l(a.size(), 0.0);
  l[0] = std::log(a[0]);
  for (std::size_t k = 1; k < l.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i < k; ++i) acc += static_cast<double>(i) * l[i] * a[k - i];
    l[k] = (a[k] - acc / static_cast<double>(k)) / a[0];
  }
  return l;
}

std::pair<Coeffs, Coeffs> sin_cos_series(const Coeffs& a) {
  Coeffs s(a.size(), 0.0);
  Coeffs c(a.size(), 0.0);
  s[0] = std::sin(a[0]);
  c[0] = std::cos(a[0]);
  for (std::size_t k = 1; k < s.size(); ++k) {
    double ss = 0.0;
    double cc = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      const double w = static_cast<double>(i) * a[i];
      ss += w * c[k - i];
      cc -= w * s[k - i];
    }
    s[k] = ss / static_cast<double>(k);
    c[k] = cc / static_cast<double>(k);
  }
  return {s, c};
}

Coeffs sqrt_series(const Coeffs& a) {
  if (!(a[0] > 0.0)) domain_error("sqrt of a series with nonpositive constant term");
  Coeffs r(a.size(), 0.0);
  r[0] = std::sqrt(a[0]);
  for (std::size_t k = 1; k < r.size(); ++k) {
    double acc = a[k];
    for (std::size_t i = 1; i < k; ++i) acc -= r[i] * r[k - i];
    r[k] = acc / (2.0 * r[0]);
  }
  return r;
}

Coeffs pow_series(Coeffs base, int exponent) {
  Coeffs result(base.size(), 0.0);
  result[0] = 1.0;
  while (exponent > 0) {
    if (exponent & 1) result = mul(result, base);
    exponent >>= 1;
    if (exponent > 0) base = mul(base, base);
  }
  return result;
}

Coeffs series_of(const ExprNode& node, double mu0, std::size_t len) {
  using Op = ExprNode::Op;
  auto arg = [&](std::size_t i) { return series_of(*node.args[i], mu0, len); };
  switch (node.op) {
    case Op::Number: {
      Coeffs c(len, 0.0);
      c[0] = node.value;
      return c;
    }
    case Op::Mu: {
      Coeffs c(len, 0.0);
      c[0] = mu0;
      if (len > 1) c[1] = 1.0;
      return c;
    }
    case Op::Neg: {
      Coeffs c = arg(0);
      for (double& x : c) x = -x;
      return c;
    }
    case Op::Add:
    case Op::Sub: {
      Coeffs a = arg(0);
      const Coeffs b = arg(1);
      const double sign = node.op == Op::Add ? 1.0 : -1.0;
      for (std::size_t k = 0; k < len; ++k) a[k] += sign * b[k];
      return a;
    }
    case Op::Mul: return mul(arg(0), arg(1));
    case Op::Div: return div(arg(0), arg(1));
    case Op::Pow: return pow_series(arg(0), node.exponent);
    case Op::Exp: return exp_series(arg(0));
    case Op::Sin: return sin_cos_series(arg(0)).first;
    case Op::Cos: return sin_cos_series(arg(0)).second;
    case Op::Sqrt: return sqrt_series(arg(0));
    case Op::Log: return log_series(arg(0));
  }
  domain_error("malformed expression node");
}

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const ExprNode& node) {
  switch (node.op) {
    case ExprNode::Op::Number: return format_number(node.value);
    case ExprNode::Op::Mu: return "mu";
    case ExprNode::Op::Pow:
      return std::string("Pow(") + to_string(*node.args[0]) + ", " +
             std::to_string(node.exponent) + ")";
    default: break;
  }
  std::string out = op_name(node.op);
  out += "(";
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(*node.args[i]);
  }
  out += ")";
  return out;
}

double evaluate(const ExprNode& node, double mu) {
  using Op = ExprNode::Op;
  auto arg = [&](std::size_t i) { return evaluate(*node.args[i], mu); };
  double r = 0.0;
  switch (node.op) {
    case Op::Number: r = node.value; break;
    case Op::Mu: r = mu; break;
    case Op::Neg: r = -arg(0); break;
    case Op::Add: r = arg(0) + arg(1); break;
    case Op::Sub: r = arg(0) - arg(1); break;
    case Op::Mul: r = arg(0) * arg(1); break;
    case Op::Div: r = arg(0) / arg(1); break;
    case Op::Pow: {
      const double b = arg(0);
      r = 1.0;
      for (int k = 0; k < node.exponent; ++k) r *= b;
      break;
    }
    case Op::Exp: r = std::exp(arg(0)); break;
    case Op::Sin: r = std::sin(arg(0)); break;
    case Op::Cos: r = std::cos(arg(0)); break;
    case Op::Sqrt: r = std::sqrt(arg(0)); break;
    case Op::Log: r = std::log(arg(0)); break;
  }
  if (!std::isfinite(r)) {
    domain_error("expression " + to_string(node) + " is not finite at mu = " + std::to_string(mu));
  }
  return r;
}

std::vector<double> taylor_arith_eval(const ExprNode& node, double mu0, int order) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "order must be nonnegative");
  Coeffs c = series_of(node, mu0, static_cast<std::size_t>(order) + 1);
  double factorial = 1.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k > 0) factorial *= static_cast<double>(k);
    c[k] *= factorial;
    if (!std::isfinite(c[k])) {
      domain_error("derivative of order " + std::to_string(k) + " is not finite at mu0 = " +
                   std::to_string(mu0));
    }
  }
  return c;
}

}  // namespace pevp
