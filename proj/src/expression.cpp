// Copyright 2026 The smoothlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <smoothlab/expression.hpp>

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace smoothlab {

enum class Op { Const, Lambda, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Abs, Sqrt };

struct Expression::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodeP = std::shared_ptr<const Expression::Node>;

NodeP make(Op op, NodeP l = nullptr, NodeP r = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

NodeP num(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

bool is_const(const NodeP& n, double v) { return n->op == Op::Const && n->value == v; }

// Constant folding and the identities that keep derivatives readable.
NodeP add(NodeP a, NodeP b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return num(a->value + b->value);
  return make(Op::Add, a, b);
}
NodeP sub(NodeP a, NodeP b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return num(a->value - b->value);
  if (is_const(a, 0.0)) return make(Op::Neg, b);
  return make(Op::Sub, a, b);
}
NodeP mul(NodeP a, NodeP b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return num(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return num(a->value * b->value);
  return make(Op::Mul, a, b);
}
NodeP div(NodeP a, NodeP b) {
  if (is_const(a, 0.0)) return num(0.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::Div, a, b);
}
NodeP neg(NodeP a) {
  if (a->op == Op::Const) return num(-a->value);
  return make(Op::Neg, a);
}
NodeP pw(NodeP a, NodeP b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return num(1.0);
  return make(Op::Pow, a, b);
}

double eval(const Expression::Node& n, double x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Lambda: return x;
    case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::Pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
    case Op::Neg: return -eval(*n.lhs, x);
    case Op::Exp: return std::exp(eval(*n.lhs, x));
    case Op::Log: return std::log(eval(*n.lhs, x));
    case Op::Abs: return std::abs(eval(*n.lhs, x));
    case Op::Sqrt: return std::sqrt(eval(*n.lhs, x));
  }
  return 0.0;
}

bool depends_on_lambda(const NodeP& n) {
  if (!n) return false;
  if (n->op == Op::Lambda) return true;
  return depends_on_lambda(n->lhs) || depends_on_lambda(n->rhs);
}

NodeP diff(const NodeP& n) {
  const NodeP& u = n->lhs;
  const NodeP& v = n->rhs;
  switch (n->op) {
    case Op::Const: return num(0.0);
    case Op::Lambda: return num(1.0);
    case Op::Add: return add(diff(u), diff(v));
    case Op::Sub: return sub(diff(u), diff(v));
    case Op::Mul: return add(mul(diff(u), v), mul(u, diff(v)));
    case Op::Div: return div(sub(mul(diff(u), v), mul(u, diff(v))), pw(v, num(2.0)));
    case Op::Neg: return neg(diff(u));
    case Op::Exp: return mul(n, diff(u));
    case Op::Log: return div(diff(u), u);
    case Op::Abs: return mul(div(u, n), diff(u));  // sign(u) u'
    case Op::Sqrt: return div(diff(u), mul(num(2.0), n));
    case Op::Pow:
      if (!depends_on_lambda(v)) return mul(mul(v, pw(u, sub(v, num(1.0)))), diff(u));
      // u^v (v' log u + v u' / u)
      return mul(n, add(mul(diff(v), make(Op::Log, u)), div(mul(v, diff(u)), u)));
  }
  return num(0.0);
}

int precedence(Op op) {
  switch (op) {
    case Op::Add: case Op::Sub: return 1;
    case Op::Mul: case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

std::string print(const NodeP& n) {
  auto wrap = [&](const NodeP& c, int p) {
    const std::string s = print(c);
    return precedence(c->op) < p ? "(" + s + ")" : s;
  };
  switch (n->op) {
    case Op::Const: {
      std::ostringstream os;
      os.precision(17);
      os << n->value;
      return n->value < 0 ? "(" + os.str() + ")" : os.str();
    }
    case Op::Lambda: return "lambda";
    case Op::Add: return wrap(n->lhs, 1) + " + " + wrap(n->rhs, 1);
    case Op::Sub: return wrap(n->lhs, 1) + " - " + wrap(n->rhs, 2);
    case Op::Mul: return wrap(n->lhs, 2) + " * " + wrap(n->rhs, 2);
    case Op::Div: return wrap(n->lhs, 2) + " / " + wrap(n->rhs, 3);
    case Op::Neg: return "-" + wrap(n->lhs, 4);
    case Op::Pow: return wrap(n->lhs, 5) + "^" + wrap(n->rhs, 4);
    case Op::Exp: return "exp(" + print(n->lhs) + ")";
    case Op::Log: return "log(" + print(n->lhs) + ")";
    case Op::Abs: return "abs(" + print(n->lhs) + ")";
    case Op::Sqrt: return "sqrt(" + print(n->lhs) + ")";
  }
  return {};
}

class Parser {
 public:
  Parser(const std::string& text, const std::string& variable) : s_(text), var_(variable) {}

  NodeP parse() {
    NodeP e = expr();
    skip();
    if (pos_ < s_.size()) error("unexpected '" + s_.substr(pos_, 1) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    std::ostringstream os;
    os << "expression \"" << s_ << "\": " << what << " at column " << column();
    fail(ErrorCode::Configuration, os.str());
  }

  // 1-based, counting UTF-8 code points.
  std::size_t column() const {
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i)
      if ((static_cast<unsigned char>(s_[i]) & 0xC0) != 0x80) ++col;
    return col;
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(const std::string& tok) {
    skip();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  NodeP expr() {
    NodeP e = term();
    for (;;) {
      if (eat("+")) e = make(Op::Add, e, term());
      else if (eat("-")) e = make(Op::Sub, e, term());
      else return e;
    }
  }

  NodeP term() {
    NodeP e = unary();
    for (;;) {
      if (eat("*") || eat("×")) e = make(Op::Mul, e, unary());
      else if (eat("/") || eat("÷")) e = make(Op::Div, e, unary());
      else return e;
    }
  }

  NodeP unary() {
    if (eat("-")) return make(Op::Neg, unary());
    if (eat("+")) return unary();
    return power();
  }

  NodeP power() {
    NodeP base = primary();
    if (eat("^")) return make(Op::Pow, base, unary());
    return base;
  }

  NodeP primary() {
    skip();
    if (pos_ >= s_.size()) error("expected an operand");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) error("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return num(v);
    }
    if (eat("(")) {
      NodeP e = expr();
      if (!eat(")")) error("expected ')'");
      return e;
    }
    if (var_ == "lambda" && eat("λ")) return make(Op::Lambda);
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (var_ == "lambda" ? (name == "lambda" || name == "l") : name == var_) return make(Op::Lambda);
      if (name == "pi") return num(kPi);
      Op op;
      if (name == "exp") op = Op::Exp;
      else if (name == "log") op = Op::Log;
      else if (name == "abs") op = Op::Abs;
      else if (name == "sqrt") op = Op::Sqrt;
      else {
        pos_ = start;
        error("unknown name '" + name + "'");
      }
      if (!eat("(")) error("expected '(' after " + name);
      NodeP arg = expr();
      if (!eat(")")) error("expected ')'");
      return make(op, arg);
    }
    error("expected an operand");
  }

  const std::string& s_;
  const std::string& var_;
  std::size_t pos_ = 0;
};

// Zeros of u on the window: sign changes on a fine sample refined by toms748,
// plus exact zeros hit by the sample.
void zeros(const NodeP& u, Interval w, std::vector<double>& out) {
  if (!depends_on_lambda(u)) return;
  const double lo = std::isfinite(w.lo) ? w.lo : -1e6;
  const double hi = std::isfinite(w.hi) ? w.hi : 1e6;
  auto f = [&](double x) { return eval(*u, x); };
  // Integer points first: breakpoints usually sit at round numbers.
  for (double x = std::ceil(lo); x <= hi && x <= std::ceil(lo) + 4096; x += 1.0)
    if (w.contains(x) && f(x) == 0.0) out.push_back(x);
  const int n = 4096;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo + (hi - lo) * i / n, f1 = f(x1);
    if (f1 == 0.0 && w.contains(x1)) out.push_back(x1);
    if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 < 0.0) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, x0, x1, f0, f1,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
      const double z = 0.5 * (r.first + r.second);
      if (w.contains(z)) out.push_back(z);
    }
    x0 = x1;
    f0 = f1;
  }
}

void collect(const NodeP& n, Interval w, std::vector<double>& out) {
  if (!n) return;
  collect(n->lhs, w, out);
  collect(n->rhs, w, out);
  switch (n->op) {
    case Op::Abs: case Op::Sqrt: case Op::Log: zeros(n->lhs, w, out); break;
    case Op::Div: zeros(n->rhs, w, out); break;
    case Op::Pow: {
      const bool const_exp = !depends_on_lambda(n->rhs);
      const double p = const_exp ? eval(*n->rhs, 0.0) : 0.0;
      // Integer powers >= 2 (and 0, 1) are smooth; their derivative is too.
      if (!const_exp || p < 0.0 || p != std::floor(p)) zeros(n->lhs, w, out);
      break;
    }
    default: break;
  }
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {
  if (source_.empty()) source_ = print(root_);
}

Expression Expression::parse(const std::string& text, const std::string& variable) {
  return Expression(Parser(text, variable).parse(), text);
}

Expression Expression::constant(double c) { return Expression(num(c)); }

double Expression::operator()(double lambda) const { return eval(*root_, lambda); }

Expression Expression::derivative() const { return Expression(diff(root_)); }

std::vector<double> Expression::singular_points(Interval window) const {
  std::vector<double> out;
  collect(root_, window, out);
  std::sort(out.begin(), out.end());
  // Merge roots found twice (once by the integer pass, once by bracketing).
  std::vector<double> merged;
  for (double x : out)
    if (merged.empty() || std::abs(x - merged.back()) > 1e-12 * std::max(1.0, std::abs(x))) merged.push_back(x);
  return merged;
}

std::string Expression::to_string() const { return print(root_); }

SpectralFunction spectral_function_from_expressions(const std::string& sigma, const std::string& a, Interval window,
                                                    double breakpoint_margin) {
  const Expression s = Expression::parse(sigma);
  const Expression e = Expression::parse(a);
  const Expression d = e.derivative();
  SpectralFunction sf;
  sf.sigma = [s](double l) { return s(l); };
  sf.a = [e](double l) { return e(l); };
  sf.a_prime = [d](double l) { return d(l); };
  sf.window = window;
  sf.breakpoint_margin = breakpoint_margin;
  std::vector<double> bp = s.singular_points(window);
  for (double x : e.singular_points(window)) bp.push_back(x);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  sf.breakpoints = bp;
  return sf;
}

}  // namespace smoothlab
