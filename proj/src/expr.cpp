#include "mso/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace mso::expr {

namespace {

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->op == Op::Const && n->value == v;
}

}  // namespace

NodePtr constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr variable(int i) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = i;
  return n;
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return constant(a->value + b->value);
  return make(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return constant(a->value - b->value);
  if (is_const(a, 0.0)) return make(Op::Neg, std::move(b));
  return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return constant(a->value * b->value);
  return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const && b->value != 0.0)
    return constant(a->value / b->value);
  return make(Op::Div, std::move(a), std::move(b));
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    auto e = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("expression parse error at position " + std::to_string(pos_) +
                     ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expression() {
    auto e = term();
    for (;;) {
      if (consume('+')) e = add(e, term());
      else if (consume('-')) e = sub(e, term());
      else return e;
    }
  }

  NodePtr term() {
    auto e = unary();
    for (;;) {
      if (consume('*')) e = mul(e, unary());
      else if (consume('/')) e = div(e, unary());
      else return e;
    }
  }

  NodePtr unary() {
    if (consume('-')) return make(Op::Neg, unary());
    if (consume('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (consume('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expression();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    double v = 0.0;
    try {
      v = std::stod(s_.substr(pos_, end - pos_));
    } catch (const std::exception&) {
      fail("bad number literal");
    }
    pos_ = end;
    return constant(v);
  }

  NodePtr identifier() {
    size_t end = pos_;
    while (end < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      ++end;
    std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "x1" || name == "x") return variable(0);
    if (name == "x2" || name == "y") return variable(1);
    if (name == "x3" || name == "z") return variable(2);
    if (name == "pi") return constant(kPi);
    static const struct { const char* name; Op op; } kFns[] = {
        {"exp", Op::Exp}, {"log", Op::Log}, {"sin", Op::Sin},
        {"cos", Op::Cos}, {"sqrt", Op::Sqrt}, {"tanh", Op::Tanh},
    };
    for (const auto& fn : kFns) {
      if (name == fn.name) {
        if (!consume('(')) fail("expected '(' after function name");
        auto arg = expression();
        if (!consume(')')) fail("expected ')'");
        return make(fn.op, arg);
      }
    }
    fail("unknown identifier '" + name + "'");
  }
};

}  // namespace

NodePtr parse(const std::string& text) { return Parser(text).run(); }

double eval(const NodePtr& n, const Vec3& x) {
  switch (n->op) {
    case Op::Const: return n->value;
    case Op::Var: return x[n->var];
    case Op::Add: return eval(n->a, x) + eval(n->b, x);
    case Op::Sub: return eval(n->a, x) - eval(n->b, x);
    case Op::Mul: return eval(n->a, x) * eval(n->b, x);
    case Op::Div: return eval(n->a, x) / eval(n->b, x);
    case Op::Pow: return std::pow(eval(n->a, x), eval(n->b, x));
    case Op::Neg: return -eval(n->a, x);
    case Op::Exp: return std::exp(eval(n->a, x));
    case Op::Log: return std::log(eval(n->a, x));
    case Op::Sin: return std::sin(eval(n->a, x));
    case Op::Cos: return std::cos(eval(n->a, x));
    case Op::Sqrt: return std::sqrt(eval(n->a, x));
    case Op::Tanh: return std::tanh(eval(n->a, x));
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(n->var == var ? 1.0 : 0.0);
    case Op::Add: return add(diff(n->a, var), diff(n->b, var));
    case Op::Sub: return sub(diff(n->a, var), diff(n->b, var));
    case Op::Mul:
      return add(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var)));
    case Op::Div:
      return div(sub(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var))),
                 mul(n->b, n->b));
    case Op::Pow: {
      // General a^b via a^b * (b' log a + b a'/a); constant exponents simplified.
      if (n->b->op == Op::Const) {
        double p = n->b->value;
        return mul(mul(constant(p), make(Op::Pow, n->a, constant(p - 1.0))),
                   diff(n->a, var));
      }
      auto logterm = mul(diff(n->b, var), make(Op::Log, n->a));
      auto ratio = mul(n->b, div(diff(n->a, var), n->a));
      return mul(make(Op::Pow, n->a, n->b), add(logterm, ratio));
    }
    case Op::Neg: return sub(constant(0.0), diff(n->a, var));
    case Op::Exp: return mul(make(Op::Exp, n->a), diff(n->a, var));
    case Op::Log: return div(diff(n->a, var), n->a);
    case Op::Sin: return mul(make(Op::Cos, n->a), diff(n->a, var));
    case Op::Cos: return sub(constant(0.0), mul(make(Op::Sin, n->a), diff(n->a, var)));
    case Op::Sqrt:
      return div(diff(n->a, var), mul(constant(2.0), make(Op::Sqrt, n->a)));
    case Op::Tanh: {
      auto t = make(Op::Tanh, n->a);
      return mul(sub(constant(1.0), mul(t, t)), diff(n->a, var));
    }
  }
  return constant(0.0);
}

std::string to_string(const NodePtr& n) {
  std::ostringstream os;
  switch (n->op) {
    case Op::Const: os << n->value; break;
    case Op::Var: os << "x" << (n->var + 1); break;
    case Op::Add: os << "(" << to_string(n->a) << " + " << to_string(n->b) << ")"; break;
    case Op::Sub: os << "(" << to_string(n->a) << " - " << to_string(n->b) << ")"; break;
    case Op::Mul: os << "(" << to_string(n->a) << " * " << to_string(n->b) << ")"; break;
    case Op::Div: os << "(" << to_string(n->a) << " / " << to_string(n->b) << ")"; break;
    case Op::Pow: os << "(" << to_string(n->a) << " ^ " << to_string(n->b) << ")"; break;
    case Op::Neg: os << "(-" << to_string(n->a) << ")"; break;
    case Op::Exp: os << "exp(" << to_string(n->a) << ")"; break;
    case Op::Log: os << "log(" << to_string(n->a) << ")"; break;
    case Op::Sin: os << "sin(" << to_string(n->a) << ")"; break;
    case Op::Cos: os << "cos(" << to_string(n->a) << ")"; break;
    case Op::Sqrt: os << "sqrt(" << to_string(n->a) << ")"; break;
    case Op::Tanh: os << "tanh(" << to_string(n->a) << ")"; break;
  }
  return os.str();
}

Expr::Expr(NodePtr root) : root_(std::move(root)) {
  NodePtr lap = constant(0.0);
  for (int i = 0; i < 3; ++i) {
    grad_[i] = diff(root_, i);
    lap = add(lap, diff(grad_[i], i));
  }
  lap_ = lap;
}

Vec3 Expr::gradient(const Vec3& x) const {
  return Vec3(eval(grad_[0], x), eval(grad_[1], x), eval(grad_[2], x));
}

double Expr::laplacian(const Vec3& x) const { return eval(lap_, x); }

}  // namespace mso::expr
