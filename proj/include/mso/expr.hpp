#pragma once

// Closed-form scalar expressions over x1, x2, x3 with symbolic differentiation.
// This is the representation behind the scenario-file potential strings.

#include <memory>
#include <stdexcept>
#include <string>

#include "mso/types.hpp"

namespace mso::expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Op {
  Const, Var,            // leaves (Var index 0..2)
  Add, Sub, Mul, Div, Pow,
  Neg,
  Exp, Log, Sin, Cos, Sqrt, Tanh,
};

struct Node {
  Op op = Op::Const;
  double value = 0.0;    // Const
  int var = 0;           // Var
  NodePtr a, b;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grammar: usual precedence, right-associative '^', functions exp/log/sin/cos/
// sqrt/tanh, variables x1,x2,x3 (aliases x,y,z), constant pi.
NodePtr parse(const std::string& text);

NodePtr constant(double v);
NodePtr variable(int i);
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr div(NodePtr a, NodePtr b);

double eval(const NodePtr& n, const Vec3& x);
NodePtr diff(const NodePtr& n, int var);
std::string to_string(const NodePtr& n);

// Convenience wrapper caching first derivatives and the Laplacian.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}
  explicit Expr(NodePtr root);
  explicit Expr(const std::string& text) : Expr(parse(text)) {}

  double operator()(const Vec3& x) const { return eval(root_, x); }
  Vec3 gradient(const Vec3& x) const;
  double laplacian(const Vec3& x) const;
  const NodePtr& root() const { return root_; }
  Expr derivative(int var) const { return Expr(grad_[var]); }

 private:
  NodePtr root_;
  NodePtr grad_[3];
  NodePtr lap_;
};

}  // namespace mso::expr
