#pragma once

// Magnetic and electric potentials as closed-form expressions. A is real
// valued; q is stored complex (real and imaginary parts as expressions) even
// though shipped scenarios use real q.

#include <array>
#include <string>

#include "mso/expr.hpp"
#include "mso/types.hpp"

namespace mso {

class Potentials {
 public:
  Potentials() : Potentials("0", "0", "0", "0") {}
  Potentials(const std::string& a1, const std::string& a2, const std::string& a3,
             const std::string& q, const std::string& q_im = "0",
             std::string id = "")
      : a_{expr::Expr(a1), expr::Expr(a2), expr::Expr(a3)},
        q_re_(q), q_im_(q_im), id_(std::move(id)) {}
  Potentials(std::array<expr::Expr, 3> a, expr::Expr q_re, expr::Expr q_im,
             std::string id = "")
      : a_(std::move(a)), q_re_(std::move(q_re)), q_im_(std::move(q_im)),
        id_(std::move(id)) {}

  Vec3 A(const Vec3& x) const {
    return Vec3(a_[0](x), a_[1](x), a_[2](x));
  }
  double div_A(const Vec3& x) const {
    return a_[0].gradient(x)[0] + a_[1].gradient(x)[1] + a_[2].gradient(x)[2];
  }
  // Jacobian dA, row i = gradient of A_i.
  Mat3 jacobian_A(const Vec3& x) const {
    Mat3 j;
    for (int i = 0; i < 3; ++i) j.row(i) = a_[i].gradient(x).transpose();
    return j;
  }
  cdouble q(const Vec3& x) const { return {q_re_(x), q_im_(x)}; }
  bool q_is_real() const {
    return q_im_.root()->op == expr::Op::Const && q_im_.root()->value == 0.0;
  }

  const expr::Expr& component(int i) const { return a_[i]; }
  const expr::Expr& q_real_part() const { return q_re_; }
  const expr::Expr& q_imag_part() const { return q_im_; }
  const std::string& id() const { return id_; }

  // L_{A,q} u for a closed-form u, evaluated pointwise:
  //   -Lap(u) - 2i A.grad(u) - i (div A) u + (|A|^2 + q) u.
  cdouble apply(const expr::Expr& u, const Vec3& x) const {
    Vec3 a = A(x);
    return -u.laplacian(x) - 2.0 * kI * a.dot(u.gradient(x)) -
           kI * div_A(x) * u(x) + (a.squaredNorm() + q(x)) * u(x);
  }

 private:
  std::array<expr::Expr, 3> a_;
  expr::Expr q_re_, q_im_;
  std::string id_;
};

}  // namespace mso
