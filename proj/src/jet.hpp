#pragma once

// Second-order forward-mode AD. A Jet2 carries the value, gradient and dense
// Hessian of a scalar expression in m seeded variables; arithmetic propagates
// all three through product/quotient/chain rules, so derivatives of composed
// expressions are exact up to roundoff. Every Hessian update has the shape
// s*H or a*b^T + b*a^T, which keeps the stored matrix exactly symmetric.
//
// Plain (derivative-free) evaluation reuses the same code paths with m = 0.

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "errors.hpp"

namespace fc {

struct Jet2 {
  double val = 0.0;
  Eigen::VectorXd grad;  // length m
  Eigen::MatrixXd hess;  // m x m, symmetric

  Jet2() = default;

  int vars() const { return static_cast<int>(grad.size()); }

  static Jet2 constant(double value, int nvars) {
    Jet2 j;
    j.val = value;
    j.grad = Eigen::VectorXd::Zero(nvars);
    j.hess = Eigen::MatrixXd::Zero(nvars, nvars);
    return j;
  }

  // Seeds the index-th of nvars independent variables.
  static Jet2 variable(int index, double value, int nvars) {
    if (index < 0 || index >= nvars) {
      throw ArgumentError("jet variable index " + std::to_string(index) +
                          " out of range [0, " + std::to_string(nvars) + ")");
    }
    Jet2 j = constant(value, nvars);
    j.grad[index] = 1.0;
    return j;
  }
};

namespace detail {

inline void check_same_vars(const Jet2& a, const Jet2& b) {
  if (a.vars() != b.vars()) {
    throw ArgumentError("jet operands disagree on variable count (" +
                        std::to_string(a.vars()) + " vs " +
                        std::to_string(b.vars()) + ")");
  }
}

// Composes g(a) given g(a.val) and the first/second derivatives of g there.
inline Jet2 unary_chain(const Jet2& a, double value, double d1, double d2) {
  Jet2 r;
  r.val = value;
  r.grad = d1 * a.grad;
  // Materialize the outer product before scaling; folding d2 into one factor
  // rounds (i,j) and (j,i) differently and loses exact symmetry.
  const Eigen::MatrixXd outer = a.grad * a.grad.transpose();
  r.hess = d1 * a.hess + d2 * outer;
  return r;
}

}  // namespace detail

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  detail::check_same_vars(a, b);
  Jet2 r;
  r.val = a.val + b.val;
  r.grad = a.grad + b.grad;
  r.hess = a.hess + b.hess;
  return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  detail::check_same_vars(a, b);
  Jet2 r;
  r.val = a.val - b.val;
  r.grad = a.grad - b.grad;
  r.hess = a.hess - b.hess;
  return r;
}

inline Jet2 operator-(const Jet2& a) {
  Jet2 r;
  r.val = -a.val;
  r.grad = -a.grad;
  r.hess = -a.hess;
  return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  detail::check_same_vars(a, b);
  Jet2 r;
  r.val = a.val * b.val;
  r.grad = b.val * a.grad + a.val * b.grad;
  // The rank-2 part is summed on its own first; folding it into the longer
  // sum would give (i,j) and (j,i) different rounding orders.
  const Eigen::MatrixXd outer = a.grad * b.grad.transpose();
  r.hess = b.val * a.hess + a.val * b.hess;
  r.hess += outer + outer.transpose();
  return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  detail::check_same_vars(a, b);
  if (b.val == 0.0) {
    throw DomainError("jet division by zero", b.val);
  }
  const double inv = 1.0 / b.val;
  Jet2 r;
  r.val = a.val * inv;
  r.grad = (a.grad - r.val * b.grad) * inv;
  const Eigen::MatrixXd outer = r.grad * b.grad.transpose();
  r.hess = a.hess - r.val * b.hess;
  r.hess -= outer + outer.transpose();
  r.hess *= inv;
  return r;
}

inline Jet2 operator+(const Jet2& a, double s) {
  Jet2 r = a;
  r.val += s;
  return r;
}
inline Jet2 operator+(double s, const Jet2& a) { return a + s; }

inline Jet2 operator-(const Jet2& a, double s) { return a + (-s); }
inline Jet2 operator-(double s, const Jet2& a) { return (-a) + s; }

inline Jet2 operator*(const Jet2& a, double s) {
  Jet2 r;
  r.val = a.val * s;
  r.grad = s * a.grad;
  r.hess = s * a.hess;
  return r;
}
inline Jet2 operator*(double s, const Jet2& a) { return a * s; }

inline Jet2 operator/(const Jet2& a, double s) {
  if (s == 0.0) {
    throw DomainError("jet division by zero", s);
  }
  return a * (1.0 / s);
}

inline Jet2 operator/(double s, const Jet2& b) {
  if (b.val == 0.0) {
    throw DomainError("jet division by zero", b.val);
  }
  const double inv = 1.0 / b.val;
  // d(s/b) = -s/b^2, d^2(s/b) = 2 s/b^3
  return detail::unary_chain(b, s * inv, -s * inv * inv, 2.0 * s * inv * inv * inv);
}

inline Jet2 sqrt(const Jet2& a) {
  if (!(a.val > 0.0)) {
    throw DomainError("jet sqrt of non-positive value", a.val);
  }
  const double s = std::sqrt(a.val);
  return detail::unary_chain(a, s, 0.5 / s, -0.25 / (a.val * s));
}

// Integer power; negative exponents require a nonzero base.
inline Jet2 powi(const Jet2& a, int p) {
  if (p == 0) {
    return Jet2::constant(1.0, a.vars());
  }
  if (p < 0 && a.val == 0.0) {
    throw DomainError("jet negative power of zero", a.val);
  }
  const double pd = static_cast<double>(p);
  const double value = std::pow(a.val, pd);
  const double d1 = pd * std::pow(a.val, pd - 1.0);
  const double d2 =
      (p == 1) ? 0.0 : pd * (pd - 1.0) * std::pow(a.val, pd - 2.0);
  return detail::unary_chain(a, value, d1, d2);
}

}  // namespace fc
