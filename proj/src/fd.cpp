#include "fd.hpp"

#include <string>

#include "errors.hpp"

namespace fc {

namespace {

double eval_at(const ScalarFn& f, const Eigen::VectorXd& point,
               const Eigen::VectorXd& offset) {
  try {
    return f(point + offset);
  } catch (const DomainError& e) {
    std::string where = "(";
    for (int i = 0; i < offset.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s%+.3g", i ? ", " : "", offset[i]);
      where += buf;
    }
    where += ")";
    throw DomainError(std::string(e.what()) + " at stencil offset " + where,
                      e.offending_value);
  }
}

}  // namespace

FdDerivatives fd_derivatives(const ScalarFn& f, const Eigen::VectorXd& point,
                             double step) {
  if (!(step > 0.0)) {
    throw ArgumentError("finite-difference step must be positive");
  }
  const int m = static_cast<int>(point.size());
  const double h = step;

  FdDerivatives out;
  out.grad.resize(m);
  out.hess.resize(m, m);

  const double f0 = eval_at(f, point, Eigen::VectorXd::Zero(m));

  Eigen::VectorXd fp(m), fm(m);  // f(x +/- h e_i), reused for the diagonal
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[i] = h;
    fp[i] = eval_at(f, point, e);
    fm[i] = eval_at(f, point, -e);
    out.grad[i] = (fp[i] - fm[i]) / (2.0 * h);
    out.hess(i, i) = (fp[i] - 2.0 * f0 + fm[i]) / (h * h);
  }

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
      e[i] = h;
      e[j] = h;
      Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
      d[i] = h;
      d[j] = -h;
      const double val = (eval_at(f, point, e) - eval_at(f, point, d) -
                          eval_at(f, point, -d) + eval_at(f, point, -e)) /
                         (4.0 * h * h);
      out.hess(i, j) = val;
      out.hess(j, i) = val;
    }
  }
  return out;
}

}  // namespace fc
