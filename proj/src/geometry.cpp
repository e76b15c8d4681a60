#include "geometry.hpp"

#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "jet.hpp"

namespace fc {

namespace {

// y-block of the squared-length Hessian, halved. Shared by the public
// entry points so they agree on what "the tensor" is.
Eigen::MatrixXd metric_tensor_matrix(const MetricSpec& spec,
                                     const SamplePoint& p) {
  const int n = spec.dim;
  const Jet2 f2 = finsler_squared_jet(spec, p);
  return 0.5 * f2.hess.block(n, n, n, n);
}

}  // namespace

FundamentalTensor fundamental_tensor(const MetricSpec& spec,
                                     const SamplePoint& p) {
  FundamentalTensor t;
  t.g = metric_tensor_matrix(spec, p);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.g);
  t.min_eig = es.eigenvalues().minCoeff();
  if (!(t.min_eig > 0.0)) {
    throw ConvexityError("fundamental tensor not positive definite", t.min_eig);
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(t.g);
  if (llt.info() != Eigen::Success) {
    throw ConvexityError("fundamental tensor factorization failed", t.min_eig);
  }
  t.g_inv = llt.solve(Eigen::MatrixXd::Identity(spec.dim, spec.dim));
  return t;
}

double convexity_min_eig(const MetricSpec& spec, const SamplePoint& p) {
  const Eigen::MatrixXd g = metric_tensor_matrix(spec, p);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  return es.eigenvalues().minCoeff();
}

Eigen::VectorXd spray_coefficients(const MetricSpec& spec,
                                   const SamplePoint& p) {
  const int n = spec.dim;
  const Jet2 f2 = finsler_squared_jet(spec, p);
  const FundamentalTensor t = fundamental_tensor(spec, p);
  Eigen::VectorXd rhs(n);
  for (int l = 0; l < n; ++l) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += f2.hess(k, n + l) * p.y[k];
    rhs[l] = acc - f2.grad[l];
  }
  return 0.25 * (t.g_inv * rhs);
}

ProjectiveFactor projective_factor(const MetricSpec& spec,
                                   const SamplePoint& p) {
  const Eigen::VectorXd G = spray_coefficients(spec, p);
  ProjectiveFactor out;
  out.value = G.dot(p.y) / p.y.squaredNorm();
  out.residual = (G - out.value * p.y).norm() / std::max(1.0, G.norm());
  return out;
}

DualPotentialCheck dual_potential_check(const MetricSpec& spec,
                                        const SamplePoint& p) {
  const int n = spec.dim;
  const Jet2 f2 = finsler_squared_jet(spec, p);
  const FundamentalTensor t = fundamental_tensor(spec, p);

  DualPotentialCheck out;
  double h = 0.0;
  for (int m = 0; m < n; ++m) h += f2.grad[m] * p.y[m];
  out.potential = -h / 6.0;

  Eigen::VectorXd hy(n);
  for (int j = 0; j < n; ++j) {
    double acc = f2.grad[j];
    for (int m = 0; m < n; ++m) acc += f2.hess(m, n + j) * p.y[m];
    hy[j] = -acc / 6.0;
  }
  const Eigen::VectorXd predicted = -0.5 * (t.g_inv * hy);
  const Eigen::VectorXd G = spray_coefficients(spec, p);
  out.residual = (G - predicted).lpNorm<Eigen::Infinity>() /
                 std::max(1.0, G.lpNorm<Eigen::Infinity>());
  return out;
}

GeodesicTrace geodesic_integrate(const MetricSpec& spec,
                                 const Eigen::VectorXd& x0,
                                 const Eigen::VectorXd& y0, double t_max,
                                 int steps) {
  const int n = spec.dim;
  if (x0.size() != n || y0.size() != n) {
    throw ArgumentError("initial condition dimension mismatch");
  }
  if (!(t_max > 0.0)) {
    throw ArgumentError("integration horizon must be positive");
  }
  if (steps < 1) {
    throw ArgumentError("integration needs at least one step");
  }

  GeodesicTrace trace;
  trace.step = t_max / steps;

  auto deriv = [&](const Eigen::VectorXd& s) {
    SamplePoint p;
    p.x = s.head(n);
    p.y = s.tail(n);
    Eigen::VectorXd d(2 * n);
    d.head(n) = p.y;
    d.tail(n) = -2.0 * spray_coefficients(spec, p);
    return d;
  };

  Eigen::VectorXd s(2 * n);
  s.head(n) = x0;
  s.tail(n) = y0;

  // The initial condition itself must be admissible.
  {
    SamplePoint p;
    p.x = x0;
    p.y = y0;
    validate_point(spec, p);
  }
  trace.states.push_back(s);

  const double h = trace.step;
  for (int i = 0; i < steps; ++i) {
    try {
      const Eigen::VectorXd k1 = deriv(s);
      const Eigen::VectorXd k2 = deriv(s + 0.5 * h * k1);
      const Eigen::VectorXd k3 = deriv(s + 0.5 * h * k2);
      const Eigen::VectorXd k4 = deriv(s + h * k3);
      const Eigen::VectorXd next =
          s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      SamplePoint p;
      p.x = next.head(n);
      p.y = next.tail(n);
      validate_point(spec, p);
      s = next;
      trace.states.push_back(s);
    } catch (const DomainError&) {
      trace.truncated = true;
      break;
    } catch (const ConvexityError&) {
      trace.truncated = true;
      break;
    }
  }
  return trace;
}

double straightness_residual(const GeodesicTrace& trace) {
  if (trace.states.size() < 3) {
    throw ArgumentError("straightness needs at least three trace states");
  }
  const int n = static_cast<int>(trace.states.front().size()) / 2;
  const Eigen::VectorXd a = trace.states.front().head(n);
  const Eigen::VectorXd b = trace.states.back().head(n);
  const double chord = (b - a).norm();
  if (!(chord > 0.0)) {
    throw ArgumentError("degenerate trace: endpoints coincide");
  }
  const Eigen::VectorXd dir = (b - a) / chord;
  double worst = 0.0;
  for (const Eigen::VectorXd& s : trace.states) {
    const Eigen::VectorXd d = s.head(n) - a;
    const double off = (d - d.dot(dir) * dir).norm();
    worst = std::max(worst, off);
  }
  return worst / chord;
}

std::string trace_to_csv(const GeodesicTrace& trace) {
  if (trace.states.empty()) {
    throw ArgumentError("empty trace");
  }
  const int n = static_cast<int>(trace.states.front().size()) / 2;
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= n; ++i) out += ",xd" + std::to_string(i);
  out += "\n";

  char buf[64];
  auto push = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
  };
  for (size_t i = 0; i < trace.states.size(); ++i) {
    push(static_cast<double>(i) * trace.step);
    for (int j = 0; j < 2 * n; ++j) {
      out += ',';
      push(trace.states[i][j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace fc
