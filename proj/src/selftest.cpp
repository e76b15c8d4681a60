#include "selftest.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"
#include "metrics.hpp"

namespace fc {

namespace {

double rel(double err, double scale) { return err / std::max(1.0, scale); }

struct PolyCase {
  const char* name;
  // Value, gradient and Hessian of the polynomial at the probe point,
  // written out by hand.
  Jet2 (*eval)(const Jet2&, const Jet2&);
  double val;
  double gx, gy;
  double hxx, hxy, hyy;
};

// Probe point (x, y) = (1.5, -2.0) for all polynomial cases.
constexpr double kPx = 1.5, kPy = -2.0;

Jet2 poly_affine(const Jet2& x, const Jet2& y) { return 3.0 + 2.0 * x - y; }
Jet2 poly_square(const Jet2& x, const Jet2& y) { return x * x + y * y; }
Jet2 poly_mixed(const Jet2& x, const Jet2& y) {
  return 0.5 * (x * y) - 4.0 * x + y * y;
}

const PolyCase kPolyCases[] = {
    {"affine", poly_affine, 3.0 + 2.0 * kPx - kPy, 2.0, -1.0, 0.0, 0.0, 0.0},
    {"squares", poly_square, kPx * kPx + kPy * kPy, 2.0 * kPx, 2.0 * kPy, 2.0,
     0.0, 2.0},
    {"mixed", poly_mixed, 0.5 * kPx * kPy - 4.0 * kPx + kPy * kPy,
     0.5 * kPy - 4.0, 0.5 * kPx + 2.0 * kPy, 0.0, 0.5, 2.0},
};

}  // namespace

SelftestResult run_selftest(double fd_step, int points_per_metric,
                            uint64_t seed, bool inject_fault) {
  if (!(fd_step > 0.0)) {
    throw ArgumentError("finite-difference step must be positive");
  }
  if (points_per_metric < 1) {
    throw ArgumentError("selftest needs at least one point per metric");
  }

  SelftestResult res;
  res.fd_step = fd_step;

  // worst_case names the comparison with the largest error-to-tolerance
  // ratio, so a failing run points straight at the offender.
  double worst_ratio = 0.0;
  auto note = [&](double err, double tol, const std::string& where) {
    if (err / tol > worst_ratio) {
      worst_ratio = err / tol;
      res.worst_case = where;
    }
  };

  for (const PolyCase& pc : kPolyCases) {
    const Jet2 x = Jet2::variable(0, kPx, 2);
    const Jet2 y = Jet2::variable(1, kPy, 2);
    const Jet2 p = pc.eval(x, y);
    double err = rel(std::abs(p.val - pc.val), std::abs(pc.val));
    err = std::max(err, rel(std::abs(p.grad[0] - pc.gx), std::abs(pc.gx)));
    err = std::max(err, rel(std::abs(p.grad[1] - pc.gy), std::abs(pc.gy)));
    err = std::max(err, rel(std::abs(p.hess(0, 0) - pc.hxx), std::abs(pc.hxx)));
    err = std::max(err, rel(std::abs(p.hess(0, 1) - pc.hxy), std::abs(pc.hxy)));
    err = std::max(err, rel(std::abs(p.hess(1, 1) - pc.hyy), std::abs(pc.hyy)));
    res.worst_poly = std::max(res.worst_poly, err);
    note(err, res.poly_tol, std::string("polynomial ") + pc.name);
  }

  const MetricSpec zoo[] = {MetricSpec::euclidean(3), MetricSpec::funk(3),
                            MetricSpec::family(2.0, 0.5, 3),
                            MetricSpec::family(4.0, 2.0, 3),
                            make_perturbed(1.0, 1.0, 3)};
  bool faulted = !inject_fault;  // trip exactly one comparison when injecting
  for (const MetricSpec& spec : zoo) {
    const int n = spec.dim;
    auto eval = [&](const Eigen::VectorXd& z) {
      SamplePoint q;
      q.x = z.head(n);
      q.y = z.tail(n);
      return finsler_eval(spec, q);
    };
    for (const SamplePoint& p : sample_domain(spec, seed, points_per_metric)) {
      Jet2 jet = finsler_jet(spec, p);
      if (!faulted) {
        jet.grad[0] += 1e-3;
        faulted = true;
      }
      Eigen::VectorXd z0(2 * n);
      z0 << p.x, p.y;
      const FdDerivatives fd = fd_derivatives(eval, z0, fd_step);
      const double ge = rel((jet.grad - fd.grad).norm(), jet.grad.norm());
      const double he = rel((jet.hess - fd.hess).norm(), jet.hess.norm());
      res.worst_grad = std::max(res.worst_grad, ge);
      res.worst_hess = std::max(res.worst_hess, he);
      note(ge, res.grad_tol, "gradient vs oracle, " + spec.name);
      note(he, res.hess_tol, "hessian vs oracle, " + spec.name);
    }
  }

  res.pass = res.worst_poly <= res.poly_tol && res.worst_grad <= res.grad_tol &&
             res.worst_hess <= res.hess_tol;
  return res;
}

std::string selftest_to_json(const SelftestResult& result) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string s = "{\n";
  s += std::string("  \"pass\": ") + (result.pass ? "true" : "false") + ",\n";
  s += "  \"worst_poly\": " + num(result.worst_poly) + ",\n";
  s += "  \"worst_grad\": " + num(result.worst_grad) + ",\n";
  s += "  \"worst_hess\": " + num(result.worst_hess) + ",\n";
  s += "  \"poly_tol\": " + num(result.poly_tol) + ",\n";
  s += "  \"grad_tol\": " + num(result.grad_tol) + ",\n";
  s += "  \"hess_tol\": " + num(result.hess_tol) + ",\n";
  s += "  \"fd_step\": " + num(result.fd_step) + ",\n";
  s += "  \"worst_case\": \"" + result.worst_case + "\"\n";
  s += "}\n";
  return s;
}

}  // namespace fc
