#pragma once

// AD soundness harness: exactness on low-degree polynomials (where forward
// jets must agree with hand derivatives to roundoff) and agreement with the
// central-difference oracle on every registry metric.

#include <cstdint>
#include <string>

#include "fd.hpp"

namespace fc {

struct SelftestResult {
  bool pass = false;
  double worst_poly = 0.0;  // relative error on degree-<=2 polynomials
  double worst_grad = 0.0;  // relative gradient deviation vs finite differences
  double worst_hess = 0.0;  // relative Hessian deviation vs finite differences
  double poly_tol = 1e-14;
  double grad_tol = 1e-6;
  double hess_tol = 1e-4;
  double fd_step = kDefaultFdStep;
  std::string worst_case;  // where the largest deviation occurred
};

// inject_fault biases one AD gradient before comparison so the harness can
// prove it would catch a broken derivative.
SelftestResult run_selftest(double fd_step = kDefaultFdStep,
                            int points_per_metric = 100, uint64_t seed = 42,
                            bool inject_fault = false);

std::string selftest_to_json(const SelftestResult& result);

}  // namespace fc
