#pragma once

// Central-difference derivative estimates, kept independent of the jet
// arithmetic so they can serve as an oracle for it. Both stencils are O(h^2).
//
// The stencils assume f is C^2 in a step-sized neighbourhood; at kinks the
// estimates are stencil artifacts (|x| at 0 reports slope 0 and a diagonal
// second derivative of 2/h) rather than errors.

#include <Eigen/Dense>

#include <functional>

namespace fc {

inline constexpr double kDefaultFdStep = 1e-5;

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

struct FdDerivatives {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// Throws ArgumentError for step <= 0; DomainError from f is rethrown with the
// stencil offset appended so the failing evaluation can be located.
FdDerivatives fd_derivatives(const ScalarFn& f, const Eigen::VectorXd& point,
                             double step = kDefaultFdStep);

}  // namespace fc
