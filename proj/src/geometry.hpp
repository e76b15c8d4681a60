#pragma once

// Differential-geometric quantities derived from a metric's squared-length
// jets: the fundamental tensor, spray coefficients, the projective factor,
// the dual-potential consistency check, and fixed-step geodesic integration.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "metrics.hpp"

namespace fc {

struct FundamentalTensor {
  Eigen::MatrixXd g;      // n x n, symmetric positive definite
  Eigen::MatrixXd g_inv;  // inverse of g
  double min_eig = 0.0;   // smallest eigenvalue of g
};

// g_ij = 1/2 d^2(F^2)/dy_i dy_j. Throws ConvexityError when g fails to be
// positive definite at the point.
FundamentalTensor fundamental_tensor(const MetricSpec& spec,
                                     const SamplePoint& p);

// Smallest eigenvalue of g without the positivity gate; negative values are
// returned, not thrown, so callers can report how convexity fails.
double convexity_min_eig(const MetricSpec& spec, const SamplePoint& p);

// Spray coefficients G^i = 1/4 g^{il} (d^2(F^2)/dx^k dy^l y^k - d(F^2)/dx^l).
Eigen::VectorXd spray_coefficients(const MetricSpec& spec,
                                   const SamplePoint& p);

struct ProjectiveFactor {
  double value = 0.0;     // P with G^i = P y^i, least-squares fit
  double residual = 0.0;  // |G - P y| / max(1, |G|)
};

ProjectiveFactor projective_factor(const MetricSpec& spec,
                                   const SamplePoint& p);

struct DualPotentialCheck {
  double potential = 0.0;  // H = -1/6 d(F^2)/dx^m y^m
  double residual = 0.0;   // max-norm mismatch of G^i against -1/2 g^{ij} dH/dy^j
};

DualPotentialCheck dual_potential_check(const MetricSpec& spec,
                                        const SamplePoint& p);

struct GeodesicTrace {
  std::vector<Eigen::VectorXd> states;  // each (x, y), length 2n; t_i = i*step
  double step = 0.0;
  bool truncated = false;  // stopped early at the domain boundary
};

// Integrates (x', y') = (y, -2G) with classical fourth-order Runge-Kutta.
// The trace ends early (truncated = true) if the curve leaves the metric's
// domain or the tensor degenerates along the way.
GeodesicTrace geodesic_integrate(const MetricSpec& spec,
                                 const Eigen::VectorXd& x0,
                                 const Eigen::VectorXd& y0, double t_max,
                                 int steps);

// Maximum deviation of the base points from the chord between the first and
// last state, normalized by the chord length. Needs at least three states.
double straightness_residual(const GeodesicTrace& trace);

// CSV with header t,x1..xn,xd1..xdn and 17 significant digits per field.
std::string trace_to_csv(const GeodesicTrace& trace);

}  // namespace fc
