#pragma once

// Spherically symmetric Finsler metrics F(x,y) = phi(|x|, |y|, <x,y>) on a
// ball in R^n, with the projectively + dually flat closed-form family
//
//   phi(r,u,v) = (sqrt((k - c^2 r^2) u^2 + c^2 v^2) + c v) / (k - c^2 r^2)
//
// (Funk metric at k = c = 1, Euclidean norm as the flat baseline) plus a
// custom-phi escape hatch and seeded in-domain sampling.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jet.hpp"

namespace fc {

enum class MetricKind { Family, Funk, Euclidean, Custom };

// Custom metrics are supplied as phi over jets; plain evaluation passes
// zero-variable jets through the same functor.
using PhiFn = std::function<Jet2(const Jet2& r, const Jet2& u, const Jet2& v)>;

struct SamplePoint {
  Eigen::VectorXd x;  // base point, |x| inside the metric domain
  Eigen::VectorXd y;  // tangent vector, nonzero
};

struct MetricSpec {
  MetricKind kind = MetricKind::Euclidean;
  double k = 1.0;  // Family parameters; fixed to 1 for Funk
  double c = 1.0;
  int dim = 3;
  std::string name = "euclidean";  // registry key, echoed into reports
  bool claimed_flat = true;        // false marks negative controls
  PhiFn custom_phi;                // Custom only
  double custom_radius = 0.0;      // Custom only: declared domain radius

  static MetricSpec family(double k, double c, int dim = 3);
  static MetricSpec funk(int dim = 3);
  static MetricSpec euclidean(int dim = 3);
  static MetricSpec custom(std::string name, PhiFn phi, double domain_radius,
                           int dim, bool claimed_flat = true);

  // Radius of the ball on which the metric is defined; +inf when unbounded.
  double domain_radius() const;
};

// The classified family, scalar and jet forms. Throws DomainError when
// k - c^2 r^2 <= 0 ("outside metric domain") or u <= 0.
double phi_family(double k, double c, double r, double u, double v);
Jet2 phi_family(double k, double c, const Jet2& r, const Jet2& u,
                const Jet2& v);

// Same formula written in (r^2, u^2, v); smooth through x = 0, which the
// sqrt(|x|^2) composition above is not.
Jet2 phi_family_from_squares(double k, double c, const Jet2& r_sq,
                             const Jet2& u_sq, const Jet2& v);

// Profile function of the classification, f(t) = 1/sqrt(c^2 t + k).
double f_solution(double t, double c, double k);
Jet2 f_solution(const Jet2& t, double c, double k);

// phi for an arbitrary spec, on jets.
Jet2 phi_of(const MetricSpec& spec, const Jet2& r, const Jet2& u,
            const Jet2& v);

// psi(r,s) = phi(r, 1, s), the one-variable-reduced profile.
double psi_of(const MetricSpec& spec, double r, double s);
Jet2 psi_jet(const MetricSpec& spec, double r, double s);  // vars (r, s)

// F(x,y). Validates |y| > 0 and the base point against the domain.
double finsler_eval(const MetricSpec& spec, const SamplePoint& p);

// F as a jet in the 2n variables (x_1..x_n, y_1..y_n), and F^2 likewise.
// Family/Funk/Euclidean avoid the |x| square root and stay smooth at x = 0;
// Custom requires x != 0.
Jet2 finsler_jet(const MetricSpec& spec, const SamplePoint& p);
Jet2 finsler_squared_jet(const MetricSpec& spec, const SamplePoint& p);

void validate_point(const MetricSpec& spec, const SamplePoint& p);

// Deterministic in-domain sampling: |x| <= (1 - margin) * R with R the domain
// radius (unbounded domains capped at max_radius), y drawn uniformly from the
// annulus y_min <= |y| <= y_max.
struct SamplerConfig {
  double max_radius = 1.0;
  double y_min = 0.5;
  double y_max = 2.0;
};

std::vector<SamplePoint> sample_domain(const MetricSpec& spec, uint64_t seed,
                                       int count, double margin = 0.1,
                                       const SamplerConfig& config = {});

// Negative control: the family metric scaled by (1 + 0.1 r s), smooth and
// 1-homogeneous but neither projectively nor dually flat.
MetricSpec make_perturbed(double k = 1.0, double c = 1.0, int dim = 3);

// CLI/C-API registry: "family", "funk", "euclidean", "perturbed".
MetricSpec metric_from_name(const std::string& name, double k, double c,
                            int dim);

}  // namespace fc
