#include "metrics.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "errors.hpp"

namespace fc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_common(int dim) {
  if (dim < 2 || dim > 8) {
    throw ArgumentError("metric dimension must be in [2, 8], got " +
                        std::to_string(dim));
  }
}

// Seeded generator with explicit bit-to-double mappings so sequences do not
// depend on the standard library's distribution implementations.
class SampleRng {
 public:
  explicit SampleRng(uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd unit_vector(int n) {
    Eigen::VectorXd v(n);
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
      norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

MetricSpec MetricSpec::family(double k, double c, int dim) {
  validate_common(dim);
  if (!(k > 0.0)) {
    throw ArgumentError("family metric requires k > 0, got " +
                        std::to_string(k));
  }
  MetricSpec s;
  s.kind = MetricKind::Family;
  s.k = k;
  s.c = c;
  s.dim = dim;
  s.name = "family";
  return s;
}

MetricSpec MetricSpec::funk(int dim) {
  MetricSpec s = family(1.0, 1.0, dim);
  s.kind = MetricKind::Funk;
  s.name = "funk";
  return s;
}

MetricSpec MetricSpec::euclidean(int dim) {
  validate_common(dim);
  MetricSpec s;
  s.kind = MetricKind::Euclidean;
  s.k = 0.0;
  s.c = 0.0;
  s.dim = dim;
  s.name = "euclidean";
  return s;
}

MetricSpec MetricSpec::custom(std::string name, PhiFn phi, double domain_radius,
                              int dim, bool claimed_flat) {
  validate_common(dim);
  if (!phi) {
    throw ArgumentError("custom metric requires a phi functor");
  }
  if (!(domain_radius > 0.0)) {
    throw ArgumentError("custom metric requires a positive domain radius");
  }
  MetricSpec s;
  s.kind = MetricKind::Custom;
  s.k = 0.0;
  s.c = 0.0;
  s.dim = dim;
  s.name = std::move(name);
  s.claimed_flat = claimed_flat;
  s.custom_phi = std::move(phi);
  s.custom_radius = domain_radius;
  return s;
}

double MetricSpec::domain_radius() const {
  switch (kind) {
    case MetricKind::Family:
    case MetricKind::Funk:
      return c != 0.0 ? std::sqrt(k) / std::abs(c) : kInf;
    case MetricKind::Euclidean:
      return kInf;
    case MetricKind::Custom:
      return custom_radius;
  }
  return kInf;
}

Jet2 phi_family_from_squares(double k, double c, const Jet2& r_sq,
                             const Jet2& u_sq, const Jet2& v) {
  const Jet2 denom = k - (c * c) * r_sq;
  if (!(denom.val > 0.0)) {
    throw DomainError("outside metric domain", denom.val);
  }
  if (!(u_sq.val > 0.0)) {
    throw DomainError("metric undefined for zero tangent vector", u_sq.val);
  }
  const Jet2 root = sqrt(denom * u_sq + (c * c) * (v * v));
  return (root + c * v) / denom;
}

Jet2 phi_family(double k, double c, const Jet2& r, const Jet2& u,
                const Jet2& v) {
  return phi_family_from_squares(k, c, r * r, u * u, v);
}

double phi_family(double k, double c, double r, double u, double v) {
  const int m = 0;
  return phi_family(k, c, Jet2::constant(r, m), Jet2::constant(u, m),
                    Jet2::constant(v, m))
      .val;
}

Jet2 f_solution(const Jet2& t, double c, double k) {
  const Jet2 arg = (c * c) * t + k;
  if (!(arg.val > 0.0)) {
    throw DomainError("profile function undefined: c^2 t + k <= 0", arg.val);
  }
  return 1.0 / sqrt(arg);
}

double f_solution(double t, double c, double k) {
  return f_solution(Jet2::constant(t, 0), c, k).val;
}

Jet2 phi_of(const MetricSpec& spec, const Jet2& r, const Jet2& u,
            const Jet2& v) {
  switch (spec.kind) {
    case MetricKind::Family:
    case MetricKind::Funk:
      return phi_family(spec.k, spec.c, r, u, v);
    case MetricKind::Euclidean:
      return u;
    case MetricKind::Custom:
      return spec.custom_phi(r, u, v);
  }
  throw ArgumentError("unknown metric kind");
}

Jet2 psi_jet(const MetricSpec& spec, double r, double s) {
  const int m = 2;
  return phi_of(spec, Jet2::variable(0, r, m), Jet2::constant(1.0, m),
                Jet2::variable(1, s, m));
}

double psi_of(const MetricSpec& spec, double r, double s) {
  const int m = 0;
  return phi_of(spec, Jet2::constant(r, m), Jet2::constant(1.0, m),
                Jet2::constant(s, m))
      .val;
}

void validate_point(const MetricSpec& spec, const SamplePoint& p) {
  if (p.x.size() != spec.dim || p.y.size() != spec.dim) {
    throw ArgumentError("sample point dimension mismatch");
  }
  if (!(p.y.norm() > 0.0)) {
    throw ArgumentError("tangent vector must be nonzero");
  }
  const double r = p.x.norm();
  switch (spec.kind) {
    case MetricKind::Family:
    case MetricKind::Funk:
      if (!(spec.k - spec.c * spec.c * r * r > 0.0)) {
        throw DomainError("base point outside metric domain", r);
      }
      break;
    case MetricKind::Custom:
      if (!(r < spec.custom_radius)) {
        throw DomainError("base point outside metric domain", r);
      }
      break;
    case MetricKind::Euclidean:
      break;
  }
}

double finsler_eval(const MetricSpec& spec, const SamplePoint& p) {
  validate_point(spec, p);
  if (spec.kind == MetricKind::Euclidean) {
    return p.y.norm();
  }
  const int m = 0;
  return phi_of(spec, Jet2::constant(p.x.norm(), m),
                Jet2::constant(p.y.norm(), m), Jet2::constant(p.x.dot(p.y), m))
      .val;
}

Jet2 finsler_jet(const MetricSpec& spec, const SamplePoint& p) {
  validate_point(spec, p);
  const int n = spec.dim;
  const int m = 2 * n;

  std::vector<Jet2> xs, ys;
  xs.reserve(n);
  ys.reserve(n);
  for (int i = 0; i < n; ++i) {
    xs.push_back(Jet2::variable(i, p.x[i], m));
    ys.push_back(Jet2::variable(n + i, p.y[i], m));
  }
  Jet2 r_sq = Jet2::constant(0.0, m);
  Jet2 u_sq = Jet2::constant(0.0, m);
  Jet2 v = Jet2::constant(0.0, m);
  for (int i = 0; i < n; ++i) {
    r_sq = r_sq + xs[i] * xs[i];
    u_sq = u_sq + ys[i] * ys[i];
    v = v + xs[i] * ys[i];
  }

  switch (spec.kind) {
    case MetricKind::Euclidean:
      return sqrt(u_sq);
    case MetricKind::Family:
    case MetricKind::Funk:
      return phi_family_from_squares(spec.k, spec.c, r_sq, u_sq, v);
    case MetricKind::Custom:
      // Generic composition through r = |x|; non-differentiable at x = 0.
      return spec.custom_phi(sqrt(r_sq), sqrt(u_sq), v);
  }
  throw ArgumentError("unknown metric kind");
}

Jet2 finsler_squared_jet(const MetricSpec& spec, const SamplePoint& p) {
  const Jet2 f = finsler_jet(spec, p);
  return f * f;
}

std::vector<SamplePoint> sample_domain(const MetricSpec& spec, uint64_t seed,
                                       int count, double margin,
                                       const SamplerConfig& config) {
  if (count < 1) {
    throw ArgumentError("sample count must be >= 1");
  }
  if (!(margin > 0.0 && margin < 1.0)) {
    throw ArgumentError("sampler margin must lie in (0, 1)");
  }
  const int n = spec.dim;
  const double radius = spec.domain_radius();
  const double base = std::isinf(radius) ? config.max_radius : radius;
  const double r_max = (1.0 - margin) * base;

  SampleRng rng(seed);
  std::vector<SamplePoint> points;
  points.reserve(count);
  const double y_lo_n = std::pow(config.y_min, n);
  const double y_hi_n = std::pow(config.y_max, n);
  for (int i = 0; i < count; ++i) {
    // Uniform in the ball of radius r_max, rejecting the (measure-zero)
    // immediate vicinity of the origin where |x| is not differentiable.
    double rho;
    do {
      rho = r_max * std::pow(rng.uniform(), 1.0 / n);
    } while (rho < 1e-6 * r_max);
    SamplePoint p;
    p.x = rho * rng.unit_vector(n);
    const double mag =
        std::pow(y_lo_n + rng.uniform() * (y_hi_n - y_lo_n), 1.0 / n);
    p.y = mag * rng.unit_vector(n);
    points.push_back(std::move(p));
  }
  return points;
}

MetricSpec make_perturbed(double k, double c, int dim) {
  MetricSpec base = MetricSpec::family(k, c, dim);
  const double radius = base.domain_radius();
  MetricSpec s = MetricSpec::custom(
      "perturbed",
      [k, c](const Jet2& r, const Jet2& u, const Jet2& v) {
        return phi_family(k, c, r, u, v) * (1.0 + 0.1 * (r * (v / u)));
      },
      std::isinf(radius) ? 1e6 : radius, dim, /*claimed_flat=*/false);
  s.k = k;
  s.c = c;
  return s;
}

MetricSpec metric_from_name(const std::string& name, double k, double c,
                            int dim) {
  if (name == "family") return MetricSpec::family(k, c, dim);
  if (name == "funk") return MetricSpec::funk(dim);
  if (name == "euclidean") return MetricSpec::euclidean(dim);
  if (name == "perturbed") return make_perturbed(k, c, dim);
  throw ArgumentError("unknown metric '" + name +
                      "' (expected family, funk, euclidean or perturbed)");
}

}  // namespace fc
