#include "certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "errors.hpp"
#include "geometry.hpp"

namespace fc {

namespace {

// Hard-failure sentinel for samples where an evaluator raises a domain or
// convexity error: finite so reports stay JSON-representable, enormous so
// no tolerance can absorb it.
constexpr double kFailureSentinel = std::numeric_limits<double>::max();

double inf_norm_head(const Eigen::VectorXd& g, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(g[i]));
  return m;
}

Jet2 default_profile_jet(const Jet2& t, double c, double k) {
  return f_solution(t, c, k);
}

void require_family(const MetricSpec& spec, const char* who) {
  if (spec.kind != MetricKind::Family && spec.kind != MetricKind::Funk) {
    throw ArgumentError(std::string(who) + " needs a family metric");
  }
}

}  // namespace

double rapcsak_residual(const MetricSpec& spec, const SamplePoint& p) {
  const int n = spec.dim;
  const Jet2 f = finsler_jet(spec, p);
  double worst = 0.0;
  for (int l = 0; l < n; ++l) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += f.hess(k, n + l) * p.y[k];
    worst = std::max(worst, std::abs(acc - f.grad[l]));
  }
  return worst / std::max(1.0, inf_norm_head(f.grad, n));
}

double dualflat_residual(const MetricSpec& spec, const SamplePoint& p) {
  const int n = spec.dim;
  const Jet2 f2 = finsler_squared_jet(spec, p);
  double worst = 0.0;
  for (int l = 0; l < n; ++l) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) acc += f2.hess(m, n + l) * p.y[m];
    worst = std::max(worst, std::abs(acc - 2.0 * f2.grad[l]));
  }
  return worst / std::max(1.0, inf_norm_head(f2.grad, n));
}

double coupled_residual(const MetricSpec& spec, double c, const SamplePoint& p) {
  const int n = spec.dim;
  const Jet2 f = finsler_jet(spec, p);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    worst = std::max(worst,
                     std::abs(f.grad[k] - c * f.val * f.grad[n + k]));
  }
  return worst / std::max(1.0, inf_norm_head(f.grad, n));
}

CEstimate estimate_c(const MetricSpec& spec,
                     const std::vector<SamplePoint>& points) {
  if (points.size() < 10) {
    throw ArgumentError("estimating c needs at least 10 points");
  }
  const int n = spec.dim;
  double num = 0.0, den = 0.0;
  std::vector<std::pair<double, double>> pairs;  // (lhs, rhs-denominator)
  pairs.reserve(points.size() * n);
  for (const SamplePoint& p : points) {
    const Jet2 f = finsler_jet(spec, p);
    for (int k = 0; k < n; ++k) {
      const double a = f.grad[k];
      const double b = f.val * f.grad[n + k];
      num += a * b;
      den += b * b;
      pairs.emplace_back(a, b);
    }
  }
  if (!(den > 0.0)) {
    throw EstimationError("cannot estimate c: every F F_y component vanishes");
  }
  CEstimate est;
  est.c_hat = num / den;
  bool any = false;
  for (const auto& [a, b] : pairs) {
    if (std::abs(b) <= 1e-6) continue;
    any = true;
    est.spread = std::max(est.spread, std::abs(a / b - est.c_hat));
  }
  if (!any) {
    throw EstimationError("cannot estimate c: all denominators below 1e-6");
  }
  return est;
}

double psi_pde_residual(const MetricSpec& spec, double r, double s) {
  if (!(r > 0.0)) {
    throw ArgumentError("psi residual needs r > 0");
  }
  const Jet2 j = psi_jet(spec, r, s);
  const double psi = j.val;
  const double pr = j.grad[0], ps = j.grad[1];
  const double prs = j.hess(0, 1), pss = j.hess(1, 1);
  return s * (pr * ps + psi * prs) + r * (ps * ps + psi * pss) -
         2.0 * psi * pr;
}

std::map<std::string, double> identity_suite(const MetricSpec& spec,
                                             const SamplePoint& p) {
  return identity_suite(spec, p, [&](const Jet2& t) {
    return default_profile_jet(t, spec.c, spec.k);
  });
}

std::map<std::string, double> identity_suite(const MetricSpec& spec,
                                             const SamplePoint& p,
                                             const ProfileFn& profile) {
  require_family(spec, "identity suite");
  validate_point(spec, p);
  const double r = p.x.norm();
  const double u = p.y.norm();
  const double v = p.x.dot(p.y);
  const double c = spec.c;

  const int m = 3;
  const Jet2 R = Jet2::variable(0, r, m);
  const Jet2 U = Jet2::variable(1, u, m);
  const Jet2 V = Jet2::variable(2, v, m);
  const Jet2 phi = phi_family(spec.k, c, R, U, V);
  const double scale = std::abs(phi.val);

  const double phi_r = phi.grad[0];
  const double phi_u = phi.grad[1];
  const double phi_v = phi.grad[2];
  const double f = profile(Jet2::constant(v * v / (u * u) - r * r, 0)).val;

  std::map<std::string, double> out;
  out["phi_r_coupling"] = std::abs(phi_r / r - c * phi.val * phi_v) / scale;
  out["phi_v_coupling"] = std::abs(phi_v - c * phi.val * phi_u / u) / scale;
  out["phi_u_profile"] = std::abs(phi_u - f) / scale;
  out["euler_homogeneity"] =
      std::abs(phi.val - (phi_u * u + phi_v * v)) / scale;

  const double cf_den = u - c * f * v;
  if (!(cf_den > 0.0)) {
    throw DomainError("closed form undefined: u - c f v <= 0", cf_den);
  }
  out["closed_form"] = std::abs(phi.val - f * u * u / cf_den) / scale;
  return out;
}

double ode_residual(double c, double k, const std::vector<double>& t_grid) {
  return ode_residual(c, k, t_grid,
                      [&](const Jet2& t) { return default_profile_jet(t, c, k); });
}

double ode_residual(double c, double k, const std::vector<double>& t_grid,
                    const ProfileFn& profile) {
  if (t_grid.empty()) {
    throw ArgumentError("ode residual needs a nonempty grid");
  }
  double worst = 0.0;
  for (double t : t_grid) {
    if (!(c * c * t + k > 0.0)) {
      throw DomainError("grid point outside the profile domain", t);
    }
    const Jet2 f = profile(Jet2::variable(0, t, 1));
    worst = std::max(worst,
                     std::abs(2.0 * f.grad[0] + c * c * f.val * f.val * f.val));
  }
  return worst;
}

namespace {

double simpson_slice(const std::function<double(double)>& fn, double a,
                     double b, double fa, double fm, double fb, double whole,
                     double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    throw NumericError("quadrature failed to converge within the depth budget");
  }
  return simpson_slice(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_slice(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double a,
                        double b, double abs_tol, int max_depth) {
  if (!(b > a)) {
    throw ArgumentError("integration interval must satisfy a < b");
  }
  if (!(abs_tol > 0.0)) {
    throw ArgumentError("integration tolerance must be positive");
  }
  const double m = 0.5 * (a + b);
  const double fa = fn(a), fm = fn(m), fb = fn(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_slice(fn, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double quadrature_reconstruction_check(const MetricSpec& spec, double r,
                                       double v, double u1, double u2) {
  return quadrature_reconstruction_check(spec, r, v, u1, u2, [&](double t) {
    return f_solution(v * v / (t * t) - r * r, spec.c, spec.k);
  });
}

double quadrature_reconstruction_check(
    const MetricSpec& spec, double r, double v, double u1, double u2,
    const std::function<double(double)>& integrand_profile) {
  require_family(spec, "quadrature check");
  if (!(0.0 < u1 && u1 < u2)) {
    throw ArgumentError("quadrature check needs 0 < u1 < u2");
  }
  const double integral = adaptive_simpson(integrand_profile, u1, u2, 1e-10);
  const double diff = phi_family(spec.k, spec.c, r, u2, v) -
                      phi_family(spec.k, spec.c, r, u1, v);
  return std::abs(integral - diff);
}

namespace {

using SampleResidualFn = std::function<double(const MetricSpec&, const SamplePoint&)>;

SampleResidualFn lookup_condition(const std::string& condition) {
  if (condition == "rapcsak") {
    return [](const MetricSpec& s, const SamplePoint& p) {
      return rapcsak_residual(s, p);
    };
  }
  if (condition == "dualflat") {
    return [](const MetricSpec& s, const SamplePoint& p) {
      return dualflat_residual(s, p);
    };
  }
  if (condition == "dualflat_psi") {
    return [](const MetricSpec& s, const SamplePoint& p) {
      return std::abs(
          psi_pde_residual(s, p.x.norm(), p.x.dot(p.y) / p.y.norm()));
    };
  }
  if (condition == "convexity") {
    return [](const MetricSpec& s, const SamplePoint& p) {
      return std::max(0.0, -convexity_min_eig(s, p));
    };
  }
  throw ArgumentError("unknown certification condition '" + condition + "'");
}

CertReport aggregate_with(const std::string& condition,
                          const SampleResidualFn& fn, const MetricSpec& spec,
                          uint64_t seed, int count, double tol) {
  const std::vector<SamplePoint> points = sample_domain(spec, seed, count);
  CertReport rep;
  rep.condition = condition;
  rep.samples = count;
  rep.tol = tol;
  rep.seed = seed;
  rep.spec = spec;

  long double sum = 0.0L;
  for (const SamplePoint& p : points) {
    double resid;
    try {
      resid = std::abs(fn(spec, p));
    } catch (const DomainError&) {
      resid = kFailureSentinel;
    } catch (const ConvexityError&) {
      resid = kFailureSentinel;
    }
    rep.max_abs = std::max(rep.max_abs, resid);
    sum += resid;
  }
  rep.mean_abs =
      std::min(static_cast<double>(sum / count), rep.max_abs);
  rep.pass = rep.max_abs <= tol;
  return rep;
}

}  // namespace

CertReport aggregate(const std::string& condition, const MetricSpec& spec,
                     uint64_t seed, int count, double tol) {
  return aggregate_with(condition, lookup_condition(condition), spec, seed,
                        count, tol);
}

CertReport aggregate_coupled(const MetricSpec& spec, double c, uint64_t seed,
                             int count, double tol) {
  return aggregate_with(
      "coupled",
      [c](const MetricSpec& s, const SamplePoint& p) {
        return coupled_residual(s, c, p);
      },
      spec, seed, count, tol);
}

SuiteResult run_certify_suite(const MetricSpec& spec, uint64_t seed, int count,
                              double tol) {
  const std::vector<SamplePoint> points = sample_domain(spec, seed, count);
  const CEstimate est = estimate_c(spec, points);

  SuiteResult out;
  out.c_hat = est.c_hat;
  out.c_spread = est.spread;
  out.reports.push_back(aggregate("convexity", spec, seed, count, 0.0));
  out.reports.push_back(aggregate_coupled(spec, est.c_hat, seed, count, tol));
  out.reports.push_back(aggregate("dualflat", spec, seed, count, tol));
  out.reports.push_back(aggregate("dualflat_psi", spec, seed, count, tol));
  out.reports.push_back(aggregate("rapcsak", spec, seed, count, tol));

  bool ok = true;
  for (const CertReport& rep : out.reports) {
    if (rep.condition == "convexity") {
      ok = ok && rep.pass;
    } else if (spec.claimed_flat) {
      ok = ok && rep.pass;
    } else {
      // A control must fail decisively, not by a rounding hair.
      ok = ok && !rep.pass && rep.max_abs >= 1000.0 * tol;
    }
  }
  out.all_as_expected = ok;
  return out;
}

ClassifyResult run_classify_pipeline(double k, double c, int dim,
                                     uint64_t seed, int count) {
  const MetricSpec fam = MetricSpec::family(k, c, dim);
  if (count < 1) {
    throw ArgumentError("classification needs at least one sample");
  }

  ClassifyResult out;
  out.k = k;
  out.c = c;

  auto finish = [&](CertReport rep) {
    rep.seed = seed;
    rep.spec = fam;
    rep.pass = rep.max_abs <= rep.tol;
    out.reports.push_back(std::move(rep));
  };

  {
    CertReport rep;
    rep.condition = "ode";
    rep.tol = 1e-12;
    std::vector<double> grid;
    for (double t = 0.0; t <= 10.0 + 1e-9; t += 0.5) grid.push_back(t);
    rep.samples = static_cast<int>(grid.size());
    long double sum = 0.0L;
    for (double t : grid) {
      const double resid = ode_residual(c, k, {t});
      rep.max_abs = std::max(rep.max_abs, resid);
      sum += resid;
    }
    rep.mean_abs = std::min(static_cast<double>(sum / grid.size()), rep.max_abs);
    finish(std::move(rep));
  }

  {
    const std::vector<SamplePoint> points = sample_domain(fam, seed, count);
    std::map<std::string, CertReport> by_name;
    std::map<std::string, long double> sums;
    for (const SamplePoint& p : points) {
      std::map<std::string, double> res;
      try {
        res = identity_suite(fam, p);
      } catch (const DomainError&) {
        for (const char* name :
             {"phi_r_coupling", "phi_v_coupling", "phi_u_profile",
              "euler_homogeneity", "closed_form"}) {
          res[name] = kFailureSentinel;
        }
      }
      for (const auto& [name, value] : res) {
        CertReport& rep = by_name[name];
        rep.condition = name;
        rep.tol = 1e-10;
        rep.samples += 1;
        rep.max_abs = std::max(rep.max_abs, value);
        sums[name] += value;
      }
    }
    for (auto& [name, rep] : by_name) {
      rep.mean_abs = std::min(static_cast<double>(sums[name] / rep.samples),
                              rep.max_abs);
      finish(std::move(rep));
    }
  }

  {
    CertReport rep;
    rep.condition = "quadrature";
    rep.tol = 1e-8;
    const int tuples = 50;
    rep.samples = tuples;
    std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ULL);
    auto uniform = [&] {
      return static_cast<double>(eng() >> 11) * 0x1.0p-53;
    };
    const double radius = fam.domain_radius();
    const double r_cap = 0.9 * std::min(radius, 5.0);
    long double sum = 0.0L;
    for (int i = 0; i < tuples; ++i) {
      const double r = (0.05 + 0.9 * uniform()) * r_cap;
      const double u1 = 0.5 + 0.5 * uniform();
      const double u2 = u1 + 0.25 + 0.75 * uniform();
      const double v = (2.0 * uniform() - 1.0) * r * u1;
      const double resid = quadrature_reconstruction_check(fam, r, v, u1, u2);
      rep.max_abs = std::max(rep.max_abs, resid);
      sum += resid;
    }
    rep.mean_abs = std::min(static_cast<double>(sum / tuples), rep.max_abs);
    finish(std::move(rep));
  }

  std::sort(out.reports.begin(), out.reports.end(),
            [](const CertReport& a, const CertReport& b) {
              return a.condition < b.condition;
            });
  out.all_pass = std::all_of(out.reports.begin(), out.reports.end(),
                             [](const CertReport& r) { return r.pass; });
  return out;
}

namespace {

std::string json_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const CertReport& report, int indent) {
  const std::string pad(indent, ' ');
  const std::string in(indent + 2, ' ');
  std::string s = pad + "{\n";
  s += in + "\"condition\": \"" + report.condition + "\",\n";
  s += in + "\"samples\": " + std::to_string(report.samples) + ",\n";
  s += in + "\"max_abs\": " + json_double(report.max_abs) + ",\n";
  s += in + "\"mean_abs\": " + json_double(report.mean_abs) + ",\n";
  s += in + "\"tol\": " + json_double(report.tol) + ",\n";
  s += in + std::string("\"pass\": ") + (report.pass ? "true" : "false") + ",\n";
  s += in + "\"seed\": " + std::to_string(report.seed) + ",\n";
  s += in + "\"spec\": {\"kind\": \"" + report.spec.name +
       "\", \"k\": " + json_double(report.spec.k) +
       ", \"c\": " + json_double(report.spec.c) +
       ", \"dim\": " + std::to_string(report.spec.dim) + "}\n";
  s += pad + "}";
  return s;
}

std::string reports_to_json(const std::vector<CertReport>& reports) {
  std::string s = "[\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    s += report_to_json(reports[i], 2);
    if (i + 1 < reports.size()) s += ",";
    s += "\n";
  }
  s += "]\n";
  return s;
}

}  // namespace fc
