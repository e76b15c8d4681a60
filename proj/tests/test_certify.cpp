#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "json.hpp"

#include "certify.hpp"
#include "errors.hpp"
#include "jet.hpp"
#include "metrics.hpp"

using fc::Jet2;
using fc::MetricSpec;
using fc::SamplePoint;

namespace {

double max_residual(const MetricSpec& spec, uint64_t seed, int count,
                    const std::function<double(const SamplePoint&)>& fn) {
  double worst = 0.0;
  for (const SamplePoint& p : fc::sample_domain(spec, seed, count)) {
    worst = std::max(worst, fn(p));
  }
  return worst;
}

}  // namespace

TEST_CASE("flatness residuals vanish for the euclidean metric") {
  const MetricSpec euc = MetricSpec::euclidean(3);
  for (const SamplePoint& p : fc::sample_domain(euc, 2, 50)) {
    CHECK(fc::rapcsak_residual(euc, p) <= 1e-13);
    CHECK(fc::dualflat_residual(euc, p) <= 1e-13);
    CHECK(fc::coupled_residual(euc, 0.0, p) <= 1e-13);
  }
}

TEST_CASE("flatness residuals vanish across the solution family") {
  struct Case {
    double k, c;
  };
  for (const Case tc : {Case{1.0, 1.0}, Case{2.0, 0.5}, Case{4.0, 2.0},
                        Case{1.0, -1.0}}) {
    const MetricSpec fam = MetricSpec::family(tc.k, tc.c, 3);
    const double worst = max_residual(fam, 5, 200, [&](const SamplePoint& p) {
      return std::max({fc::rapcsak_residual(fam, p),
                       fc::dualflat_residual(fam, p),
                       fc::coupled_residual(fam, tc.c, p)});
    });
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("perturbed control breaks every flatness residual") {
  const MetricSpec pert = fc::make_perturbed(1.0, 1.0, 3);
  CHECK(max_residual(pert, 5, 100, [&](const SamplePoint& p) {
          return fc::rapcsak_residual(pert, p);
        }) > 1e-3);
  CHECK(max_residual(pert, 5, 100, [&](const SamplePoint& p) {
          return fc::dualflat_residual(pert, p);
        }) > 1e-3);
}

TEST_CASE("coupled residual detects a wrong constant") {
  const MetricSpec funk = MetricSpec::funk(3);
  CHECK(max_residual(funk, 9, 100, [&](const SamplePoint& p) {
          return fc::coupled_residual(funk, 1.0, p);
        }) <= 1e-9);
  CHECK(max_residual(funk, 9, 100, [&](const SamplePoint& p) {
          return fc::coupled_residual(funk, 2.0, p);
        }) > 0.1);
}

TEST_CASE("constant estimation across the zoo") {
  const MetricSpec fam = MetricSpec::family(2.0, 0.5, 3);
  const fc::CEstimate e1 = fc::estimate_c(fam, fc::sample_domain(fam, 3, 100));
  CHECK(std::abs(e1.c_hat - 0.5) <= 1e-8);
  CHECK(e1.spread <= 1e-8);

  const MetricSpec neg = MetricSpec::family(1.0, -1.0, 3);
  const fc::CEstimate e2 = fc::estimate_c(neg, fc::sample_domain(neg, 3, 100));
  CHECK(std::abs(e2.c_hat + 1.0) <= 1e-8);

  const MetricSpec euc = MetricSpec::euclidean(3);
  const fc::CEstimate e3 = fc::estimate_c(euc, fc::sample_domain(euc, 3, 100));
  CHECK(std::abs(e3.c_hat) <= 1e-12);
  CHECK(e3.spread <= 1e-10);

  const MetricSpec pert = fc::make_perturbed(1.0, 1.0, 3);
  const fc::CEstimate e4 = fc::estimate_c(pert, fc::sample_domain(pert, 3, 100));
  CHECK(e4.spread > 1e-2);

  CHECK_THROWS_AS(fc::estimate_c(euc, fc::sample_domain(euc, 3, 5)),
                  fc::ArgumentError);
}

TEST_CASE("reduced psi equation on synthetic inputs") {
  // psi identically 1: every derivative vanishes.
  const MetricSpec euc = MetricSpec::euclidean(3);
  CHECK(fc::psi_pde_residual(euc, 0.7, 0.2) == 0.0);

  // phi = u + r v gives psi = 1 + r s; evaluate the expression literally.
  const MetricSpec synth = MetricSpec::custom(
      "synthetic",
      [](const Jet2& r, const Jet2& u, const Jet2& v) { return u + r * v; },
      10.0, 3, false);
  CHECK(fc::psi_pde_residual(synth, 1.0, 1.0) == 0.0);
  CHECK(fc::psi_pde_residual(synth, 1.0, 2.0) == -1.0);

  CHECK_THROWS_AS(fc::psi_pde_residual(euc, 0.0, 0.5), fc::ArgumentError);
  CHECK_THROWS_AS(fc::psi_pde_residual(euc, -1.0, 0.5), fc::ArgumentError);
}

TEST_CASE("reduced psi equation agrees with the ambient condition") {
  // At matched points the reduced equation vanishes exactly when the ambient
  // dual-flatness residual does, and both stay large for the control.
  const MetricSpec funk = MetricSpec::funk(3);
  for (const SamplePoint& p : fc::sample_domain(funk, 31, 100)) {
    const double psi = std::abs(
        fc::psi_pde_residual(funk, p.x.norm(), p.x.dot(p.y) / p.y.norm()));
    CHECK(psi <= 1e-9);
    CHECK(fc::dualflat_residual(funk, p) <= 1e-9);
  }

  const MetricSpec pert = fc::make_perturbed(1.0, 1.0, 3);
  double worst_psi = 0.0, worst_df = 0.0;
  for (const SamplePoint& p : fc::sample_domain(pert, 31, 100)) {
    worst_psi = std::max(worst_psi, std::abs(fc::psi_pde_residual(
                                        pert, p.x.norm(),
                                        p.x.dot(p.y) / p.y.norm())));
    worst_df = std::max(worst_df, fc::dualflat_residual(pert, p));
  }
  CHECK(worst_psi > 1e-3);
  CHECK(worst_df > 1e-3);
}

TEST_CASE("identity suite holds on the family") {
  const MetricSpec fam = MetricSpec::funk(3);
  for (const SamplePoint& p : fc::sample_domain(fam, 13, 100)) {
    for (const auto& [name, value] : fc::identity_suite(fam, p)) {
      INFO(name);
      CHECK(value <= 1e-10);
    }
  }
}

TEST_CASE("identity suite in the c = 0 limit") {
  const MetricSpec flat = MetricSpec::family(1.0, 0.0, 3);
  const SamplePoint p = [] {
    SamplePoint q;
    q.x = Eigen::VectorXd(3);
    q.y = Eigen::VectorXd(3);
    q.x << 0.4, 0.1, -0.2;
    q.y << 1.0, -0.5, 0.3;
    return q;
  }();
  const auto res = fc::identity_suite(flat, p);
  CHECK(res.at("phi_r_coupling") <= 1e-14);
  CHECK(res.at("phi_v_coupling") <= 1e-14);
  CHECK(res.at("phi_u_profile") <= 1e-14);
  CHECK(res.at("euler_homogeneity") <= 1e-14);
  CHECK(res.at("closed_form") <= 1e-14);
}

TEST_CASE("identity suite flags a wrong profile") {
  const MetricSpec fam = MetricSpec::funk(3);
  const auto wrong = [](const Jet2& t) { return 1.0 / (1.0 + t); };
  double worst = 0.0;
  for (const SamplePoint& p : fc::sample_domain(fam, 13, 50)) {
    try {
      worst = std::max(worst,
                       fc::identity_suite(fam, p, wrong).at("phi_u_profile"));
    } catch (const fc::DomainError&) {
      // The closed-form denominator can go non-positive under a wrong
      // profile; that is the check firing, not a silent skip.
      worst = std::max(worst, 1.0);
    }
  }
  CHECK(worst > 1e-2);

  CHECK_THROWS_AS(fc::identity_suite(MetricSpec::euclidean(3),
                                     fc::sample_domain(MetricSpec::euclidean(3),
                                                       1, 1)[0]),
                  fc::ArgumentError);
}

TEST_CASE("profile ode residual") {
  std::vector<double> grid;
  for (double t = 0.0; t <= 10.0 + 1e-9; t += 0.5) grid.push_back(t);
  CHECK(fc::ode_residual(1.0, 1.0, grid) <= 1e-12);
  CHECK(fc::ode_residual(0.5, 2.0, grid) <= 1e-12);
  CHECK(fc::ode_residual(0.0, 2.0, grid) == 0.0);

  const auto wrong = [](const Jet2& t) { return 1.0 / (1.0 + t); };
  CHECK(fc::ode_residual(1.0, 1.0, {0.0}, wrong) == 1.0);

  CHECK_THROWS_AS(fc::ode_residual(1.0, 1.0, {-2.0}), fc::DomainError);
  CHECK_THROWS_AS(fc::ode_residual(1.0, 1.0, {}), fc::ArgumentError);
}

TEST_CASE("adaptive simpson basics") {
  const double third =
      fc::adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(std::abs(third - 1.0 / 3.0) <= 1e-14);

  const double two =
      fc::adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(std::abs(two - 2.0) <= 1e-10);

  CHECK_THROWS_AS(
      fc::adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI,
                           1e-12, 0),
      fc::NumericError);
  CHECK_THROWS_AS(
      fc::adaptive_simpson([](double x) { return x; }, 1.0, 0.0),
      fc::ArgumentError);
}

TEST_CASE("quadrature reconstruction of the family") {
  const MetricSpec fam = MetricSpec::funk(3);

  // phi(0.5, 2, 0.5) - phi(0.5, 1, 0.5) in closed form.
  const double expected = (std::sqrt(3.25) + 0.5 - 1.5) / 0.75;
  const double diff = fc::phi_family(1.0, 1.0, 0.5, 2.0, 0.5) -
                      fc::phi_family(1.0, 1.0, 0.5, 1.0, 0.5);
  CHECK(diff == doctest::Approx(expected).epsilon(1e-14));
  CHECK(fc::quadrature_reconstruction_check(fam, 0.5, 0.5, 1.0, 2.0) <= 1e-8);

  // Constant integrand when v = 0.
  CHECK(fc::quadrature_reconstruction_check(fam, 0.5, 0.0, 1.0, 2.0) <= 1e-10);

  // A flat profile cannot reconstruct phi.
  const auto one = [](double) { return 1.0; };
  CHECK(fc::quadrature_reconstruction_check(fam, 0.5, 0.5, 1.0, 2.0, one) >
        1e-2);

  CHECK_THROWS_AS(fc::quadrature_reconstruction_check(fam, 0.5, 0.5, 2.0, 1.0),
                  fc::ArgumentError);
  CHECK_THROWS_AS(fc::quadrature_reconstruction_check(fam, 0.5, 0.5, 0.0, 1.0),
                  fc::ArgumentError);
}

TEST_CASE("aggregation fills reports and stays deterministic") {
  const MetricSpec funk = MetricSpec::funk(3);
  const fc::CertReport a = fc::aggregate("rapcsak", funk, 7, 200, 1e-9);
  CHECK(a.condition == "rapcsak");
  CHECK(a.samples == 200);
  CHECK(a.pass);
  CHECK(a.max_abs <= 1e-9);
  CHECK(a.mean_abs <= a.max_abs);
  CHECK(a.seed == 7);

  const fc::CertReport b = fc::aggregate("rapcsak", funk, 7, 200, 1e-9);
  CHECK(fc::report_to_json(a) == fc::report_to_json(b));

  const fc::CertReport c = fc::aggregate("dualflat", fc::make_perturbed(), 7,
                                         200, 1e-9);
  CHECK(!c.pass);
  CHECK(c.max_abs > 1e-3);

  const fc::CertReport d = fc::aggregate("convexity", funk, 7, 200, 0.0);
  CHECK(d.pass);
  CHECK(d.max_abs == 0.0);

  CHECK_THROWS_AS(fc::aggregate("unknown", funk, 7, 10, 1e-9),
                  fc::ArgumentError);
}

TEST_CASE("domain errors inside aggregation are hard failures") {
  // Valid only for r < 0.5 but advertised with radius 1, so sampling hits
  // undefined territory and those samples must fail the report.
  const MetricSpec trap = MetricSpec::custom(
      "trap",
      [](const Jet2& r, const Jet2& u, const Jet2& v) {
        return u * sqrt(1.0 - 4.0 * (r * r));
      },
      1.0, 3, false);
  const fc::CertReport rep = fc::aggregate("rapcsak", trap, 11, 50, 1e-9);
  CHECK(!rep.pass);
  CHECK(rep.max_abs == std::numeric_limits<double>::max());
}

TEST_CASE("certification suite meets expectations per metric") {
  const fc::SuiteResult funk =
      fc::run_certify_suite(MetricSpec::funk(3), 42, 200, 1e-9);
  REQUIRE(funk.reports.size() == 5);
  CHECK(funk.reports[0].condition == "convexity");
  CHECK(funk.reports[1].condition == "coupled");
  CHECK(funk.reports[2].condition == "dualflat");
  CHECK(funk.reports[3].condition == "dualflat_psi");
  CHECK(funk.reports[4].condition == "rapcsak");
  CHECK(std::abs(funk.c_hat - 1.0) <= 1e-8);
  CHECK(funk.all_as_expected);

  const fc::SuiteResult euc =
      fc::run_certify_suite(MetricSpec::euclidean(3), 42, 200, 1e-9);
  CHECK(std::abs(euc.c_hat) <= 1e-10);
  CHECK(euc.all_as_expected);

  const fc::SuiteResult pert =
      fc::run_certify_suite(fc::make_perturbed(), 42, 200, 1e-9);
  CHECK(pert.all_as_expected);
  for (const fc::CertReport& rep : pert.reports) {
    if (rep.condition == "convexity") {
      CHECK(rep.pass);
    } else {
      CHECK(!rep.pass);
      CHECK(rep.max_abs >= 1e-6);
    }
  }
}

TEST_CASE("flatness biconditional across the zoo") {
  const MetricSpec zoo[] = {MetricSpec::euclidean(3), MetricSpec::funk(3),
                            MetricSpec::family(2.0, 0.5, 3),
                            MetricSpec::family(4.0, 2.0, 3),
                            fc::make_perturbed(1.0, 1.0, 3)};
  for (const MetricSpec& spec : zoo) {
    const double tol = 1e-8;
    const auto points = fc::sample_domain(spec, 19, 150);
    const fc::CEstimate est = fc::estimate_c(spec, points);
    const bool both = fc::aggregate("rapcsak", spec, 19, 150, tol).pass &&
                      fc::aggregate("dualflat", spec, 19, 150, tol).pass;
    const bool coupled =
        fc::aggregate_coupled(spec, est.c_hat, 19, 150, tol).pass;
    CHECK(both == coupled);
  }
}

TEST_CASE("classification pipeline passes for valid parameters") {
  for (const auto& [k, c] : std::vector<std::pair<double, double>>{
           {1.0, 1.0}, {2.0, 0.5}, {4.0, 2.0}, {1.0, -1.0}, {2.0, 0.0}}) {
    const fc::ClassifyResult res = fc::run_classify_pipeline(k, c, 3, 42, 100);
    REQUIRE(res.reports.size() == 7);
    CHECK(res.reports[0].condition == "closed_form");
    CHECK(res.reports[1].condition == "euler_homogeneity");
    CHECK(res.reports[2].condition == "ode");
    CHECK(res.reports[3].condition == "phi_r_coupling");
    CHECK(res.reports[4].condition == "phi_u_profile");
    CHECK(res.reports[5].condition == "phi_v_coupling");
    CHECK(res.reports[6].condition == "quadrature");
    INFO("k=", k, " c=", c);
    CHECK(res.all_pass);
  }
  CHECK_THROWS_AS(fc::run_classify_pipeline(-1.0, 1.0, 3, 42, 10),
                  fc::ArgumentError);
}

TEST_CASE("report json is well formed and complete") {
  const MetricSpec funk = MetricSpec::funk(3);
  std::vector<fc::CertReport> reps;
  reps.push_back(fc::aggregate("rapcsak", funk, 7, 50, 1e-9));
  reps.push_back(fc::aggregate("dualflat", funk, 7, 50, 1e-9));
  const std::string text = fc::reports_to_json(reps);

  const nlohmann::json parsed = nlohmann::json::parse(text);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 2);
  for (const auto& obj : parsed) {
    REQUIRE(obj.is_object());
    CHECK(obj.size() == 8);
    CHECK(obj.contains("condition"));
    CHECK(obj.contains("samples"));
    CHECK(obj.contains("max_abs"));
    CHECK(obj.contains("mean_abs"));
    CHECK(obj.contains("tol"));
    CHECK(obj.contains("pass"));
    CHECK(obj.contains("seed"));
    REQUIRE(obj.contains("spec"));
    CHECK(obj["spec"].size() == 4);
    CHECK(obj["spec"]["kind"] == "funk");
    CHECK(obj["spec"]["k"] == 1.0);
    CHECK(obj["spec"]["c"] == 1.0);
    CHECK(obj["spec"]["dim"] == 3);
  }
  CHECK(parsed[0]["condition"] == "rapcsak");
  CHECK(parsed[0]["samples"] == 50);
  CHECK(parsed[0]["pass"] == true);
  // 17 significant digits survive the parse round trip.
  CHECK(parsed[0]["max_abs"].get<double>() == reps[0].max_abs);
  CHECK(parsed[0]["mean_abs"].get<double>() == reps[0].mean_abs);
}
