// Command-line front end. Talks to the library exclusively through the C
// interface so it doubles as a smoke test of the shared-library boundary.
//
// Exit codes: 0 success, 1 certification failure, 2 configuration error,
// 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "finslercert.h"

namespace {

int status_to_exit(fc_status s) {
  switch (s) {
    case FC_OK:
      return 0;
    case FC_ERR_ARGUMENT:
    case FC_ERR_DOMAIN:
      return 2;
    case FC_ERR_IO:
      return 3;
    default:
      return 1;
  }
}

int complain(fc_status s) {
  std::fprintf(stderr, "error: %s\n", fc_last_error());
  return status_to_exit(s);
}

// path "-" writes to standard output.
bool write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return std::fflush(stdout) == 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out.flush());
}

struct MetricArgs {
  std::string name = "family";
  double k = 1.0;
  double c = 1.0;
  int dim = 3;
};

void add_metric_flags(CLI::App* cmd, MetricArgs* args, bool with_name) {
  if (with_name) {
    cmd->add_option("--metric", args->name,
                    "metric name: family, funk, euclidean, perturbed");
  }
  cmd->add_option("--k", args->k, "family parameter k (> 0)");
  cmd->add_option("--c", args->c, "family parameter c");
  cmd->add_option("--dim", args->dim, "ambient dimension (2..8)");
}

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { fc_string_free(s); }
};

struct MetricGuard {
  fc_metric* m = nullptr;
  ~MetricGuard() { fc_metric_destroy(m); }
};

struct TraceGuard {
  fc_trace* t = nullptr;
  ~TraceGuard() { fc_trace_destroy(t); }
};

int run_certify(const MetricArgs& met, uint64_t seed, int samples, double tol,
                const std::string& out_path) {
  MetricGuard metric;
  fc_status s = fc_metric_create(met.name.c_str(), met.k, met.c, met.dim,
                                 &metric.m);
  if (s != FC_OK) return complain(s);

  StringGuard json;
  double c_hat = 0.0, spread = 0.0;
  int as_expected = 0;
  s = fc_certify_run(metric.m, seed, samples, tol, &json.s, &c_hat, &spread,
                     &as_expected);
  if (s != FC_OK) return complain(s);

  if (!write_output(out_path, json.s)) {
    std::fprintf(stderr, "error: cannot write report to %s\n",
                 out_path.c_str());
    return 3;
  }
  std::fprintf(stderr, "estimated c: %.12g (spread %.3g)\n", c_hat, spread);
  std::fprintf(stderr, "certification %s\n",
               as_expected ? "as expected" : "NOT as expected");
  return as_expected ? 0 : 1;
}

int run_geodesic(const MetricArgs& met, const std::vector<double>& x0,
                 const std::vector<double>& y0, double t_end, double step,
                 double tol, const std::string& out_path) {
  MetricGuard metric;
  fc_status s = fc_metric_create(met.name.c_str(), met.k, met.c, met.dim,
                                 &metric.m);
  if (s != FC_OK) return complain(s);

  if (static_cast<int>(x0.size()) != met.dim ||
      static_cast<int>(y0.size()) != met.dim) {
    std::fprintf(stderr, "error: --x0/--y0 must have %d components\n", met.dim);
    return 2;
  }
  if (!(step > 0.0) || !(t_end > 0.0)) {
    std::fprintf(stderr, "error: --step and --t-end must be positive\n");
    return 2;
  }
  const int steps = static_cast<int>(t_end / step + 0.5);
  if (steps < 1) {
    std::fprintf(stderr, "error: horizon shorter than one step\n");
    return 2;
  }

  TraceGuard trace;
  s = fc_geodesic_run(metric.m, x0.data(), y0.data(), met.dim, t_end, steps,
                      &trace.t);
  if (s != FC_OK) return complain(s);

  StringGuard csv;
  s = fc_trace_csv(trace.t, &csv.s);
  if (s != FC_OK) return complain(s);
  if (!write_output(out_path, csv.s)) {
    std::fprintf(stderr, "error: cannot write trace to %s\n", out_path.c_str());
    return 3;
  }

  int points = 0, truncated = 0;
  fc_trace_info(trace.t, &points, &truncated);
  if (truncated != 0) {
    std::printf("note: trace truncated at the domain boundary after %d points\n",
                points);
  }

  double residual = 0.0;
  s = fc_trace_straightness(trace.t, &residual);
  if (s != FC_OK) {
    // Too few points to measure; a truncated start is informational.
    std::printf("straightness residual: unavailable (%s)\n", fc_last_error());
    return truncated != 0 ? 0 : status_to_exit(s);
  }
  std::printf("straightness residual: %.17g over %d points\n", residual,
              points);

  int claimed_flat = 0;
  fc_metric_info(metric.m, nullptr, nullptr, nullptr, &claimed_flat, nullptr);
  if (claimed_flat == 0 || residual <= tol) return 0;
  std::fprintf(stderr, "straightness residual exceeds tolerance %g\n", tol);
  return 1;
}

int run_classify(double k, double c, int dim, uint64_t seed, int samples,
                 const std::string& out_path) {
  StringGuard json;
  int all_pass = 0;
  const fc_status s =
      fc_classify_run(k, c, dim, seed, samples, &json.s, &all_pass);
  if (s != FC_OK) return complain(s);

  std::fprintf(stderr, "profile: f(t) = 1/sqrt(c^2 t + k), k=%.12g c=%.12g\n",
               k, c);
  if (!write_output(out_path, json.s)) {
    std::fprintf(stderr, "error: cannot write report to %s\n",
                 out_path.c_str());
    return 3;
  }
  std::fprintf(stderr, "classification %s\n", all_pass ? "passed" : "FAILED");
  return all_pass ? 0 : 1;
}

int run_selftest(double h, int samples, uint64_t seed, bool inject,
                 const std::string& out_path) {
  StringGuard json;
  int pass = 0;
  const fc_status s =
      fc_selftest_run(h, samples, seed, inject ? 1 : 0, &json.s, &pass);
  if (s != FC_OK) return complain(s);
  if (!write_output(out_path, json.s)) {
    std::fprintf(stderr, "error: cannot write report to %s\n",
                 out_path.c_str());
    return 3;
  }
  if (pass == 0) {
    std::fprintf(stderr, "selftest FAILED; worst_case in the report names the offender\n");
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certification toolkit for spherically symmetric metrics"};
  app.require_subcommand(1);

  MetricArgs cert_met;
  uint64_t cert_seed = 42;
  int cert_samples = 1000;
  double cert_tol = 1e-9;
  std::string cert_out = "-";
  CLI::App* certify = app.add_subcommand(
      "certify", "run every applicable flatness condition over seeded samples");
  add_metric_flags(certify, &cert_met, true);
  certify->add_option("--seed", cert_seed, "sampler seed");
  certify->add_option("--samples", cert_samples, "sample count");
  certify->add_option("--tol", cert_tol, "pass tolerance for max residual");
  certify->add_option("--out", cert_out, "report path, - for stdout");

  MetricArgs geo_met;
  std::vector<double> geo_x0, geo_y0;
  double geo_t_end = 1.0, geo_step = 1e-3, geo_tol = 1e-6;
  std::string geo_out = "trace.csv";
  CLI::App* geodesic = app.add_subcommand(
      "geodesic", "integrate a geodesic and measure chord straightness");
  add_metric_flags(geodesic, &geo_met, true);
  geodesic->add_option("--x0", geo_x0, "start point components")
      ->required()
      ->delimiter(',');
  geodesic->add_option("--y0", geo_y0, "initial velocity components")
      ->required()
      ->delimiter(',');
  geodesic->add_option("--t-end", geo_t_end, "integration horizon");
  geodesic->add_option("--step", geo_step, "integration step");
  geodesic->add_option("--tol", geo_tol, "straightness tolerance");
  geodesic->add_option("--out", geo_out, "trace CSV path, - for stdout");

  MetricArgs cls_met;
  uint64_t cls_seed = 42;
  int cls_samples = 1000;
  std::string cls_out = "-";
  CLI::App* classify = app.add_subcommand(
      "classify", "verify the closed-form solution chain at (k, c)");
  add_metric_flags(classify, &cls_met, false);
  classify->add_option("--seed", cls_seed, "sampler seed");
  classify->add_option("--samples", cls_samples, "identity sample count");
  classify->add_option("--out", cls_out, "report path, - for stdout");

  double st_h = 1e-5;
  int st_samples = 100;
  uint64_t st_seed = 42;
  bool st_inject = false;
  std::string st_out = "-";
  CLI::App* selftest = app.add_subcommand(
      "selftest", "compare jet derivatives against the finite-difference oracle");
  // --h is the conventional name for the step; free the -h shorthand so the
  // two do not collide.
  selftest->set_help_flag("--help", "print help");
  selftest->add_option("--h", st_h, "finite-difference step");
  selftest->add_option("--samples", st_samples, "points per metric");
  selftest->add_option("--seed", st_seed, "sampler seed");
  selftest
      ->add_flag("--inject-fault", st_inject,
                 "bias one derivative to prove the harness catches it")
      ->group("");  // hidden: test hook, not part of normal use
  selftest->add_option("--out", st_out, "report path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (certify->parsed()) {
    return run_certify(cert_met, cert_seed, cert_samples, cert_tol, cert_out);
  }
  if (geodesic->parsed()) {
    return run_geodesic(geo_met, geo_x0, geo_y0, geo_t_end, geo_step, geo_tol,
                        geo_out);
  }
  if (classify->parsed()) {
    return run_classify(cls_met.k, cls_met.c, cls_met.dim, cls_seed,
                        cls_samples, cls_out);
  }
  if (selftest->parsed()) {
    return run_selftest(st_h, st_samples, st_seed, st_inject, st_out);
  }
  return 2;
}
