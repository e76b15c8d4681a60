#include "finslercert.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "certify.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "selftest.hpp"

struct fc_metric {
  fc::MetricSpec spec;
};

struct fc_trace {
  fc::GeodesicTrace trace;
};

namespace {

thread_local std::string g_last_error = "no error";

fc_status fail(fc_status code, const char* message) {
  g_last_error = message;
  return code;
}

// Runs fn, translating the library's exception hierarchy to status codes.
template <typename Fn>
fc_status guarded(Fn&& fn) {
  try {
    fn();
    return FC_OK;
  } catch (const fc::ArgumentError& e) {
    return fail(FC_ERR_ARGUMENT, e.what());
  } catch (const fc::DomainError& e) {
    return fail(FC_ERR_DOMAIN, e.what());
  } catch (const fc::ConvexityError& e) {
    return fail(FC_ERR_CONVEXITY, e.what());
  } catch (const fc::NumericError& e) {
    return fail(FC_ERR_NUMERIC, e.what());
  } catch (const fc::EstimationError& e) {
    return fail(FC_ERR_ESTIMATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FC_ERR_NOMEM, "out of memory");
  } catch (const std::exception& e) {
    return fail(FC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FC_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Eigen::VectorXd to_vector(const double* data, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = data[i];
  return v;
}

}  // namespace

extern "C" {

const char* fc_last_error(void) { return g_last_error.c_str(); }

void fc_string_free(char* s) { std::free(s); }

fc_status fc_metric_create(const char* name, double k, double c, int dim,
                           fc_metric** out) {
  if (name == nullptr || out == nullptr) {
    return fail(FC_ERR_ARGUMENT, "name and out must not be NULL");
  }
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<fc_metric>();
    handle->spec = fc::metric_from_name(name, k, c, dim);
    *out = handle.release();
  });
}

void fc_metric_destroy(fc_metric* m) { delete m; }

fc_status fc_metric_info(const fc_metric* m, double* out_k, double* out_c,
                         int* out_dim, int* out_claimed_flat,
                         double* out_domain_radius) {
  if (m == nullptr) return fail(FC_ERR_ARGUMENT, "metric handle is NULL");
  if (out_k != nullptr) *out_k = m->spec.k;
  if (out_c != nullptr) *out_c = m->spec.c;
  if (out_dim != nullptr) *out_dim = m->spec.dim;
  if (out_claimed_flat != nullptr) *out_claimed_flat = m->spec.claimed_flat ? 1 : 0;
  if (out_domain_radius != nullptr) *out_domain_radius = m->spec.domain_radius();
  return FC_OK;
}

fc_status fc_metric_eval(const fc_metric* m, const double* x, const double* y,
                         int dim, double* out_value) {
  if (m == nullptr || x == nullptr || y == nullptr || out_value == nullptr) {
    return fail(FC_ERR_ARGUMENT, "NULL pointer argument");
  }
  if (dim != m->spec.dim) {
    return fail(FC_ERR_ARGUMENT, "dimension does not match the metric");
  }
  return guarded([&] {
    fc::SamplePoint p;
    p.x = to_vector(x, dim);
    p.y = to_vector(y, dim);
    *out_value = fc::finsler_eval(m->spec, p);
  });
}

fc_status fc_certify_run(const fc_metric* m, uint64_t seed, int count,
                         double tol, char** out_json, double* out_c_hat,
                         double* out_c_spread, int* out_as_expected) {
  if (m == nullptr || out_json == nullptr) {
    return fail(FC_ERR_ARGUMENT, "metric and out_json must not be NULL");
  }
  *out_json = nullptr;
  return guarded([&] {
    const fc::SuiteResult res =
        fc::run_certify_suite(m->spec, seed, count, tol);
    *out_json = dup_string(fc::reports_to_json(res.reports));
    if (out_c_hat != nullptr) *out_c_hat = res.c_hat;
    if (out_c_spread != nullptr) *out_c_spread = res.c_spread;
    if (out_as_expected != nullptr) *out_as_expected = res.all_as_expected ? 1 : 0;
  });
}

fc_status fc_classify_run(double k, double c, int dim, uint64_t seed,
                          int count, char** out_json, int* out_all_pass) {
  if (out_json == nullptr) {
    return fail(FC_ERR_ARGUMENT, "out_json must not be NULL");
  }
  *out_json = nullptr;
  return guarded([&] {
    const fc::ClassifyResult res =
        fc::run_classify_pipeline(k, c, dim, seed, count);
    *out_json = dup_string(fc::reports_to_json(res.reports));
    if (out_all_pass != nullptr) *out_all_pass = res.all_pass ? 1 : 0;
  });
}

fc_status fc_selftest_run(double fd_step, int points_per_metric, uint64_t seed,
                          int inject_fault, char** out_json, int* out_pass) {
  if (out_json == nullptr) {
    return fail(FC_ERR_ARGUMENT, "out_json must not be NULL");
  }
  *out_json = nullptr;
  return guarded([&] {
    const fc::SelftestResult res =
        fc::run_selftest(fd_step, points_per_metric, seed, inject_fault != 0);
    *out_json = dup_string(fc::selftest_to_json(res));
    if (out_pass != nullptr) *out_pass = res.pass ? 1 : 0;
  });
}

fc_status fc_geodesic_run(const fc_metric* m, const double* x0,
                          const double* y0, int dim, double t_end, int steps,
                          fc_trace** out) {
  if (m == nullptr || x0 == nullptr || y0 == nullptr || out == nullptr) {
    return fail(FC_ERR_ARGUMENT, "NULL pointer argument");
  }
  if (dim != m->spec.dim) {
    return fail(FC_ERR_ARGUMENT, "dimension does not match the metric");
  }
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<fc_trace>();
    handle->trace = fc::geodesic_integrate(m->spec, to_vector(x0, dim),
                                           to_vector(y0, dim), t_end, steps);
    *out = handle.release();
  });
}

void fc_trace_destroy(fc_trace* t) { delete t; }

fc_status fc_trace_info(const fc_trace* t, int* out_points,
                        int* out_truncated) {
  if (t == nullptr) return fail(FC_ERR_ARGUMENT, "trace handle is NULL");
  if (out_points != nullptr) {
    *out_points = static_cast<int>(t->trace.states.size());
  }
  if (out_truncated != nullptr) *out_truncated = t->trace.truncated ? 1 : 0;
  return FC_OK;
}

fc_status fc_trace_csv(const fc_trace* t, char** out_csv) {
  if (t == nullptr || out_csv == nullptr) {
    return fail(FC_ERR_ARGUMENT, "NULL pointer argument");
  }
  *out_csv = nullptr;
  return guarded([&] { *out_csv = dup_string(fc::trace_to_csv(t->trace)); });
}

fc_status fc_trace_straightness(const fc_trace* t, double* out_residual) {
  if (t == nullptr || out_residual == nullptr) {
    return fail(FC_ERR_ARGUMENT, "NULL pointer argument");
  }
  return guarded([&] { *out_residual = fc::straightness_residual(t->trace); });
}

}  // extern "C"
