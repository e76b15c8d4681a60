#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>

#include "json.hpp"

#include "finslercert.h"

namespace {

struct MetricGuard {
  fc_metric* m = nullptr;
  ~MetricGuard() { fc_metric_destroy(m); }
};

struct TraceGuard {
  fc_trace* t = nullptr;
  ~TraceGuard() { fc_trace_destroy(t); }
};

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { fc_string_free(s); }
};

}  // namespace

TEST_CASE("metric lifecycle and evaluation") {
  MetricGuard g;
  REQUIRE(fc_metric_create("funk", 0.0, 0.0, 3, &g.m) == FC_OK);
  REQUIRE(g.m != nullptr);

  double k = 0, c = 0, radius = 0;
  int dim = 0, flat = -1;
  CHECK(fc_metric_info(g.m, &k, &c, &dim, &flat, &radius) == FC_OK);
  CHECK(k == 1.0);
  CHECK(c == 1.0);
  CHECK(dim == 3);
  CHECK(flat == 1);
  CHECK(radius == doctest::Approx(1.0));

  const double x[3] = {0.5, 0.0, 0.0};
  const double y[3] = {0.0, 1.0, 0.0};
  double value = 0.0;
  REQUIRE(fc_metric_eval(g.m, x, y, 3, &value) == FC_OK);
  CHECK(value == doctest::Approx(std::sqrt(0.75) / 0.75).epsilon(1e-14));
}

TEST_CASE("argument and domain errors set the thread-local message") {
  fc_metric* m = nullptr;
  CHECK(fc_metric_create("randers", 1.0, 1.0, 3, &m) == FC_ERR_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::strlen(fc_last_error()) > 0);

  CHECK(fc_metric_create("family", -1.0, 1.0, 3, &m) == FC_ERR_ARGUMENT);
  CHECK(fc_metric_create(nullptr, 1.0, 1.0, 3, &m) == FC_ERR_ARGUMENT);

  MetricGuard g;
  REQUIRE(fc_metric_create("funk", 0.0, 0.0, 2, &g.m) == FC_OK);
  const double far[2] = {2.0, 0.0};
  const double y[2] = {1.0, 0.0};
  double value = 0.0;
  CHECK(fc_metric_eval(g.m, far, y, 2, &value) == FC_ERR_DOMAIN);
  CHECK(std::string(fc_last_error()).find("domain") != std::string::npos);
  CHECK(fc_metric_eval(g.m, far, y, 3, &value) == FC_ERR_ARGUMENT);
  CHECK(fc_metric_eval(g.m, nullptr, y, 2, &value) == FC_ERR_ARGUMENT);
}

TEST_CASE("certification through the C boundary") {
  MetricGuard g;
  REQUIRE(fc_metric_create("family", 2.0, 0.5, 3, &g.m) == FC_OK);

  StringGuard json;
  double c_hat = 0.0, spread = 1.0;
  int expected = 0;
  REQUIRE(fc_certify_run(g.m, 42, 150, 1e-9, &json.s, &c_hat, &spread,
                         &expected) == FC_OK);
  REQUIRE(json.s != nullptr);
  CHECK(std::abs(c_hat - 0.5) <= 1e-8);
  CHECK(spread <= 1e-8);
  CHECK(expected == 1);

  const nlohmann::json parsed = nlohmann::json::parse(json.s);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 5);
  CHECK(parsed[0]["condition"] == "convexity");
  CHECK(parsed[1]["condition"] == "coupled");
  CHECK(parsed[4]["condition"] == "rapcsak");
  for (const auto& rep : parsed) CHECK(rep["pass"] == true);
}

TEST_CASE("control metric certifies as expected-to-fail") {
  MetricGuard g;
  REQUIRE(fc_metric_create("perturbed", 1.0, 1.0, 3, &g.m) == FC_OK);
  StringGuard json;
  int expected = 0;
  REQUIRE(fc_certify_run(g.m, 42, 150, 1e-9, &json.s, nullptr, nullptr,
                         &expected) == FC_OK);
  CHECK(expected == 1);
  const nlohmann::json parsed = nlohmann::json::parse(json.s);
  for (const auto& rep : parsed) {
    if (rep["condition"] == "convexity") {
      CHECK(rep["pass"] == true);
    } else {
      CHECK(rep["pass"] == false);
    }
  }
}

TEST_CASE("classification through the C boundary") {
  StringGuard json;
  int all_pass = 0;
  REQUIRE(fc_classify_run(1.0, 1.0, 3, 42, 100, &json.s, &all_pass) == FC_OK);
  CHECK(all_pass == 1);
  const nlohmann::json parsed = nlohmann::json::parse(json.s);
  CHECK(parsed.size() == 7);

  StringGuard bad;
  CHECK(fc_classify_run(-1.0, 1.0, 3, 42, 100, &bad.s, &all_pass) ==
        FC_ERR_ARGUMENT);
}

TEST_CASE("selftest and fault injection") {
  StringGuard ok_json;
  int pass = 0;
  REQUIRE(fc_selftest_run(1e-5, 20, 42, 0, &ok_json.s, &pass) == FC_OK);
  CHECK(pass == 1);
  const nlohmann::json parsed = nlohmann::json::parse(ok_json.s);
  CHECK(parsed["pass"] == true);
  CHECK(parsed["worst_grad"].get<double>() <= 1e-6);
  CHECK(parsed["worst_hess"].get<double>() <= 1e-4);

  StringGuard bad_json;
  REQUIRE(fc_selftest_run(1e-5, 20, 42, 1, &bad_json.s, &pass) == FC_OK);
  CHECK(pass == 0);

  CHECK(fc_selftest_run(-1.0, 20, 42, 0, &bad_json.s, &pass) ==
        FC_ERR_ARGUMENT);
}

TEST_CASE("geodesic tracing through the C boundary") {
  MetricGuard g;
  REQUIRE(fc_metric_create("funk", 0.0, 0.0, 3, &g.m) == FC_OK);

  const double x0[3] = {0.1, 0.0, 0.0};
  const double y0[3] = {0.5, 0.5, 0.0};
  TraceGuard tr;
  REQUIRE(fc_geodesic_run(g.m, x0, y0, 3, 0.5, 500, &tr.t) == FC_OK);

  int points = 0, truncated = -1;
  CHECK(fc_trace_info(tr.t, &points, &truncated) == FC_OK);
  CHECK(points == 501);
  CHECK(truncated == 0);

  double residual = 1.0;
  CHECK(fc_trace_straightness(tr.t, &residual) == FC_OK);
  CHECK(residual <= 1e-6);

  StringGuard csv;
  REQUIRE(fc_trace_csv(tr.t, &csv.s) == FC_OK);
  const std::string text(csv.s);
  CHECK(text.rfind("t,x1,x2,x3,xd1,xd2,xd3\n", 0) == 0);

  const double outside[3] = {2.0, 0.0, 0.0};
  fc_trace* bad = nullptr;
  CHECK(fc_geodesic_run(g.m, outside, y0, 3, 0.5, 10, &bad) == FC_ERR_DOMAIN);
  CHECK(bad == nullptr);
}
