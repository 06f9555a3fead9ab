#include <cmath>

#include "doctest.h"
#include "etlab/chart.hpp"

using namespace etlab;
using namespace etlab::chart;

namespace {

const char* kCylinderDoc = R"J({ "dim": 3, "coords": ["t","theta","phi"],
  "metric": [["1", "0", "0"], [null, "1/3", "0"], [null, null, "(1/3)*sin(theta)^2"]],
  "f": "sin(sqrt(3)*t)", "h": "3*sin(sqrt(3)*t)",
  "domain": [[0.0, 1.8137993], [0.0, 3.1415926], [0.0, 6.2831853]],
  "margin": 0.1 })J";

}  // namespace

TEST_CASE("load_chart reads the cylinder document") {
  ChartSpec s = load_chart(kCylinderDoc);
  CHECK(s.dim == 3);
  CHECK(s.coords[1] == "theta");
  CHECK(s.margin == 0.1);
  CHECK(expr::to_string(s.metric[2][0]) == "0");
  const double p[] = {0.5, 1.0, 2.0};
  CHECK(evaluate_value(s, s.metric[2][2], p) ==
        doctest::Approx(std::sin(1.0) * std::sin(1.0) / 3));
  // round trip through the writer
  ChartSpec again = load_chart(chart_to_json(s));
  CHECK(chart_to_json(again) == chart_to_json(s));
}

TEST_CASE("load_chart validation") {
  CHECK_THROWS_AS(load_chart(R"J({"dim": 3})J"), SchemaError);
  CHECK_THROWS_AS(load_chart("[1,2]"), SchemaError);
  CHECK_THROWS_AS(load_chart("{"), SchemaError);
  const std::string asym = R"J({"dim": 3, "coords": ["a","b","c"],
    "metric": [["1","a","0"],["b","1","0"],[null,null,"1"]],
    "domain": [[0,1],[0,1],[0,1]]})J";
  CHECK_THROWS_AS(load_chart(asym), SchemaError);
  const std::string unbound = R"J({"dim": 3, "coords": ["a","b","c"],
    "metric": [["1","0","0"],[null,"1","0"],[null,null,"1"]], "f": "q + a",
    "domain": [[0,1],[0,1],[0,1]]})J";
  CHECK_THROWS_AS(load_chart(unbound), UnboundVariable);
  const std::string bad_expr = R"J({"dim": 3, "coords": ["a","b","c"],
    "metric": [["1","0","0"],[null,"1+","0"],[null,null,"1"]],
    "domain": [[0,1],[0,1],[0,1]]})J";
  try {
    load_chart(bad_expr);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).find("metric[1][1]") != std::string::npos);
  }
  const std::string bad_domain = R"J({"dim": 3, "coords": ["a","b","c"],
    "metric": [["1","0","0"],[null,"1","0"],[null,null,"1"]],
    "domain": [[0,1],[1,0],[0,1]]})J";
  CHECK_THROWS_AS(load_chart(bad_domain), SchemaError);
  const std::string dup = R"J({"dim": 3, "coords": ["a","a","c"],
    "metric": [["1","0","0"],[null,"1","0"],[null,null,"1"]],
    "domain": [[0,1],[0,1],[0,1]]})J";
  CHECK_THROWS_AS(load_chart(dup), SchemaError);
}

TEST_CASE("catalog construction") {
  for (const auto& info : catalog_list()) {
    auto m = catalog_model(info.name);
    CHECK(m.chart.dim == 3);
    CHECK(m.chart.f.has_value());
    CHECK(m.chart.h.has_value());
  }
  CHECK_THROWS_AS(catalog_model("torus"), ConfigError);
  CHECK_THROWS_AS(catalog_model("sphere_cap", {{"r0", 4.0}}), ConfigError);
  CHECK_THROWS_AS(catalog_model("euclid_ball", {{"c", -1.0}}), ConfigError);
  CHECK_THROWS_AS(catalog_model("cylinder3", {{"n", 4.0}}), ConfigError);
  auto cap4 = catalog_model("sphere_cap", {{"n", 4.0}});
  CHECK(cap4.chart.coords == std::vector<std::string>{"r", "theta1", "theta2", "phi"});
  CHECK(*catalog_model("sphere_cap", {{"r0", 2 * M_PI / 3}}).expect.lambda_expected ==
        doctest::Approx(-1.0));
  CHECK(catalog_model("hemisphere").expect.lambda_sign == LambdaSign::kZero);
  CHECK(catalog_model("euclid_ball").expect.lambda_sign == LambdaSign::kPositive);
  auto s = catalog_model("schwarzschild").chart;
  CHECK(s.sampling_box()[0].lo == doctest::Approx(1.2));
  CHECK(s.sampling_box()[0].hi == doctest::Approx(3.0));
}

TEST_CASE("grid and random sampling") {
  auto cyl = catalog_model("cylinder3").chart;
  auto grid = sample_points(cyl, SampleStrategy::grid(3));
  CHECK(grid.accepted.size() == 27);
  CHECK(grid.rejected.empty());
  auto a = sample_points(cyl, SampleStrategy::random(50, 7));
  auto b = sample_points(cyl, SampleStrategy::random(50, 7));
  CHECK(a.accepted == b.accepted);
  auto c = sample_points(cyl, SampleStrategy::random(50, 8));
  CHECK(a.accepted != c.accepted);

  auto cap = catalog_model("sphere_cap").chart;
  for (const auto& p : sample_points(cap, SampleStrategy::random(200, 3)).accepted) {
    CHECK(p[1] >= 0.05 * M_PI - 1e-15);
    CHECK(p[1] <= 0.95 * M_PI + 1e-15);
    CHECK(std::sin(p[1]) >= 0.15);
  }
  CHECK_THROWS_AS(sample_points(cap, SampleStrategy::grid(1)), ConfigError);
}

TEST_CASE("sampling rejects bad points with reasons") {
  auto spec = load_chart(R"J({"dim": 3, "coords": ["a","b","c"],
    "metric": [["a","0","0"],[null,"1","0"],[null,null,"1"]], "f": "b - 0.5",
    "domain": [[-1,1],[0,1],[0,1]], "margin": 0})J");
  auto s = sample_points(spec, SampleStrategy::grid(3));
  CHECK(s.accepted.size() == 3);
  bool saw_pd = false, saw_f = false;
  for (const auto& r : s.rejected) {
    saw_pd |= r.reason == "not_positive_definite";
    saw_f |= r.reason == "f_nonpositive";
  }
  CHECK(saw_pd);
  CHECK(saw_f);
}

TEST_CASE("fuzz metrics are deterministic and positive definite") {
  auto a = fuzz_metric(3, 1), b = fuzz_metric(3, 1);
  CHECK(chart_to_json(a) == chart_to_json(b));
  CHECK(chart_to_json(a) != chart_to_json(fuzz_metric(3, 2)));
  for (int dim = 3; dim <= 5; ++dim) {
    auto s = sample_points(fuzz_metric(dim, 4), SampleStrategy::random(30, 1));
    CHECK(s.accepted.size() == 30);
  }
  auto flat = fuzz_metric(4, 2, 0.0);
  const double p[] = {0.1, 0.2, 0.3, 0.4};
  auto g = metric_values(flat, p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(g(i, j) == (i == j ? 1.0 : 0.0));
  CHECK_THROWS_AS(fuzz_metric(6, 1), ConfigError);
}

TEST_CASE("cyclic coordinates") {
  CHECK(cyclic_coordinates(catalog_model("schwarzschild").chart) == std::vector<int>{2});
  CHECK(cyclic_coordinates(catalog_model("euclid_ball").chart).empty());
}
