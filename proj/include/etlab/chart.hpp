#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etlab/expr.hpp"
#include "etlab/jets.hpp"
#include "etlab/tensor.hpp"

namespace etlab::chart {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// A coordinate chart carrying a metric and an optional potential pair
/// (f, h). The metric matrix is stored full and symmetric.
struct ChartSpec {
  std::string name;
  int dim = 0;
  std::vector<std::string> coords;
  std::vector<std::vector<expr::Expr>> metric;
  std::optional<expr::Expr> f;
  std::optional<expr::Expr> h;
  std::vector<Interval> domain;
  // Sampling inset on each side, as a fraction of the interval length.
  double margin = 0.05;

  // Domain shrunk by the margin on every side.
  std::vector<Interval> sampling_box() const;
};

enum class LambdaSign { kPositive, kZero, kNegative, kNotApplicable };

std::string_view to_string(LambdaSign s);

struct ModelExpectation {
  std::optional<double> lambda_expected;
  std::optional<double> scalar_curv_expected;
  std::optional<double> big_lambda_expected;
  bool einstein = false;
  bool parallel_ricci = false;
  LambdaSign lambda_sign = LambdaSign::kNotApplicable;
};

struct CatalogModel {
  ChartSpec chart;
  ModelExpectation expect;
};

using Params = std::map<std::string, double, std::less<>>;

/// Parses and validates a chart document (JSON object with dim, coords,
/// metric, optional f and h, domain, optional margin and name).
ChartSpec load_chart(std::string_view document);

/// Serialises a chart in the same schema load_chart() accepts.
std::string chart_to_json(const ChartSpec& spec);

struct CatalogInfo {
  std::string name;
  std::string params;
  std::string description;
};
std::vector<CatalogInfo> catalog_list();

/// Exact model spaces: euclid_ball, sphere_cap, hemisphere, hyperbolic_ball,
/// cylinder3, schwarzschild. Throws ConfigError on unknown names or
/// out-of-range parameters.
CatalogModel catalog_model(const std::string& name, const Params& params = {});

/// g = d(radial)^2 + warp^2 * (round S^{n-1}) in nested polar coordinates.
/// Polar angles run over [0, pi], the azimuth over [0, 2 pi].
ChartSpec polar_warped_chart(const std::string& radial, const expr::Expr& warp, int n,
                             Interval radial_domain);

struct SampleStrategy {
  enum class Kind { kGrid, kRandom };
  Kind kind = Kind::kGrid;
  int count = 3;  // points per axis for grids, total for random
  std::uint64_t seed = 0;

  static SampleStrategy grid(int k) { return {Kind::kGrid, k, 0}; }
  static SampleStrategy random(int count, std::uint64_t seed) {
    return {Kind::kRandom, count, seed};
  }
};

struct RejectedPoint {
  std::vector<double> point;
  std::string reason;
};

struct SampleSet {
  std::vector<std::vector<double>> accepted;
  std::vector<RejectedPoint> rejected;
};

// Points whose metric condition number exceeds this are rejected.
inline constexpr double kMaxConditionNumber = 1e8;

/// Grid nodes span the sampling box including its faces; random points are
/// uniform in it. Each point must give a positive-definite, well-conditioned
/// metric and f > 0 when f is present.
SampleSet sample_points(const ChartSpec& spec, const SampleStrategy& strategy);

/// Checks one point; returns the rejection reason or nullopt when accepted.
std::optional<std::string> check_point(const ChartSpec& spec, std::span<const double> point);

/// g = I + amplitude * S with S a symmetric matrix of random smooth
/// expressions on the unit cube, plus a random positive potential f.
/// Deterministic in (dim, seed).
ChartSpec fuzz_metric(int dim, std::uint64_t seed, double amplitude = 0.05);

// Pointwise evaluation.
tensor::Tensor<jets::Jet> metric_jets(const ChartSpec& spec, std::span<const double> point,
                                      int order);
tensor::Tensor<double> metric_values(const ChartSpec& spec, std::span<const double> point);
jets::Jet evaluate_jet(const ChartSpec& spec, const expr::Expr& e,
                       std::span<const double> point, int order);
double evaluate_value(const ChartSpec& spec, const expr::Expr& e,
                      std::span<const double> point);

/// Coordinates that no metric, f or h expression depends on.
std::vector<int> cyclic_coordinates(const ChartSpec& spec);

}  // namespace etlab::chart
