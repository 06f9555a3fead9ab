#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etlab/chart.hpp"
#include "etlab/curvature.hpp"
#include "etlab/identities.hpp"

namespace etlab::harness {

inline constexpr const char* kToolVersion = "etlab 0.1.0";

struct Tolerances {
  // Overrides every identity's default rtol when set.
  std::optional<double> rtol;
  std::map<std::string, double> identity_rtol;
  // Expectation checks on R, λ and Λ, scaled by max(1, |expected|).
  double value_atol = 1e-10;
  double lambda_spread = 1e-9;
  double big_lambda_spread = 1e-10;
  // C14/C15 run only when spread(Λ) and max |∇Λ| are both
  // <= this * (1 + |mean Λ|).
  double lambda_constancy = 1e-6;
  double einstein = 1e-10;  // max |R̊ic|^2
  double parallel = 1e-9;   // max |∇Ric|^2
};

struct WarpedTarget {
  std::string phi;
  int n = 3;
  double t0 = 0.5, t1 = 1.5;
  double f0 = 1.0, df0 = 0.0;
  int steps = 1000;
  int samples = 41;
};

struct FuzzTarget {
  int dim = 3;
  int count = 1;              // metrics
  int points_per_metric = 20;
  std::uint64_t seed = 0;
  double amplitude = 0.05;
};

struct Target {
  enum class Kind { kCatalog, kChart, kFuzz, kWarped };
  Kind kind = Kind::kCatalog;
  std::string name;      // catalog model name or chart label
  chart::Params params;  // catalog parameters
  std::optional<chart::ChartSpec> chart;
  FuzzTarget fuzz;
  WarpedTarget warped;
  // User expectations: "lambda" and "R".
  std::map<std::string, double> expect;
  // Negative control: f is multiplied by (1 + 0.01 x1).
  bool corrupt_f = false;
};

struct SuiteConfig {
  std::vector<Target> targets;
  std::vector<std::string> identities;  // empty selects all
  chart::SampleStrategy sampling = chart::SampleStrategy::grid(3);
  Tolerances tol;
  int threads = 0;  // 0: ETLAB_THREADS, else hardware concurrency
  bool timing = false;
  curvature::RiemannLowering lowering = curvature::RiemannLowering::kStandard;
};

struct IdentityAggregate {
  std::string id;
  std::string conditionality;
  double rtol = 0;
  int points = 0;
  double max_abs = 0, mean_abs = 0, max_rel = 0, mean_rel = 0;
  double max_lhs = 0, max_rhs = 0;  // largest side norms over the points
  std::vector<double> worst_point;
  bool pass = true;
  std::optional<std::string> skip_reason;
  std::vector<std::string> errors;  // per-point failures, "point i: message"
};

struct ExpectationCheck {
  std::string name;
  std::optional<double> expected;
  double observed = 0;
  double tolerance = 0;
  bool pass = true;
  std::string detail;
};

struct ScalarSummary {
  double min = 0, max = 0, mean = 0;
  double spread() const { return max - min; }
};

struct TargetReport {
  std::string name;
  std::string kind;
  int dim = 0;
  int points_accepted = 0;
  std::vector<chart::RejectedPoint> rejected;
  std::vector<IdentityAggregate> identities;
  std::vector<ExpectationCheck> expectations;
  std::map<std::string, ScalarSummary> scalars;  // R, lambda, big_lambda, ...
  std::optional<bool> big_lambda_constant;
  std::optional<std::string> error;
  bool pass = true;
};

struct Report {
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> config;  // echo, rendered as strings
  std::vector<TargetReport> targets;
  std::optional<double> wall_time_s;
  bool overall_pass = true;
};

/// Throws ConfigError for unresolvable targets or invalid tolerances.
Report run_suite(const SuiteConfig& cfg);

/// Catalog models at grid 3 including the three λ-sign caps, a small fuzz
/// batch per dimension and one generic warped solution.
SuiteConfig default_suite();

/// Every catalog model at its default parameters.
std::vector<Target> catalog_targets();

int resolve_threads(int requested);

/// Process exit status: 0 pass, 1 check failure.
int exit_code(const Report& r);

// Stokes ------------------------------------------------------------------

enum class FieldKind { kX1, kX2, kFGradR, kFGradLambda };
FieldKind parse_field(const std::string& s);  // ConfigError on unknown names
std::string to_string(FieldKind k);

struct BoundaryIntegral {
  std::string model;
  std::string field;
  int grid = 0;
  std::vector<int> cyclic_axes;
  double interior = 0;  // ∫ div X dV
  double flux = 0;      // Σ over faces of ∫ ±X^a √g
  std::map<std::string, double> face_flux;
  double abs_mismatch = 0;
  double rel_mismatch = 0;  // abs / max(|interior|, |flux|), 0 when both vanish
  int evaluations = 0;
  bool pass = false;
};

struct StokesOptions {
  int grid = 32;
  int threads = 0;
  double rtol = 1e-3;
  double atol = 1e-6;
};

/// Midpoint quadrature of div X over the sampling box against the flux of X
/// through its coordinate faces. Coordinates no expression depends on are
/// integrated exactly; their two faces cancel. Throws UnsupportedGeometry
/// when the chart lacks f or h.
BoundaryIntegral stokes_check(const chart::ChartSpec& spec, FieldKind field,
                              const StokesOptions& options = {});

// Reporting ----------------------------------------------------------------

/// Canonical JSON: sorted keys, two-space indent, floats as "%.17g",
/// non-finite numbers as null.
std::string report_json(const Report& r);
std::string report_json(const BoundaryIntegral& b);
/// Throws ConfigError with the path on IO failure.
void emit_report(const std::string& json, const std::string& path);

}  // namespace etlab::harness
