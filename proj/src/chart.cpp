#include "etlab/chart.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "etlab/random.hpp"
#include "json.hpp"

namespace etlab::chart {

using expr::Expr;
using json = nlohmann::json;

std::vector<Interval> ChartSpec::sampling_box() const {
  std::vector<Interval> box = domain;
  for (auto& iv : box) {
    const double inset = margin * iv.length();
    iv.lo += inset;
    iv.hi -= inset;
  }
  return box;
}

std::string_view to_string(LambdaSign s) {
  switch (s) {
    case LambdaSign::kPositive: return "+";
    case LambdaSign::kZero: return "0";
    case LambdaSign::kNegative: return "-";
    case LambdaSign::kNotApplicable: return "n/a";
  }
  return "n/a";
}

namespace {

std::string field_path(std::string_view field, int i = -1, int j = -1) {
  std::string p(field);
  if (i >= 0) p += "[" + std::to_string(i) + "]";
  if (j >= 0) p += "[" + std::to_string(j) + "]";
  return p;
}

Expr parse_field(const std::string& text, const std::string& path) {
  try {
    return expr::parse(text);
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.offset(), path + ": " + e.message());
  } catch (const UnknownFunction& e) {
    throw UnknownFunction(e.name(), path);
  }
}

Expr parse_entry(const json& v, const std::string& path) {
  if (v.is_string()) return parse_field(v.get<std::string>(), path);
  if (v.is_number()) return expr::constant(v.get<double>());
  throw SchemaError(path + ": expected an expression string");
}

void check_bound(const Expr& e, const std::set<std::string>& coords, const std::string& path) {
  for (const auto& v : expr::free_variables(e)) {
    if (!coords.count(v)) throw UnboundVariable(v, path);
  }
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

ChartSpec load_chart(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("chart document must be a JSON object");

  ChartSpec spec;
  const json& dim = require(doc, "dim");
  if (!dim.is_number_integer()) throw SchemaError("dim: expected an integer");
  spec.dim = dim.get<int>();
  if (spec.dim < 3 || spec.dim > jets::kMaxVars) {
    throw SchemaError("dim: must lie in [3, " + std::to_string(jets::kMaxVars) + "], got " +
                      std::to_string(spec.dim));
  }
  const int n = spec.dim;

  const json& coords = require(doc, "coords");
  if (!coords.is_array() || static_cast<int>(coords.size()) != n) {
    throw SchemaError("coords: expected " + std::to_string(n) + " names");
  }
  std::set<std::string> coord_set;
  for (int i = 0; i < n; ++i) {
    if (!coords[i].is_string()) throw SchemaError(field_path("coords", i) + ": expected a string");
    std::string name = coords[i].get<std::string>();
    if (!expr::is_identifier(name) || expr::function_from_name(name) || name == "pi" ||
        name == "e") {
      throw SchemaError(field_path("coords", i) + ": '" + name + "' is not a usable identifier");
    }
    if (!coord_set.insert(name).second) {
      throw SchemaError(field_path("coords", i) + ": duplicate coordinate '" + name + "'");
    }
    spec.coords.push_back(std::move(name));
  }

  const json& metric = require(doc, "metric");
  if (!metric.is_array() || static_cast<int>(metric.size()) != n) {
    throw SchemaError("metric: expected " + std::to_string(n) + " rows");
  }
  for (int i = 0; i < n; ++i) {
    if (!metric[i].is_array() || static_cast<int>(metric[i].size()) != n) {
      throw SchemaError(field_path("metric", i) + ": expected " + std::to_string(n) + " entries");
    }
  }
  std::vector<std::vector<std::optional<Expr>>> parsed(n, std::vector<std::optional<Expr>>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (metric[i][j].is_null()) continue;
      parsed[i][j] = parse_entry(metric[i][j], field_path("metric", i, j));
      check_bound(*parsed[i][j], coord_set, field_path("metric", i, j));
    }
  }
  spec.metric.assign(n, std::vector<Expr>(n, expr::constant(0.0)));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const auto& up = parsed[i][j];
      const auto& lo = parsed[j][i];
      if (!up && !lo) {
        throw SchemaError(field_path("metric", i, j) + ": entry and its transpose are both null");
      }
      if (up && lo && i != j && expr::to_string(*up) != expr::to_string(*lo)) {
        throw SchemaError(field_path("metric", i, j) + " and " + field_path("metric", j, i) +
                          " differ: asymmetric metric");
      }
      const Expr& e = up ? *up : *lo;
      spec.metric[i][j] = e;
      spec.metric[j][i] = e;
    }
  }

  for (const char* key : {"f", "h"}) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) continue;
    Expr e = parse_entry(*it, key);
    check_bound(e, coord_set, key);
    (std::string_view(key) == "f" ? spec.f : spec.h) = e;
  }

  const json& domain = require(doc, "domain");
  if (!domain.is_array() || static_cast<int>(domain.size()) != n) {
    throw SchemaError("domain: expected " + std::to_string(n) + " intervals");
  }
  for (int i = 0; i < n; ++i) {
    const json& iv = domain[i];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      throw SchemaError(field_path("domain", i) + ": expected [lo, hi]");
    }
    Interval r{iv[0].get<double>(), iv[1].get<double>()};
    if (!(r.lo < r.hi)) throw SchemaError(field_path("domain", i) + ": requires lo < hi");
    spec.domain.push_back(r);
  }

  if (auto it = doc.find("margin"); it != doc.end() && !it->is_null()) {
    if (!it->is_number()) throw SchemaError("margin: expected a number");
    spec.margin = it->get<double>();
    if (!(spec.margin >= 0.0 && spec.margin < 0.5)) {
      throw SchemaError("margin: must lie in [0, 0.5)");
    }
  }
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) {
    spec.name = it->get<std::string>();
  }
  return spec;
}

std::string chart_to_json(const ChartSpec& spec) {
  json doc;
  doc["dim"] = spec.dim;
  doc["coords"] = spec.coords;
  json metric = json::array();
  for (int i = 0; i < spec.dim; ++i) {
    json row = json::array();
    for (int j = 0; j < spec.dim; ++j) {
      if (j < i) {
        row.push_back(nullptr);
      } else {
        row.push_back(expr::to_string(spec.metric[i][j]));
      }
    }
    metric.push_back(row);
  }
  doc["metric"] = metric;
  if (spec.f) doc["f"] = expr::to_string(*spec.f);
  if (spec.h) doc["h"] = expr::to_string(*spec.h);
  json domain = json::array();
  for (const auto& iv : spec.domain) domain.push_back({iv.lo, iv.hi});
  doc["domain"] = domain;
  doc["margin"] = spec.margin;
  if (!spec.name.empty()) doc["name"] = spec.name;
  return doc.dump(2);
}

// Catalog -------------------------------------------------------------------

namespace {

Expr c(double v) { return expr::constant(v); }
Expr var(const std::string& s) { return expr::variable(s); }
Expr sq(Expr e) { return expr::pow(std::move(e), c(2)); }
Expr fn(expr::Function f, Expr e) { return expr::call(f, std::move(e)); }

std::vector<std::string> angle_names(int n) {
  std::vector<std::string> names;
  if (n == 3) return {"theta", "phi"};
  for (int i = 1; i <= n - 2; ++i) names.push_back("theta" + std::to_string(i));
  names.push_back("phi");
  return names;
}

double param(const Params& p, std::string_view key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_params(const Params& p, std::initializer_list<std::string_view> allowed,
                  const std::string& model) {
  for (const auto& [k, v] : p) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ConfigError(model + ": unknown parameter '" + k + "'");
    }
    if (!std::isfinite(v)) throw ConfigError(model + ": parameter '" + k + "' is not finite");
  }
}

int dim_param(const Params& p, const std::string& model) {
  const double nd = param(p, "n", 3);
  if (nd != std::trunc(nd) || nd < 3 || nd > jets::kMaxVars) {
    throw ConfigError(model + ": n must be an integer in [3, " + std::to_string(jets::kMaxVars) +
                      "]");
  }
  return static_cast<int>(nd);
}

LambdaSign sign_of(double v) {
  if (std::abs(v) <= 1e-12) return LambdaSign::kZero;
  return v > 0 ? LambdaSign::kPositive : LambdaSign::kNegative;
}

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

ChartSpec polar_warped_chart(const std::string& radial, const Expr& warp, int n,
                             Interval radial_domain) {
  if (n < 3 || n > jets::kMaxVars) {
    throw ConfigError("polar chart dimension must lie in [3, " + std::to_string(jets::kMaxVars) +
                      "]");
  }
  ChartSpec spec;
  spec.dim = n;
  spec.coords.push_back(radial);
  const auto angles = angle_names(n);
  spec.coords.insert(spec.coords.end(), angles.begin(), angles.end());
  spec.metric.assign(n, std::vector<Expr>(n, c(0)));
  spec.metric[0][0] = c(1);
  Expr factor = sq(warp);
  for (int a = 0; a < n - 1; ++a) {
    spec.metric[a + 1][a + 1] = factor;
    if (a + 1 < n - 1) factor = factor * sq(fn(expr::Function::kSin, var(angles[a])));
  }
  spec.domain.push_back(radial_domain);
  for (int a = 0; a < n - 2; ++a) spec.domain.push_back({0.0, M_PI});
  spec.domain.push_back({0.0, 2.0 * M_PI});
  return spec;
}

std::vector<CatalogInfo> catalog_list() {
  return {
      {"euclid_ball", "n=3, c=1", "flat cube, f = c(1 - |x|^2), h = 2c"},
      {"sphere_cap", "n=3, r0=pi/3", "round cap, f = cos r - cos r0"},
      {"hemisphere", "n=3", "round hemisphere, f = cos r, h = n cos r"},
      {"hyperbolic_ball", "n=3, r0=1", "hyperbolic ball, f = cosh r0 - cosh r"},
      {"cylinder3", "", "R x S^2(1/sqrt 3), f = sin(sqrt(3) t), h = 3f"},
      {"schwarzschild", "n=3, m=0.5", "spatial Schwarzschild annulus, h = 0"},
  };
}

CatalogModel catalog_model(const std::string& name, const Params& params) {
  CatalogModel m;
  ModelExpectation& ex = m.expect;
  const Expr r = var("r");

  if (name == "euclid_ball") {
    check_params(params, {"n", "c"}, name);
    const int n = dim_param(params, name);
    const double cc = param(params, "c", 1.0);
    if (!(cc > 0)) throw ConfigError("euclid_ball: c must be positive");
    ChartSpec& s = m.chart;
    s.dim = n;
    s.metric.assign(n, std::vector<Expr>(n, c(0)));
    Expr sum = c(0);
    const double half = 0.5 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
      s.coords.push_back("x" + std::to_string(i + 1));
      s.metric[i][i] = c(1);
      sum = i == 0 ? sq(var(s.coords[i])) : sum + sq(var(s.coords[i]));
      s.domain.push_back({-half, half});
    }
    s.f = c(cc) * (c(1) - sum);
    s.h = c(2 * cc);
    const double lambda = 2 * cc * (n - 1);
    ex.lambda_expected = lambda;
    ex.scalar_curv_expected = 0.0;
    ex.big_lambda_expected = 2 * cc * cc;
    ex.einstein = true;
    ex.parallel_ricci = true;
    ex.lambda_sign = sign_of(lambda);
    s.name = "euclid_ball(n=" + std::to_string(n) + ", c=" + format_param(cc) + ")";
    return m;
  }

  if (name == "sphere_cap" || name == "hemisphere") {
    const bool hemi = name == "hemisphere";
    check_params(params, hemi ? std::initializer_list<std::string_view>{"n"}
                              : std::initializer_list<std::string_view>{"n", "r0"},
                 name);
    const int n = dim_param(params, name);
    const double r0 = hemi ? M_PI / 2 : param(params, "r0", M_PI / 3);
    if (!(r0 > 0 && r0 < M_PI)) throw ConfigError(name + ": r0 must lie in (0, pi)");
    m.chart = polar_warped_chart("r", fn(expr::Function::kSin, r), n, {0.0, r0});
    const double cr0 = hemi ? 0.0 : std::cos(r0);
    const Expr cos_r = fn(expr::Function::kCos, r);
    if (hemi) {
      m.chart.f = cos_r;
      m.chart.h = c(n) * cos_r;
    } else {
      m.chart.f = cos_r - c(cr0);
      m.chart.h = c(n) * cos_r - c((n - 1) * cr0);
    }
    const double lambda = (n - 1) * cr0;
    ex.lambda_expected = lambda;
    ex.scalar_curv_expected = n * (n - 1.0);
    const double s0 = std::sin(r0);
    ex.big_lambda_expected = 0.5 * s0 * s0;
    ex.einstein = true;
    ex.parallel_ricci = true;
    ex.lambda_sign = sign_of(lambda);
    m.chart.name = hemi ? "hemisphere(n=" + std::to_string(n) + ")"
                        : "sphere_cap(n=" + std::to_string(n) + ", r0=" + format_param(r0) + ")";
    return m;
  }

  if (name == "hyperbolic_ball") {
    check_params(params, {"n", "r0"}, name);
    const int n = dim_param(params, name);
    const double r0 = param(params, "r0", 1.0);
    if (!(r0 > 0 && r0 <= 5)) throw ConfigError("hyperbolic_ball: r0 must lie in (0, 5]");
    m.chart = polar_warped_chart("r", fn(expr::Function::kSinh, r), n, {0.0, r0});
    const double ch = std::cosh(r0);
    const Expr cosh_r = fn(expr::Function::kCosh, r);
    m.chart.f = c(ch) - cosh_r;
    m.chart.h = c(n) * cosh_r - c((n - 1) * ch);
    const double lambda = (n - 1) * ch;
    ex.lambda_expected = lambda;
    ex.scalar_curv_expected = -n * (n - 1.0);
    const double sh = std::sinh(r0);
    ex.big_lambda_expected = 0.5 * sh * sh;
    ex.einstein = true;
    ex.parallel_ricci = true;
    ex.lambda_sign = sign_of(lambda);
    m.chart.name =
        "hyperbolic_ball(n=" + std::to_string(n) + ", r0=" + format_param(r0) + ")";
    return m;
  }

  if (name == "cylinder3") {
    check_params(params, {}, name);
    ChartSpec& s = m.chart;
    s.dim = 3;
    s.coords = {"t", "theta", "phi"};
    s.metric.assign(3, std::vector<Expr>(3, c(0)));
    s.metric[0][0] = c(1);
    s.metric[1][1] = c(1) / c(3);
    s.metric[2][2] = (c(1) / c(3)) * sq(fn(expr::Function::kSin, var("theta")));
    const Expr arg = fn(expr::Function::kSqrt, c(3)) * var("t");
    s.f = fn(expr::Function::kSin, arg);
    s.h = c(3) * fn(expr::Function::kSin, arg);
    s.domain = {{0.0, M_PI / std::sqrt(3.0)}, {0.0, M_PI}, {0.0, 2 * M_PI}};
    ex.lambda_expected = 0.0;
    ex.scalar_curv_expected = 6.0;
    ex.einstein = false;
    ex.parallel_ricci = true;
    ex.lambda_sign = LambdaSign::kZero;
    s.name = "cylinder3";
    return m;
  }

  if (name == "schwarzschild") {
    check_params(params, {"n", "m"}, name);
    const int n = dim_param(params, name);
    const double mass = param(params, "m", 0.5);
    if (!(mass > 0)) throw ConfigError("schwarzschild: m must be positive");
    const double rh = std::pow(2 * mass, 1.0 / (n - 2));
    m.chart = polar_warped_chart("r", r, n, {1.1 * rh, 3.1 * rh});
    const Expr lapse_sq = c(1) - c(2 * mass) * expr::pow(r, c(2 - n));
    m.chart.metric[0][0] = c(1) / lapse_sq;
    m.chart.f = fn(expr::Function::kSqrt, lapse_sq);
    m.chart.h = c(0);
    ex.lambda_expected = 0.0;
    ex.scalar_curv_expected = 0.0;
    ex.einstein = false;
    ex.parallel_ricci = false;
    ex.lambda_sign = LambdaSign::kZero;
    m.chart.name =
        "schwarzschild(n=" + std::to_string(n) + ", m=" + format_param(mass) + ")";
    return m;
  }

  throw ConfigError("unknown catalog model '" + name + "'");
}

// Evaluation ----------------------------------------------------------------

jets::Jet evaluate_jet(const ChartSpec& spec, const Expr& e, std::span<const double> point,
                       int order) {
  expr::Env<jets::Jet> env;
  for (int i = 0; i < spec.dim; ++i) {
    env.emplace(spec.coords[i], jets::Jet::variable(i, point[i], spec.dim, order));
  }
  return expr::evaluate(e, env, jets::JetShape{spec.dim, order});
}

double evaluate_value(const ChartSpec& spec, const Expr& e, std::span<const double> point) {
  expr::Env<double> env;
  for (int i = 0; i < spec.dim; ++i) env.emplace(spec.coords[i], point[i]);
  return expr::evaluate(e, env);
}

tensor::Tensor<jets::Jet> metric_jets(const ChartSpec& spec, std::span<const double> point,
                                      int order) {
  const int n = spec.dim;
  expr::Env<jets::Jet> env;
  for (int i = 0; i < n; ++i) {
    env.emplace(spec.coords[i], jets::Jet::variable(i, point[i], n, order));
  }
  const jets::JetShape shape{n, order};
  tensor::Tensor<jets::Jet> g(2, n, jets::Jet(n, order));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g(i, j) = expr::evaluate(spec.metric[i][j], env, shape);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

tensor::Tensor<double> metric_values(const ChartSpec& spec, std::span<const double> point) {
  const int n = spec.dim;
  expr::Env<double> env;
  for (int i = 0; i < n; ++i) env.emplace(spec.coords[i], point[i]);
  tensor::Tensor<double> g(2, n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g(i, j) = expr::evaluate(spec.metric[i][j], env);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

std::vector<int> cyclic_coordinates(const ChartSpec& spec) {
  std::set<std::string> used;
  auto collect = [&](const Expr& e) {
    for (auto& v : expr::free_variables(e)) used.insert(v);
  };
  for (const auto& row : spec.metric)
    for (const auto& e : row) collect(e);
  if (spec.f) collect(*spec.f);
  if (spec.h) collect(*spec.h);
  std::vector<int> out;
  for (int i = 0; i < spec.dim; ++i)
    if (!used.count(spec.coords[i])) out.push_back(i);
  return out;
}

// Sampling ------------------------------------------------------------------

std::optional<std::string> check_point(const ChartSpec& spec, std::span<const double> point) {
  try {
    const auto g = metric_values(spec, point);
    for (double v : g.components()) {
      if (!std::isfinite(v)) return "non_finite_metric";
    }
    if (!tensor::is_positive_definite(g)) return "not_positive_definite";
    if (tensor::condition_number(g) > kMaxConditionNumber) return "ill_conditioned";
    if (spec.f) {
      const double f = evaluate_value(spec, *spec.f, point);
      if (!(f > 0.0)) return "f_nonpositive";
    }
  } catch (const DomainError& e) {
    return std::string("domain_error: ") + e.what();
  }
  return std::nullopt;
}

SampleSet sample_points(const ChartSpec& spec, const SampleStrategy& strategy) {
  const int n = spec.dim;
  const auto box = spec.sampling_box();
  std::vector<std::vector<double>> candidates;
  if (strategy.kind == SampleStrategy::Kind::kGrid) {
    const int k = strategy.count;
    if (k < 2) throw ConfigError("grid sampling needs at least 2 points per axis");
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(k);
    for (std::size_t f = 0; f < total; ++f) {
      std::vector<double> p(n);
      std::size_t rest = f;
      for (int i = n - 1; i >= 0; --i) {
        const int idx = static_cast<int>(rest % k);
        rest /= k;
        p[i] = box[i].lo + box[i].length() * idx / (k - 1);
      }
      candidates.push_back(std::move(p));
    }
  } else {
    if (strategy.count < 1) throw ConfigError("random sampling needs at least 1 point");
    SplitMix64 rng(strategy.seed);
    for (int c = 0; c < strategy.count; ++c) {
      std::vector<double> p(n);
      for (int i = 0; i < n; ++i) p[i] = box[i].lo + box[i].length() * rng.uniform();
      candidates.push_back(std::move(p));
    }
  }
  SampleSet out;
  for (auto& p : candidates) {
    if (auto reason = check_point(spec, p)) {
      out.rejected.push_back({std::move(p), *reason});
    } else {
      out.accepted.push_back(std::move(p));
    }
  }
  return out;
}

// Fuzzing -------------------------------------------------------------------

namespace {

struct Term {
  double coef;
  Expr e;
};

// Terms are bounded by 1 on the unit cube; scaling so the coefficients sum
// to at most 1 in absolute value keeps the whole expression in [-1, 1].
Expr normalized_sum(std::vector<Term> terms) {
  double total = 0.0;
  for (const auto& t : terms) total += std::abs(t.coef);
  if (total < 1.0) total = 1.0;
  std::optional<Expr> acc;
  for (const auto& t : terms) {
    Expr piece = c(t.coef / total) * t.e;
    acc = acc ? *acc + piece : piece;
  }
  return acc ? *acc : c(0);
}

Expr random_monomial(SplitMix64& rng, const std::vector<std::string>& coords) {
  const int degree = 1 + static_cast<int>(rng.below(3));
  std::optional<Expr> acc;
  for (int d = 0; d < degree; ++d) {
    Expr v = var(coords[rng.below(coords.size())]);
    acc = acc ? *acc * v : v;
  }
  return *acc;
}

Expr random_wave(SplitMix64& rng, const std::vector<std::string>& coords) {
  Expr arg = c(rng.uniform(-3.0, 3.0));
  for (const auto& x : coords) arg = arg + c(rng.uniform(-3.0, 3.0)) * var(x);
  return fn(rng.below(2) ? expr::Function::kSin : expr::Function::kCos, arg);
}

}  // namespace

ChartSpec fuzz_metric(int dim, std::uint64_t seed, double amplitude) {
  if (dim < 3 || dim > 5) throw ConfigError("fuzz_metric: dim must be 3, 4 or 5");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw ConfigError("fuzz_metric: amplitude must lie in [0, 1)");
  }
  SplitMix64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(dim)));
  ChartSpec spec;
  spec.dim = dim;
  for (int i = 0; i < dim; ++i) {
    spec.coords.push_back("x" + std::to_string(i + 1));
    spec.domain.push_back({0.0, 1.0});
  }
  spec.metric.assign(dim, std::vector<Expr>(dim, c(0)));
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      std::vector<Term> terms;
      terms.push_back({rng.uniform(-1.0, 1.0), c(1)});
      for (int t = 0; t < 3; ++t) {
        terms.push_back({rng.uniform(-1.0, 1.0), random_monomial(rng, spec.coords)});
      }
      terms.push_back({rng.uniform(-1.0, 1.0), random_wave(rng, spec.coords)});
      Expr s = c(amplitude) * normalized_sum(std::move(terms));
      spec.metric[i][j] = i == j ? c(1) + s : s;
      spec.metric[j][i] = spec.metric[i][j];
    }
  }
  std::vector<Term> poly;
  for (int t = 0; t < 3; ++t) {
    poly.push_back({rng.uniform(-1.0, 1.0), random_monomial(rng, spec.coords)});
  }
  spec.f = c(2) + c(0.5) * random_wave(rng, spec.coords) + c(0.3) * normalized_sum(poly);
  spec.name = "fuzz(dim=" + std::to_string(dim) + ", seed=" + std::to_string(seed) + ")";
  return spec;
}

}  // namespace etlab::chart
