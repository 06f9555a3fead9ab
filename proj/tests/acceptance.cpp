// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "etlab/harness.hpp"
#include "etlab/warped.hpp"

using namespace etlab;
using harness::IdentityAggregate;
using harness::Report;
using harness::SuiteConfig;
using harness::Target;
using harness::TargetReport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

const IdentityAggregate* find_id(const TargetReport& t, const std::string& id) {
  for (const auto& a : t.identities)
    if (a.id == id) return &a;
  return nullptr;
}

// Evaluated at every point and within `rtol`.
bool within(const TargetReport& t, const std::string& id, double rtol, Outcome& o) {
  const auto* a = find_id(t, id);
  if (!a) {
    o.require(false, t.name + ": " + id + " missing");
    return false;
  }
  if (a->skip_reason) {
    o.require(false, t.name + ": " + id + " skipped (" + *a->skip_reason + ")");
    return false;
  }
  const bool ok = a->points == t.points_accepted && a->points > 0 && a->errors.empty() &&
                  a->max_rel <= rtol;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: %s max_rel %.3e > %.1e", t.name.c_str(), id.c_str(),
                a->max_rel, rtol);
  o.require(ok, buf);
  return ok;
}

Target catalog(const std::string& name, chart::Params p = {}) {
  Target t;
  t.kind = Target::Kind::kCatalog;
  t.name = name;
  t.params = std::move(p);
  return t;
}

Target warped_target(const std::string& phi, int n, int steps, double t0 = 0.5, double t1 = 1.5,
                     double f0 = 1.0, double df0 = 0.0) {
  Target t;
  t.kind = Target::Kind::kWarped;
  t.warped = {phi, n, t0, t1, f0, df0, steps, 41};
  return t;
}

std::vector<Target> six_models() {
  return {catalog("euclid_ball"),     catalog("sphere_cap"), catalog("hemisphere"),
          catalog("hyperbolic_ball"), catalog("cylinder3"),  catalog("schwarzschild")};
}

double scalar_max_dev(const TargetReport& t, const std::string& key, double expected) {
  const auto it = t.scalars.find(key);
  if (it == t.scalars.end()) return INFINITY;
  return std::max(std::abs(it->second.min - expected), std::abs(it->second.max - expected));
}

Outcome fuzz_gate() {
  Outcome o;
  SuiteConfig cfg;
  cfg.identities = {"U1", "U3", "U4", "U5", "U6", "U7", "U8", "U9"};
  for (const char* id : {"U1", "U3", "U4", "U7", "U8"}) cfg.tol.identity_rtol[id] = 1e-8;
  for (const char* id : {"U5", "U6", "U9"}) cfg.tol.identity_rtol[id] = 1e-7;
  for (int dim = 3; dim <= 5; ++dim) {
    Target t;
    t.kind = Target::Kind::kFuzz;
    t.fuzz.dim = dim;
    t.fuzz.count = 50;
    t.fuzz.points_per_metric = 20;
    t.fuzz.seed = 2024;
    cfg.targets.push_back(t);
  }
  const auto t0 = Clock::now();
  const Report r = harness::run_suite(cfg);
  const double elapsed = seconds_since(t0);
  for (const auto& t : r.targets) {
    o.require(t.points_accepted == 1000, t.name + ": " + std::to_string(t.points_accepted) +
                                             " of 1000 points accepted");
    for (const auto& a : t.identities) {
      if (a.id == "U4" && t.dim == 3) {
        o.require(a.skip_reason == std::optional<std::string>("dim_constraint n>=4"),
                  "U4 not skipped on n=3");
        continue;
      }
      within(t, a.id, a.rtol, o);
    }
  }
  o.require(elapsed <= 90.0, "runtime " + std::to_string(elapsed) + " s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "3000 points in %.1f s", elapsed);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome catalog_gate() {
  Outcome o;
  SuiteConfig cfg;
  cfg.targets = six_models();
  cfg.targets.push_back(catalog("sphere_cap", {{"r0", M_PI / 2}}));
  cfg.targets.push_back(catalog("sphere_cap", {{"r0", 2 * M_PI / 3}}));
  cfg.identities = {"C1", "C2", "C3", "C4", "C5", "C6", "C7"};
  cfg.sampling = chart::SampleStrategy::grid(3);
  const Report r = harness::run_suite(cfg);
  for (const auto& t : r.targets) {
    o.require(t.points_accepted >= 27, t.name + ": too few points");
    within(t, "C1", 1e-9, o);
    for (const char* id : {"C2", "C3", "C4", "C5", "C6", "C7"}) within(t, id, 1e-8, o);
  }
  const auto& euclid = r.targets[0];
  o.require(scalar_max_dev(euclid, "lambda", 2 * 1.0 * 2) <= 1e-9, "euclid_ball lambda");
  const auto& hemi = r.targets[2];
  o.require(scalar_max_dev(hemi, "big_lambda", 0.5) <= 1e-10, "hemisphere big_lambda value");
  o.require(hemi.scalars.at("big_lambda").spread() <= 1e-10, "hemisphere big_lambda spread");
  const auto& cyl = r.targets[4];
  o.require(scalar_max_dev(cyl, "R", 6.0) <= 1e-10, "cylinder3 R");
  o.require(scalar_max_dev(cyl, "lambda", 0.0) <= 1e-10, "cylinder3 lambda");
  // Caps r0 = pi/3, pi/2, 2pi/3 realise the three λ signs.
  const TargetReport* caps[3] = {&r.targets[1], &r.targets[6], &r.targets[7]};
  const double r0s[3] = {M_PI / 3, M_PI / 2, 2 * M_PI / 3};
  const int want[3] = {1, 0, -1};
  for (int k = 0; k < 3; ++k) {
    const double expected = 2 * std::cos(r0s[k]);
    o.require(scalar_max_dev(*caps[k], "lambda", expected) <= 1e-9, caps[k]->name + " lambda");
    const double mean = caps[k]->scalars.at("lambda").mean;
    const int sign = std::abs(mean) <= 1e-9 ? 0 : (mean > 0 ? 1 : -1);
    o.require(sign == want[k], caps[k]->name + " lambda sign");
  }
  for (const auto& t : r.targets) {
    for (const auto& c : t.expectations) o.require(c.pass, t.name + ": expectation " + c.name);
  }
  return o;
}

Outcome divergence_gate() {
  Outcome o;
  SuiteConfig cat;
  cat.targets = six_models();
  cat.identities = {"C8", "C9", "C10"};
  const Report rc = harness::run_suite(cat);
  for (const auto& t : rc.targets)
    for (const char* id : {"C8", "C9", "C10"}) within(t, id, 1e-7, o);
  // C10 on schwarzschild is only meaningful when R̊ic and ∇Ric are nonzero.
  const auto& schw = rc.targets[5];
  o.require(schw.scalars.at("ric_traceless_sq").min > 1e-3 &&
                schw.scalars.at("grad_ric_sq").min > 1e-3,
            "schwarzschild C10 degenerate");

  SuiteConfig w;
  w.identities = {"C8", "C9", "C10"};
  for (const char* phi : {"t + 0.1*t^3", "sin(t) + 0.05*sin(3*t)"})
    for (int n : {3, 4}) w.targets.push_back(warped_target(phi, n, 1000));
  const Report rw = harness::run_suite(w);
  for (const auto& t : rw.targets) {
    o.require(t.points_accepted == 41, t.name + ": mesh truncated");
    for (const char* id : {"C8", "C9", "C10"}) within(t, id, 1e-5, o);
  }
  return o;
}

Outcome lambda_machinery_gate() {
  Outcome o;
  SuiteConfig cat;
  cat.targets = six_models();
  cat.identities = {"C13", "C14", "C15"};
  const Report rc = harness::run_suite(cat);
  for (const auto& t : rc.targets) {
    within(t, "C13", 1e-8, o);
    const bool einstein = t.name.rfind("cylinder3", 0) != 0 && t.name.rfind("schwarzschild", 0) != 0;
    if (einstein) {
      o.require(t.big_lambda_constant == true, t.name + ": big_lambda constancy not detected");
      if (within(t, "C14", 1e-9, o)) {
        const auto* a = find_id(t, "C14");
        o.require(a->max_lhs <= 1e-9 && a->max_rhs <= 1e-9, t.name + ": C14 sides above 1e-9");
      }
    }
  }
  const auto& cyl = rc.targets[4];
  o.require(cyl.big_lambda_constant == false, "cylinder3: big_lambda wrongly constant");
  o.require(cyl.scalars.at("big_lambda").spread() >= 0.9, "cylinder3: big_lambda spread < 0.9");
  for (const char* id : {"C14", "C15"}) {
    const auto* a = find_id(cyl, id);
    o.require(a && a->skip_reason == std::optional<std::string>("lambda_not_constant"),
              std::string("cylinder3: ") + id + " not skipped");
  }

  SuiteConfig w;
  w.identities = {"C13"};
  for (const char* phi : {"t + 0.1*t^3", "sin(t) + 0.05*sin(3*t)"})
    for (int n : {3, 4}) w.targets.push_back(warped_target(phi, n, 1000));
  const Report rw = harness::run_suite(w);
  for (const auto& t : rw.targets) within(t, "C13", 1e-5, o);
  return o;
}

Outcome negative_controls() {
  Outcome o;
  SuiteConfig cfg;
  for (auto t : six_models()) {
    t.corrupt_f = true;
    cfg.targets.push_back(t);
  }
  const Report r = harness::run_suite(cfg);
  for (const auto& t : r.targets) {
    const auto* c1 = find_id(t, "C1");
    o.require(c1 && !c1->skip_reason && c1->max_rel >= 1e-3, t.name + ": C1 below 1e-3");
    for (const auto& a : t.identities) {
      if (a.id[0] == 'U') o.require(a.skip_reason || a.pass, t.name + ": " + a.id + " failed");
    }
  }
  o.require(!r.overall_pass, "corrupted run passed overall");

  SuiteConfig dbg;
  dbg.targets = {catalog("schwarzschild")};
  dbg.identities = {"C7"};
  dbg.lowering = curvature::RiemannLowering::kFourthSlot;
  const Report rd = harness::run_suite(dbg);
  const auto& t = rd.targets[0];
  const auto* c7 = find_id(t, "C7");
  o.require(c7 && c7->max_rel >= 1e-1, "fourth-slot variant: C7 below 1e-1");
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "fourth-slot C7 max_rel %.3g", c7->max_rel);
    o.detail = buf;
  }
  return o;
}

Outcome warped_convergence() {
  Outcome o;
  const double t0 = 0.2, t1 = 1.2;
  const auto red = warped::reduce(expr::parse("sin(t)"), 3, {t0, t1});
  const auto sol = warped::integrate(red, t0, t1, std::cos(t0), -std::sin(t0), 2000);
  double err = 0;
  for (std::size_t i = 0; i < sol.mesh.size(); ++i) {
    const double t = sol.mesh[i];
    err = std::max(err, std::abs(sol.f_jets[i][0] - std::cos(t)));
    err = std::max(err, std::abs(sol.h_jets[i][0] - 3 * std::cos(t)));
  }
  o.require(!sol.stats.truncated && err <= 1e-8, "hemisphere sup error " + std::to_string(err));

  SuiteConfig cfg;
  cfg.identities = {"C1"};
  cfg.targets = {warped_target("sin(t)", 3, 2000, t0, t1, std::cos(t0), -std::sin(t0)),
                 warped_target("sin(t)", 3, 1000, t0, t1, std::cos(t0), -std::sin(t0))};
  const Report r = harness::run_suite(cfg);
  const double fine = find_id(r.targets[0], "C1")->max_rel;
  const double coarse = find_id(r.targets[1], "C1")->max_rel;
  const double ratio = fine > 0 ? coarse / fine : INFINITY;
  o.require(ratio >= 8.0, "halving steps inflated C1 only " + std::to_string(ratio) + "x");
  char buf[128];
  std::snprintf(buf, sizeof buf, "sup error %.2e, C1 %.2e -> %.2e (%.1fx)", err, fine, coarse,
                ratio);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome stokes_gate() {
  Outcome o;
  const auto model = chart::catalog_model("schwarzschild");
  const auto t0 = Clock::now();
  const auto a = harness::stokes_check(model.chart, harness::FieldKind::kX2, {96});
  const auto b = harness::stokes_check(model.chart, harness::FieldKind::kX2, {192});
  const double elapsed = seconds_since(t0);
  o.require(a.rel_mismatch <= 1e-3, "grid 96 rel mismatch " + std::to_string(a.rel_mismatch));
  o.require(b.rel_mismatch * 3.0 <= a.rel_mismatch, "mismatch did not drop 3x at grid 192");
  o.require(std::abs(a.interior) > 1e-3, "interior integral vanishes");
  o.require(elapsed <= 300.0, "runtime " + std::to_string(elapsed) + " s");
  char buf[128];
  std::snprintf(buf, sizeof buf, "rel mismatch %.2e at 96, %.2e at 192 (%.1fx), %.1f s",
                a.rel_mismatch, b.rel_mismatch, a.rel_mismatch / b.rel_mismatch, elapsed);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome determinism() {
  Outcome o;
  auto run = [](int threads) {
    auto cfg = harness::default_suite();
    cfg.threads = threads;
    return harness::report_json(harness::run_suite(cfg));
  };
  const auto a = run(1);
  const auto b = run(1);
  const auto c = run(8);
  o.require(a == b, "two runs differ");
  o.require(a == c, "threads 1 and 8 differ");
  o.require(a.find("\"overall_pass\": true") != std::string::npos, "default suite fails");
  if (o.pass) o.detail = std::to_string(a.size()) + " bytes, identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 unconditional fuzz gate", fuzz_gate},
      {"2 catalog structure gate", catalog_gate},
      {"3 divergence lemma gate", divergence_gate},
      {"4 big-lambda machinery gate", lambda_machinery_gate},
      {"5 negative controls", negative_controls},
      {"6 warped generator convergence", warped_convergence},
      {"7 Stokes consistency", stokes_gate},
      {"8 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %s%s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
