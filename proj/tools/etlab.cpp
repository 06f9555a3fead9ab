#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "etlab/harness.hpp"
#include "etlab/warped.hpp"

using namespace etlab;

namespace {

struct Common {
  int grid = 0;
  int random = 0;
  std::uint64_t seed = 0;
  double rtol = 0;
  std::string json_path;
  std::vector<std::string> expect;
  std::vector<std::string> identities;
  bool corrupt_f = false;
};

struct Global {
  int threads = 0;
  bool timing = false;
  std::string variant = "standard";
  bool quiet = false;
};

std::pair<std::string, std::string> split_kv(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(std::string(what) + " '" + s + "' must have the form key=value");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// Values accept constant expressions such as pi/3.
double parse_value(const std::string& s) {
  return expr::evaluate(expr::parse(s), expr::Env<double>{});
}

std::vector<std::string> split_list(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& item : in) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(tok);
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_common(harness::SuiteConfig& cfg, const Common& c) {
  if (c.grid > 0 && c.random > 0) throw ConfigError("--grid and --random are exclusive");
  if (c.random > 0) {
    cfg.sampling = chart::SampleStrategy::random(c.random, c.seed);
  } else if (c.grid > 0) {
    cfg.sampling = chart::SampleStrategy::grid(c.grid);
  }
  if (c.rtol != 0) cfg.tol.rtol = c.rtol;
  cfg.identities = split_list(c.identities);
  for (auto& t : cfg.targets) {
    t.corrupt_f = c.corrupt_f;
    for (const auto& e : c.expect) {
      auto [k, v] = split_kv(e, "--expect");
      if (k != "lambda" && k != "R") throw ConfigError("--expect supports lambda and R");
      t.expect[k] = parse_value(v);
    }
  }
}

void apply_global(harness::SuiteConfig& cfg, const Global& g) {
  cfg.threads = g.threads;
  cfg.timing = g.timing;
  if (g.variant == "standard") {
    cfg.lowering = curvature::RiemannLowering::kStandard;
  } else if (g.variant == "fourth_slot") {
    cfg.lowering = curvature::RiemannLowering::kFourthSlot;
  } else {
    throw ConfigError("--riemann-variant must be standard or fourth_slot");
  }
}

std::string status(const harness::IdentityAggregate& a) {
  if (a.skip_reason) return "SKIP (" + *a.skip_reason + ")";
  return a.pass ? "PASS" : "FAIL";
}

void print_summary(const harness::Report& r) {
  for (const auto& t : r.targets) {
    std::printf("%s  [%s, n=%d, %d points%s]  %s\n", t.name.c_str(), t.kind.c_str(), t.dim,
                t.points_accepted,
                t.rejected.empty() ? "" : (", " + std::to_string(t.rejected.size()) + " rejected").c_str(),
                t.pass ? "PASS" : "FAIL");
    if (t.error) std::printf("  error: %s\n", t.error->c_str());
    for (const auto& a : t.identities) {
      if (a.skip_reason) {
        std::printf("  %-4s %s\n", a.id.c_str(), status(a).c_str());
      } else {
        std::printf("  %-4s max_rel %-10.3e rtol %-8.1e %s\n", a.id.c_str(), a.max_rel, a.rtol,
                    status(a).c_str());
        for (const auto& e : a.errors) std::printf("       %s\n", e.c_str());
      }
    }
    for (const auto& c : t.expectations) {
      std::printf("  expect %-20s observed %-22.15g %s%s%s\n", c.name.c_str(), c.observed,
                  c.pass ? "PASS" : "FAIL", c.detail.empty() ? "" : "  ",
                  c.detail.c_str());
    }
  }
  if (r.wall_time_s) std::printf("wall time %.3f s\n", *r.wall_time_s);
  std::printf("overall: %s\n", r.overall_pass ? "PASS" : "FAIL");
}

int finish(const harness::SuiteConfig& cfg, const std::string& json_path, bool quiet) {
  const auto report = harness::run_suite(cfg);
  const auto text = harness::report_json(report);
  if (json_path == "-") {
    std::cout << text;
  } else {
    if (!quiet) print_summary(report);
    if (!json_path.empty()) harness::emit_report(text, json_path);
  }
  return harness::exit_code(report);
}

void add_common(CLI::App* cmd, Common& c, bool expectations) {
  cmd->add_option("--grid", c.grid, "Grid points per axis")->check(CLI::PositiveNumber);
  cmd->add_option("--random", c.random, "Random points per target")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Sampling seed");
  cmd->add_option("--rtol", c.rtol, "Relative tolerance for every identity")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--json", c.json_path, "Write the JSON report here ('-' for stdout)");
  cmd->add_option("--identities", c.identities, "Comma separated identity ids");
  if (expectations) {
    cmd->add_option("--expect", c.expect, "Expected value, lambda=V or R=V");
    cmd->add_flag("--corrupt-f", c.corrupt_f, "Multiply f by (1 + 0.01 x1)");
  }
}

void print_warped(const warped::WarpedSolution& s) {
  std::printf("# steps %d, step %.6g, coefficient evaluations %d%s\n", s.stats.steps_taken,
              s.step, s.stats.coefficient_evaluations,
              s.stats.truncated ? ", truncated where f vanished" : "");
  std::printf("%-22s %-24s %-24s %-24s\n", "t", "f", "f'", "h");
  for (std::size_t i = 0; i < s.mesh.size(); ++i) {
    std::printf("%-22.15g %-24.17g %-24.17g %-24.17g\n", s.mesh[i], s.f_jets[i][0],
                s.f_jets[i][1], s.h_jets[i][0]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature identity laboratory"};
  app.require_subcommand(1);
  Global global;
  app.add_option("--threads", global.threads, "Worker threads (default ETLAB_THREADS or cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--timing", global.timing, "Include wall time in reports");
  app.add_flag("--quiet", global.quiet, "Suppress the text summary");
  app.add_option("--riemann-variant", global.variant)->group("");

  auto* catalog = app.add_subcommand("catalog", "Catalog models");
  catalog->require_subcommand(1);
  catalog->add_subcommand("list", "List catalog models");

  auto* verify = app.add_subcommand("verify", "Verify identities on a model or chart");
  verify->require_subcommand(1);
  Common vm;
  std::string model_name;
  std::vector<std::string> params;
  auto* verify_model = verify->add_subcommand("model", "Catalog model, or 'all'");
  verify_model->add_option("name", model_name, "Model name")->required();
  verify_model->add_option("--param", params, "Model parameter k=v");
  add_common(verify_model, vm, true);

  Common vc;
  std::string chart_path;
  auto* verify_chart = verify->add_subcommand("chart", "Chart JSON document");
  verify_chart->add_option("file", chart_path, "Chart file")->required();
  add_common(verify_chart, vc, true);

  Common fz;
  harness::FuzzTarget fuzz_target;
  auto* fuzz = app.add_subcommand("fuzz", "Unconditional identities on random metrics");
  fuzz->add_option("--dim", fuzz_target.dim, "Dimension")->required()->check(CLI::Range(3, 6));
  fuzz->add_option("--count", fuzz_target.count, "Number of metrics")
      ->required()
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", fuzz_target.seed, "Seed")->required();
  fuzz->add_option("--amplitude", fuzz_target.amplitude, "Perturbation amplitude")
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--points", fuzz_target.points_per_metric, "Points per metric")
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--rtol", fz.rtol, "Relative tolerance for every identity")
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--identities", fz.identities, "Comma separated identity ids");
  fuzz->add_option("--json", fz.json_path, "Write the JSON report here ('-' for stdout)");

  Common wc;
  harness::WarpedTarget wt;
  bool warped_verify = false;
  auto* warp = app.add_subcommand("warped", "Integrate the warped-product reduction");
  warp->add_option("--phi", wt.phi, "Warping function of t")->required();
  warp->add_option("--n", wt.n, "Dimension")->required()->check(CLI::Range(3, 6));
  warp->add_option("--t0", wt.t0, "Start of the t interval")->required();
  warp->add_option("--t1", wt.t1, "End of the t interval")->required();
  warp->add_option("--f0", wt.f0, "f(t0)")->required();
  warp->add_option("--df0", wt.df0, "f'(t0)")->required();
  warp->add_option("--steps", wt.steps, "RK4 steps")->required();
  warp->add_option("--samples", wt.samples, "Mesh nodes kept for verification");
  warp->add_flag("--verify", warped_verify, "Evaluate identities at the mesh nodes");
  warp->add_option("--identities", wc.identities, "Comma separated identity ids");
  warp->add_option("--rtol", wc.rtol, "Relative tolerance for every identity")
      ->check(CLI::PositiveNumber);
  warp->add_option("--json", wc.json_path, "Write the JSON report here ('-' for stdout)");

  std::string stokes_model, stokes_field, stokes_json;
  std::vector<std::string> stokes_params;
  harness::StokesOptions stokes_opt;
  auto* stokes = app.add_subcommand("stokes", "Divergence theorem check on a catalog model");
  stokes->add_option("--model", stokes_model, "Catalog model")->required();
  stokes->add_option("--param", stokes_params, "Model parameter k=v");
  stokes->add_option("--field", stokes_field, "X1, X2, fgradR or fgradLambda")->required();
  stokes->add_option("--grid", stokes_opt.grid, "Quadrature nodes per axis")
      ->check(CLI::Range(2, 4096));
  stokes->add_option("--json", stokes_json, "Write the JSON result here ('-' for stdout)");

  std::string suite_json;
  auto* suite = app.add_subcommand("suite", "Run the default suite");
  suite->add_option("--json", suite_json, "Write the JSON report here ('-' for stdout)");

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

  try {
    auto parse_params = [](const std::vector<std::string>& in) {
      chart::Params p;
      for (const auto& s : in) {
        auto [k, v] = split_kv(s, "--param");
        p[k] = parse_value(v);
      }
      return p;
    };

    if (catalog->parsed()) {
      for (const auto& m : chart::catalog_list()) {
        std::printf("%-16s %-14s %s\n", m.name.c_str(), m.params.c_str(), m.description.c_str());
      }
      return 0;
    }

    if (verify_model->parsed()) {
      harness::SuiteConfig cfg;
      if (model_name == "all") {
        if (!params.empty()) throw ConfigError("--param needs a single model");
        cfg.targets = harness::catalog_targets();
      } else {
        harness::Target t;
        t.kind = harness::Target::Kind::kCatalog;
        t.name = model_name;
        t.params = parse_params(params);
        cfg.targets.push_back(std::move(t));
      }
      apply_common(cfg, vm);
      apply_global(cfg, global);
      return finish(cfg, vm.json_path, global.quiet);
    }

    if (verify_chart->parsed()) {
      harness::SuiteConfig cfg;
      harness::Target t;
      t.kind = harness::Target::Kind::kChart;
      t.name = chart_path;
      t.chart = chart::load_chart(read_file(chart_path));
      cfg.targets.push_back(std::move(t));
      apply_common(cfg, vc);
      apply_global(cfg, global);
      return finish(cfg, vc.json_path, global.quiet);
    }

    if (fuzz->parsed()) {
      harness::SuiteConfig cfg;
      harness::Target t;
      t.kind = harness::Target::Kind::kFuzz;
      t.fuzz = fuzz_target;
      cfg.targets.push_back(std::move(t));
      apply_common(cfg, fz);
      apply_global(cfg, global);
      return finish(cfg, fz.json_path, global.quiet);
    }

    if (warp->parsed()) {
      if (!warped_verify) {
        const auto red = warped::reduce(expr::parse(wt.phi), wt.n, {wt.t0, wt.t1});
        const auto sol = warped::integrate(red, wt.t0, wt.t1, wt.f0, wt.df0, wt.steps, wt.samples);
        if (!global.quiet) print_warped(sol);
        return 0;
      }
      harness::SuiteConfig cfg;
      harness::Target t;
      t.kind = harness::Target::Kind::kWarped;
      t.warped = wt;
      cfg.targets.push_back(std::move(t));
      apply_common(cfg, wc);
      apply_global(cfg, global);
      return finish(cfg, wc.json_path, global.quiet);
    }

    if (stokes->parsed()) {
      const auto model = chart::catalog_model(stokes_model, parse_params(stokes_params));
      stokes_opt.threads = global.threads;
      const auto result =
          harness::stokes_check(model.chart, harness::parse_field(stokes_field), stokes_opt);
      const auto text = harness::report_json(result);
      if (stokes_json == "-") {
        std::cout << text;
      } else {
        if (!global.quiet) {
          std::printf("%s  field %s  grid %d\n", result.model.c_str(), result.field.c_str(),
                      result.grid);
          std::printf("  interior %.17g\n  flux     %.17g\n", result.interior, result.flux);
          std::printf("  mismatch abs %.3e rel %.3e  %s\n", result.abs_mismatch,
                      result.rel_mismatch, result.pass ? "PASS" : "FAIL");
        }
        if (!stokes_json.empty()) harness::emit_report(text, stokes_json);
      }
      return result.pass ? 0 : 1;
    }

    if (suite->parsed()) {
      auto cfg = harness::default_suite();
      apply_global(cfg, global);
      return finish(cfg, suite_json, global.quiet);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "etlab: %s\n", e.what());
    return 2;
  }
  return 2;
}
