// tlasso command-line front end.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
#include <tlasso/config.hpp>
#include <tlasso/csv.hpp>
#include <tlasso/errors.hpp>
#include <tlasso/experiments.hpp>
#include <tlasso/geometry.hpp>
#include <tlasso/links.hpp>
#include <tlasso/model.hpp>
#include <tlasso/sets.hpp>
#include <tlasso/solver.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace tlasso;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::numerical_failure:
    case ErrorCode::not_sub_gaussian: return kExitNumerical;
    default: return kExitConfig;
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Output goes to `path`, or stdout when the path is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) fail(ErrorCode::io, "cannot write '" + path + "'");
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---- shared option groups ---------------------------------------------------

struct McOptions {
  int trials = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  void attach(CLI::App* app) {
    app->add_option("--trials", trials, "Monte Carlo draws")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "base seed");
    app->add_option("--threads", threads, "worker threads (0 = hardware)");
  }
};

struct ConeOptionsCli {
  std::string instance;
  std::string set_x = "l1:anchor";
  std::string set_v = "l1:anchor";
  int order = kDefaultQuadratureOrder;

  void attach(CLI::App* app) {
    app->add_option("instance", instance, "instance file written by `generate`")->required();
    app->add_option("--set-x", set_x, "signal set; l1:anchor[*f] / l2:anchor[*f] size to the truth");
    app->add_option("--set-v", set_v, "corruption set");
    app->add_option("--order", order, "quadrature order for mu");
  }

  // Anchor (mu x*, v*) and the resolved sets.
  struct Resolved {
    ProblemInstance inst;
    NonlinearityParams params;
    Vector anchor_x;
    ConstraintSet sx = ConstraintSet::full_space(1);
    ConstraintSet sv = ConstraintSet::full_space(1);
  };
  Resolved resolve() const {
    Resolved r;
    r.inst = load_instance(instance);
    r.params = link_params(r.inst.link, order);
    r.anchor_x = r.params.mu * r.inst.x_star;
    r.sx = resolve_set(set_x, r.anchor_x);
    r.sv = resolve_set(set_v, r.inst.v_star);
    return r;
  }
};

ConstraintSet parse_set_arg(const std::string& spec, Eigen::Index dim, Eigen::Index dim2) {
  if (spec.starts_with("prod(")) {
    if (dim2 <= 0) fail(ErrorCode::config, "product sets need --dim2 for the second block");
    return ConstraintSet::parse_product(spec, dim, dim2);
  }
  return ConstraintSet::parse(spec, dim);
}

// ---- subcommands -------------------------------------------------------------

struct GenerateCmd {
  InstanceSpec spec;
  std::string link = "identity";
  std::string output;

  void attach(CLI::App* app) {
    spec.n = 64;
    spec.m = 256;
    spec.s = 4;
    app->add_option("--n", spec.n, "signal dimension");
    app->add_option("--m", spec.m, "measurements");
    app->add_option("--s", spec.s, "signal sparsity");
    app->add_option("--k", spec.k, "corruption sparsity");
    app->add_option("--amplitude", spec.amplitude, "corruption amplitude");
    app->add_option("--link", link, "identity | sign | clip:<tau> | tanh:<beta> | cubic | table:<path>");
    app->add_option("--seed", spec.seed, "instance seed");
    app->add_option("-o,--output", output, "instance file (default stdout)");
  }
  int run() {
    spec.link = LinkFunction::parse(link);
    const auto inst = generate_instance(spec);
    Sink sink(output);
    write_instance(sink.out(), inst);
    return 0;
  }
};

struct ParamsCmd {
  std::string link = "identity";
  int order = kDefaultQuadratureOrder;

  void attach(CLI::App* app) {
    app->add_option("link", link, "link spec")->required();
    app->add_option("--order", order, "quadrature order (>= 32)");
  }
  int run() {
    const auto f = LinkFunction::parse(link);
    const auto p = link_params(f, order);
    std::cout << "link,mu,sigma,psi_hat,order\n"
              << csv::quote(f.spec()) << ',' << num(p.mu) << ',' << num(p.sigma) << ',' << num(p.psi_hat) << ','
              << p.quadrature_order << '\n';
    return 0;
  }
};

struct SolveCmd {
  ConeOptionsCli problem;
  SolveOptions opts;
  std::optional<double> tol;
  std::optional<double> step;
  std::string trace;

  void attach(CLI::App* app) {
    problem.attach(app);
    app->add_option("--max-iters", opts.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "gradient-mapping tolerance (default 1e-8 sqrt(m))");
    app->add_option("--step", step, "fixed step instead of 1/L");
    app->add_option("--trace", trace, "write iteration,objective CSV here");
  }
  int run() {
    const auto r = problem.resolve();
    opts.grad_map_tol = tol;
    if (step) {
      opts.step_rule = StepRule::fixed;
      opts.fixed_step = *step;
    }
    opts.record_trace = !trace.empty();
    const auto result = solve_tlasso(r.inst, r.sx, r.sv, opts);
    if (!trace.empty()) {
      std::ofstream out(trace);
      if (!out) fail(ErrorCode::io, "cannot write '" + trace + "'");
      out << "iteration,objective\n";
      for (std::size_t i = 0; i < result.objective_trace.size(); ++i) out << i << ',' << num(result.objective_trace[i]) << '\n';
    }
    std::cout << "seed=" << r.inst.seed << " iterations=" << result.iterations
              << " residual=" << num(result.final_residual_norm) << " joint_error=" << num(joint_error(result, r.inst, r.params))
              << " converged=" << (result.converged ? "true" : "false")
              << (result.convex ? "" : " (non-convex set: stationary point only)") << '\n';
    return 0;
  }
};

struct WidthCmd {
  std::string set;
  Eigen::Index dim = 0;
  Eigen::Index dim2 = 0;
  bool complexity = false;
  std::vector<double> ts;
  McOptions mc;
  bool local = false;

  void attach(CLI::App* app, bool local_width) {
    local = local_width;
    app->add_option("--set", set, "set spec, e.g. l1:1, topk:3:2, prod(l1:1,l2:1)")->required();
    app->add_option("--dim", dim, "dimension (first block for products)")->required()->check(CLI::PositiveNumber);
    app->add_option("--dim2", dim2, "second block dimension for products");
    if (local) {
      app->add_option("--t", ts, "radius t; repeat for several")->required()->check(CLI::PositiveNumber);
    } else {
      app->add_flag("--complexity", complexity, "estimate gamma instead of omega");
    }
    mc.attach(app);
  }
  int run() {
    const auto s = parse_set_arg(set, dim, dim2);
    csv::write_width_header(std::cout);
    if (local) {
      for (double t : ts) {
        csv::write_width_row(std::cout, {local_gaussian_width_mc(s, t, mc.trials, mc.seed, mc.threads), s.spec(), mc.seed});
      }
    } else {
      const auto est = complexity ? gaussian_complexity_mc(s, mc.trials, mc.seed, mc.threads)
                                  : gaussian_width_mc(s, mc.trials, mc.seed, mc.threads);
      csv::write_width_row(std::cout, {est, s.spec(), mc.seed});
    }
    return 0;
  }
};

std::string product_spec(const ConstraintSet& a, const ConstraintSet& b) {
  return "prod(" + a.spec() + "," + b.spec() + ")";
}

struct ConeWidthCmd {
  ConeOptionsCli problem;
  McOptions mc;
  bool complexity = false;

  void attach(CLI::App* app) {
    problem.attach(app);
    mc.trials = 500;
    mc.attach(app);
    app->add_flag("--complexity", complexity, "gamma of the cone on the sphere instead of omega_1");
  }
  int run() {
    const auto r = problem.resolve();
    const DescentCone cone(r.sx, r.sv, r.anchor_x, r.inst.v_star);
    const auto est = complexity ? descent_cone_complexity_mc(cone, mc.trials, mc.seed, mc.threads)
                                : descent_cone_width_mc(cone, mc.trials, mc.seed, mc.threads);
    csv::write_width_header(std::cout);
    csv::write_width_row(std::cout, {est, product_spec(r.sx, r.sv), mc.seed});
    return 0;
  }
};

struct RsvCmd {
  ConeOptionsCli problem;
  McOptions mc;
  int directions = 200;

  void attach(CLI::App* app) {
    problem.attach(app);
    mc.trials = 100;
    mc.attach(app);
    app->add_option("--directions", directions, "cone directions to sample")->check(CLI::PositiveNumber);
  }
  int run() {
    const auto r = problem.resolve();
    const DescentCone cone(r.sx, r.sv, r.anchor_x, r.inst.v_star);
    const auto sample = sample_cone(cone, directions, mc.seed);
    const auto report = rsv_check(r.inst, sample, mc.trials, mc.seed + 1, mc.threads);
    csv::write_width_header(std::cout);
    csv::write_width_row(std::cout, {report.gamma, product_spec(r.sx, r.sv), mc.seed + 1});
    std::cerr << "empirical_min=" << num(report.empirical_min) << " sqrt_m=" << num(report.sqrt_m)
              << " ratio=" << num(report.empirical_min / report.sqrt_m) << " C_hat=" << num(report.implied_constant)
              << "\nnote: empirical_min is a minimum over " << sample.directions.size()
              << " sampled directions, so it can only overstate the true restricted singular value; gamma comes from"
                 " a local search per draw and can understate the supremum. The first biases C_hat down, the second up.\n";
    return 0;
  }
};

// sweep / phase / tsweep share the config plumbing.
struct HarnessCmd {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<unsigned> threads;

  void attach(CLI::App* app) {
    app->add_option("config", config_path, "key=value config file")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override a config key (key=value); repeatable");
    app->add_option("-o,--output", output, "rows CSV path (key `output`)");
    app->add_option("--seed", seed, "base seed (key `seed`)");
    app->add_option("--trials", trials, "trials per cell (key `trials`)");
    app->add_option("--threads", threads, "worker threads (key `threads`)");
  }

  SweepConfig load(std::string_view forced_kind) const {
    KeyValueConfig values = config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(config_path);
    for (const auto& o : overrides) values.set_assignment(o);
    if (output) values.set("output", *output);
    if (seed) values.set("seed", std::to_string(*seed));
    if (trials) values.set("trials", std::to_string(*trials));
    if (threads) values.set("threads", std::to_string(*threads));
    if (!forced_kind.empty()) {
      if (const auto kind = values.get("kind"); kind && *kind != forced_kind) {
        fail(ErrorCode::config, "this subcommand runs kind = " + std::string(forced_kind) + ", config says " + *kind);
      }
      values.set("kind", std::string(forced_kind));
    }
    return sweep_config_from(values);
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void finish(const SweepConfig& config, ManifestInfo info) {
  info.csv_path = config.output;
  if (!config.manifest.empty()) write_manifest(config.manifest, config, info);
}

std::string rows_path(const SweepConfig& config) {
  return config.output.empty() ? std::string() : config.output + ".rows.csv";
}

struct SweepCmd {
  HarnessCmd harness;
  void attach(CLI::App* app) { harness.attach(app); }
  int run() {
    const auto config = harness.load("");
    if (config.kind != SweepKind::error_vs_m && config.kind != SweepKind::corruption_sweep) {
      fail(ErrorCode::config, "sweep runs error_vs_m or corruption_sweep; use `phase` or `tsweep`");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto rows = run_sweep(config);
    ManifestInfo info;
    info.wall_seconds = seconds_since(start);
    if (config.kind == SweepKind::error_vs_m) {
      try {
        info.fit = scaling_fit(rows);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::fit_undefined) throw;
        std::cerr << "scaling fit skipped: " << e.what() << '\n';
      }
    }
    Sink sink(config.output);
    csv::write_sweep(sink.out(), rows);
    finish(config, info);
    if (info.fit) std::cerr << "slope=" << num(info.fit->exponent) << " r2=" << num(info.fit->r2) << '\n';
    return 0;
  }
};

struct PhaseCmd {
  HarnessCmd harness;
  void attach(CLI::App* app) { harness.attach(app); }
  int run() {
    const auto config = harness.load("phase_diagram");
    const auto start = std::chrono::steady_clock::now();
    const auto result = phase_diagram(config);
    ManifestInfo info;
    info.wall_seconds = seconds_since(start);
    Sink sink(config.output);
    csv::write_phase(sink.out(), result.cells);
    if (const auto path = rows_path(config); !path.empty()) {
      Sink rows(path);
      csv::write_sweep(rows.out(), result.rows);
    }
    finish(config, info);
    return 0;
  }
};

struct TSweepCmd {
  HarnessCmd harness;
  void attach(CLI::App* app) { harness.attach(app); }
  int run() {
    const auto config = harness.load("t_sweep");
    const auto start = std::chrono::steady_clock::now();
    const auto result = t_sweep(config);
    ManifestInfo info;
    info.wall_seconds = seconds_since(start);
    info.tsweep = result;
    Sink sink(config.output);
    csv::write_tsweep(sink.out(), result);
    if (const auto path = rows_path(config); !path.empty()) {
      Sink rows(path);
      csv::write_sweep(rows.out(), result.rows);
    }
    finish(config, info);
    std::cerr << "best_t=" << num(result.best_t) << " c_hat=" << num(result.c_hat) << '\n';
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"T-Lasso recovery from corrupted non-linear measurements", "tlasso"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);

  GenerateCmd generate;
  ParamsCmd params;
  SolveCmd solve;
  WidthCmd width, local_width;
  ConeWidthCmd cone_width;
  RsvCmd rsv;
  SweepCmd sweep;
  PhaseCmd phase;
  TSweepCmd tsweep;

  generate.attach(app.add_subcommand("generate", "synthesize a problem instance"));
  params.attach(app.add_subcommand("params", "mu, sigma and psi for a link"));
  solve.attach(app.add_subcommand("solve", "solve one instance"));
  width.attach(app.add_subcommand("width", "Gaussian width or complexity of a set"), false);
  local_width.attach(app.add_subcommand("local-width", "local Gaussian width of a set"), true);
  cone_width.attach(app.add_subcommand("cone-width", "Gaussian width of the descent cone at the truth"));
  rsv.attach(app.add_subcommand("rsv-check", "empirical restricted singular value on a cone sample"));
  sweep.attach(app.add_subcommand("sweep", "error vs m, or corruption sweep"));
  phase.attach(app.add_subcommand("phase", "success-rate phase diagram"));
  tsweep.attach(app.add_subcommand("tsweep", "local-width t sweep"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "generate") return generate.run();
    if (name == "params") return params.run();
    if (name == "solve") return solve.run();
    if (name == "width") return width.run();
    if (name == "local-width") return local_width.run();
    if (name == "cone-width") return cone_width.run();
    if (name == "rsv-check") return rsv.run();
    if (name == "sweep") return sweep.run();
    if (name == "phase") return phase.run();
    if (name == "tsweep") return tsweep.run();
  } catch (const Error& e) {
    std::cerr << "tlasso: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "tlasso: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
