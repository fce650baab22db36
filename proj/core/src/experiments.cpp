#include "tlasso/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "tlasso/errors.hpp"
#include "tlasso/parallel.hpp"
#include "tlasso/rng.hpp"
#include "text.hpp"

namespace tlasso {
namespace {

constexpr std::uint64_t kTSweepGeometryStream = 0x74737765ULL;

template <typename Int>
std::vector<Int> parse_int_list(std::string_view text, std::string_view key) {
  std::vector<Int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!text::trim(item).empty()) out.push_back(text::parse_int<Int>(item, ErrorCode::config, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!text::trim(item).empty()) out.push_back(text::parse_double(item, ErrorCode::config, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = text::trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorCode::config, "cannot parse boolean " + std::string(key) + " from '" + std::string(text) + "'");
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += text::format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

// Library errors raised while interpreting a config are config errors.
template <typename F>
auto as_config_error(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    fail(ErrorCode::config, e.what());
  }
}

struct Cell {
  Eigen::Index m, s, k;
};

std::vector<Cell> cells_of(const SweepConfig& config) {
  std::vector<Eigen::Index> s_values{config.s};
  std::vector<Eigen::Index> k_values{config.k};
  if (config.kind == SweepKind::phase_diagram) {
    if (config.phase_axis == "s") s_values = config.s_grid;
    else k_values = config.k_grid;
  }
  if (config.kind == SweepKind::corruption_sweep) k_values = config.k_grid;
  std::vector<Cell> cells;
  for (auto m : config.m_grid)
    for (auto s : s_values)
      for (auto k : k_values) cells.push_back({m, s, k});
  return cells;
}

InstanceSpec spec_for(const SweepConfig& config, const Cell& cell, int trial) {
  InstanceSpec spec;
  spec.n = config.n;
  spec.m = cell.m;
  spec.s = cell.s;
  spec.k = cell.k;
  spec.amplitude = config.amplitude;
  spec.link = config.link;
  spec.seed = trial_seed(config.seed, cell.m, cell.s, cell.k, trial);
  return spec;
}

struct ResolvedSets {
  ConstraintSet x;
  ConstraintSet v;
};

ResolvedSets resolve_sets(const SweepConfig& config, const Vector& anchor_x, const Vector& anchor_v) {
  return as_config_error([&] {
    return ResolvedSets{resolve_set(config.set_x, anchor_x), resolve_set(config.set_v, anchor_v)};
  });
}

bool strictly_interior(const ConstraintSet& set, const Vector& anchor) {
  switch (set.kind()) {
    case SetKind::full_space: return true;
    case SetKind::l1_ball: return anchor.lpNorm<1>() < set.radius();
    case SetKind::l2_ball: return anchor.norm() < set.radius();
    default: return false;
  }
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::error_vs_m: return "error_vs_m";
    case SweepKind::phase_diagram: return "phase_diagram";
    case SweepKind::t_sweep: return "t_sweep";
    case SweepKind::corruption_sweep: return "corruption_sweep";
  }
  return "error_vs_m";
}

SweepKind parse_sweep_kind(std::string_view text) {
  text = text::trim(text);
  if (text == "error_vs_m") return SweepKind::error_vs_m;
  if (text == "phase_diagram" || text == "phase") return SweepKind::phase_diagram;
  if (text == "t_sweep" || text == "tsweep") return SweepKind::t_sweep;
  if (text == "corruption_sweep") return SweepKind::corruption_sweep;
  fail(ErrorCode::config, "unknown sweep kind '" + std::string(text) + "'");
}

void SweepConfig::validate() const {
  if (m_grid.empty()) fail(ErrorCode::config, "m_grid must not be empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 1) fail(ErrorCode::config, "m values must be >= 1");
    if (i > 0 && m_grid[i] <= m_grid[i - 1]) fail(ErrorCode::config, "m_grid must be strictly increasing");
  }
  if (n < 1) fail(ErrorCode::config, "n must be >= 1");
  if (trials < 1) fail(ErrorCode::config, "trials must be >= 1");
  if (!(amplitude >= 0.0)) fail(ErrorCode::config, "amplitude must be >= 0");
  if (quadrature_order < 32) fail(ErrorCode::config, "quadrature_order must be >= 32");
  if (solve.max_iters < 1) fail(ErrorCode::config, "max_iters must be >= 1");
  if (solve.grad_map_tol && !(*solve.grad_map_tol > 0.0)) fail(ErrorCode::config, "grad_map_tol must be > 0");
  if (kind == SweepKind::phase_diagram) {
    if (phase_axis != "s" && phase_axis != "k") fail(ErrorCode::config, "phase_axis must be 's' or 'k'");
    if ((phase_axis == "s" ? s_grid : k_grid).empty()) {
      fail(ErrorCode::config, "phase diagrams need an s_grid (or k_grid with phase_axis = k)");
    }
    if (!(success_fraction > 0.0)) fail(ErrorCode::config, "success_fraction must be > 0");
  }
  if (kind == SweepKind::corruption_sweep && k_grid.empty()) fail(ErrorCode::config, "corruption sweeps need a k_grid");
  if (kind == SweepKind::t_sweep) {
    if (m_grid.size() != 1) fail(ErrorCode::config, "t sweeps run at a single m");
    if (t_grid.empty()) fail(ErrorCode::config, "t sweeps need a t_grid");
    for (double t : t_grid) {
      if (!(t > 0.0)) fail(ErrorCode::config, "t values must be > 0");
    }
    if (geometry_trials < 1) fail(ErrorCode::config, "geometry_trials must be >= 1");
  }
}

SweepConfig sweep_config_from(const KeyValueConfig& values) {
  SweepConfig c;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"kind", [&](const std::string& v) { c.kind = parse_sweep_kind(v); }},
      {"m_grid", [&](const std::string& v) { c.m_grid = parse_int_list<Eigen::Index>(v, "m_grid"); }},
      {"n", [&](const std::string& v) { c.n = text::parse_int<Eigen::Index>(v, ErrorCode::config, "n"); }},
      {"s", [&](const std::string& v) { c.s = text::parse_int<Eigen::Index>(v, ErrorCode::config, "s"); }},
      {"k", [&](const std::string& v) { c.k = text::parse_int<Eigen::Index>(v, ErrorCode::config, "k"); }},
      {"s_grid", [&](const std::string& v) { c.s_grid = parse_int_list<Eigen::Index>(v, "s_grid"); }},
      {"k_grid", [&](const std::string& v) { c.k_grid = parse_int_list<Eigen::Index>(v, "k_grid"); }},
      {"phase_axis", [&](const std::string& v) { c.phase_axis = std::string(text::trim(v)); }},
      {"amplitude", [&](const std::string& v) { c.amplitude = text::parse_double(v, ErrorCode::config, "amplitude"); }},
      {"link", [&](const std::string& v) { c.link = as_config_error([&] { return LinkFunction::parse(v); }); }},
      {"set_x", [&](const std::string& v) { c.set_x = v; }},
      {"set_v", [&](const std::string& v) { c.set_v = v; }},
      {"trials", [&](const std::string& v) { c.trials = text::parse_int<int>(v, ErrorCode::config, "trials"); }},
      {"seed", [&](const std::string& v) { c.seed = text::parse_int<std::uint64_t>(v, ErrorCode::config, "seed"); }},
      {"output", [&](const std::string& v) { c.output = v; }},
      {"manifest", [&](const std::string& v) { c.manifest = v; }},
      {"threads", [&](const std::string& v) { c.threads = text::parse_int<unsigned>(v, ErrorCode::config, "threads"); }},
      {"quadrature_order",
       [&](const std::string& v) { c.quadrature_order = text::parse_int<int>(v, ErrorCode::config, "quadrature_order"); }},
      {"max_iters", [&](const std::string& v) { c.solve.max_iters = text::parse_int<int>(v, ErrorCode::config, "max_iters"); }},
      {"grad_map_tol",
       [&](const std::string& v) { c.solve.grad_map_tol = text::parse_double(v, ErrorCode::config, "grad_map_tol"); }},
      {"power_iters",
       [&](const std::string& v) { c.solve.power_iters = text::parse_int<int>(v, ErrorCode::config, "power_iters"); }},
      {"success_fraction",
       [&](const std::string& v) { c.success_fraction = text::parse_double(v, ErrorCode::config, "success_fraction"); }},
      {"t_grid", [&](const std::string& v) { c.t_grid = parse_double_list(v, "t_grid"); }},
      {"geometry_trials",
       [&](const std::string& v) { c.geometry_trials = text::parse_int<int>(v, ErrorCode::config, "geometry_trials"); }},
      {"deviation_s", [&](const std::string& v) { c.deviation_s = text::parse_double(v, ErrorCode::config, "deviation_s"); }},
      {"record_timing", [&](const std::string& v) { c.record_timing = parse_bool(v, "record_timing"); }},
  };
  for (const auto& key : values.keys()) {
    auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorCode::config, "unknown config key '" + key + "'");
    it->second(*values.get(key));
  }
  c.solve.record_trace = false;
  if (c.manifest.empty() && !c.output.empty()) c.manifest = c.output + ".manifest.json";
  c.validate();
  return c;
}

std::vector<std::pair<std::string, std::string>> describe(const SweepConfig& c) {
  std::vector<std::pair<std::string, std::string>> out = {
      {"kind", std::string(to_string(c.kind))},
      {"m_grid", join(c.m_grid)},
      {"n", std::to_string(c.n)},
      {"s", std::to_string(c.s)},
      {"k", std::to_string(c.k)},
      {"amplitude", text::format_double(c.amplitude)},
      {"link", c.link.spec()},
      {"set_x", c.set_x},
      {"set_v", c.set_v},
      {"trials", std::to_string(c.trials)},
      {"seed", std::to_string(c.seed)},
      {"quadrature_order", std::to_string(c.quadrature_order)},
      {"max_iters", std::to_string(c.solve.max_iters)},
      {"grad_map_tol", c.solve.grad_map_tol ? text::format_double(*c.solve.grad_map_tol) : "1e-8*sqrt(m)"},
      {"power_iters", std::to_string(c.solve.power_iters)},
  };
  if (c.kind == SweepKind::phase_diagram) {
    out.emplace_back("phase_axis", c.phase_axis);
    out.emplace_back("s_grid", join(c.s_grid));
    out.emplace_back("k_grid", join(c.k_grid));
    out.emplace_back("success_fraction", text::format_double(c.success_fraction));
  }
  if (c.kind == SweepKind::corruption_sweep) out.emplace_back("k_grid", join(c.k_grid));
  if (c.kind == SweepKind::t_sweep) {
    out.emplace_back("t_grid", join(c.t_grid));
    out.emplace_back("geometry_trials", std::to_string(c.geometry_trials));
    out.emplace_back("deviation_s", text::format_double(c.deviation_s));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t base, Eigen::Index m, Eigen::Index s, Eigen::Index k, int trial) {
  return derive_seed(base, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s),
                            static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial)});
}

ConstraintSet resolve_set(std::string_view spec, const Vector& anchor) {
  spec = text::trim(spec);
  const auto colon = spec.find(':');
  if (colon != std::string_view::npos) {
    const std::string_view head = spec.substr(0, colon);
    std::string_view arg = spec.substr(colon + 1);
    if ((head == "l1" || head == "l2") && arg.starts_with("anchor")) {
      double factor = 1.0;
      arg.remove_prefix(6);
      if (!arg.empty()) {
        if (arg.front() != '*') fail(ErrorCode::config, "expected anchor*<factor> in '" + std::string(spec) + "'");
        factor = text::parse_double(arg.substr(1), ErrorCode::config, "anchor factor");
        if (!(factor > 0.0)) fail(ErrorCode::config, "anchor factor must be > 0");
      }
      const double norm = head == "l1" ? anchor.lpNorm<1>() : anchor.norm();
      if (norm == 0.0) return ConstraintSet::singleton(Vector::Zero(anchor.size()));
      return head == "l1" ? ConstraintSet::l1_ball(anchor.size(), factor * norm)
                          : ConstraintSet::l2_ball(anchor.size(), factor * norm);
    }
  }
  return ConstraintSet::parse(spec, anchor.size());
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const NonlinearityParams params = as_config_error([&] { return link_params(config.link, config.quadrature_order); });
  const auto cells = cells_of(config);
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  const std::size_t total = cells.size() * trials;

  // Every anchor must lie in T before any solve starts.
  for (std::size_t idx = 0; idx < total; ++idx) {
    const Cell& cell = cells[idx / trials];
    const int trial = static_cast<int>(idx % trials);
    const GroundTruth truth = as_config_error([&] { return generate_truth(spec_for(config, cell, trial)); });
    const Vector anchor_x = params.mu * truth.x_star;
    const ResolvedSets sets = resolve_sets(config, anchor_x, truth.v_star);
    if (!contains(sets.x, anchor_x, 1e-9) || !contains(sets.v, truth.v_star, 1e-9)) {
      fail(ErrorCode::config, "anchor (mu x*, v*) lies outside T for m=" + std::to_string(cell.m) +
                                  " trial " + std::to_string(trial) + "; enlarge the set radii");
    }
    if (config.kind == SweepKind::t_sweep &&
        !(strictly_interior(sets.x, anchor_x) && strictly_interior(sets.v, truth.v_star))) {
      fail(ErrorCode::config, "t sweeps need set radii strictly larger than the anchor norms");
    }
  }

  std::vector<SweepRow> rows(total);
  parallel_for(total, config.threads, [&](std::size_t idx) {
    const Cell& cell = cells[idx / trials];
    const int trial = static_cast<int>(idx % trials);
    const auto start = std::chrono::steady_clock::now();

    const InstanceSpec spec = spec_for(config, cell, trial);
    const ProblemInstance inst = generate_instance(spec);
    const ResolvedSets sets = resolve_sets(config, Vector(params.mu * inst.x_star), inst.v_star);
    const SolveResult result = solve_tlasso(inst, sets.x, sets.v, config.solve);

    SweepRow& row = rows[idx];
    row.kind = config.kind;
    row.m = cell.m;
    row.n = config.n;
    row.s = cell.s;
    row.k = cell.k;
    row.trial = trial;
    row.seed = spec.seed;
    row.mu = params.mu;
    row.sigma = params.sigma;
    row.psi_hat = params.psi_hat;
    row.signal_error = signal_error(result, inst, params);
    row.corruption_error = corruption_error(result, inst);
    row.joint_error = std::hypot(row.signal_error, row.corruption_error);
    row.iterations = result.iterations;
    row.converged = result.converged;
    row.trivial_error = std::hypot(params.mu, inst.v_star.norm());
    if (config.record_timing) {
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  });
  return rows;
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::invalid_input, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

ScalingFit scaling_fit(std::span<const SweepRow> rows) {
  std::map<Eigen::Index, std::vector<double>> by_m;
  for (const auto& row : rows) by_m[row.m].push_back(row.joint_error);
  if (by_m.size() < 3) fail(ErrorCode::fit_undefined, "scaling fit needs at least 3 distinct m values");

  ScalingFit fit;
  for (auto& [m, errors] : by_m) {
    const double med = median(errors);
    if (!(med > 0.0)) {
      fail(ErrorCode::fit_undefined, "median joint error is zero at m=" + std::to_string(m) + " (exact recovery)");
    }
    fit.m_values.push_back(static_cast<double>(m));
    fit.medians.push_back(med);
  }
  const std::size_t count = fit.m_values.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    mean_x += std::log(fit.m_values[i]);
    mean_y += std::log(fit.medians[i]);
  }
  mean_x /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = std::log(fit.m_values[i]) - mean_x;
    const double dy = std::log(fit.medians[i]) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.exponent = sxy / sxx;
  fit.intercept = mean_y - fit.exponent * mean_x;
  const double ss_res = std::max(0.0, syy - fit.exponent * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

PhaseResult phase_diagram(const SweepConfig& config) {
  if (config.kind != SweepKind::phase_diagram) fail(ErrorCode::config, "phase_diagram needs kind = phase_diagram");
  PhaseResult result;
  result.rows = run_sweep(config);
  for (std::size_t start = 0; start < result.rows.size(); start += static_cast<std::size_t>(config.trials)) {
    PhaseCell cell;
    const SweepRow& first = result.rows[start];
    cell.m = first.m;
    cell.s = first.s;
    cell.k = first.k;
    for (int t = 0; t < config.trials; ++t) {
      const SweepRow& row = result.rows[start + static_cast<std::size_t>(t)];
      ++cell.trials;
      if (row.joint_error <= config.success_fraction * row.trivial_error) ++cell.successes;
    }
    cell.rate = static_cast<double>(cell.successes) / cell.trials;
    result.cells.push_back(cell);
  }
  return result;
}

TSweepResult t_sweep(const SweepConfig& config) {
  if (config.kind != SweepKind::t_sweep) fail(ErrorCode::config, "t_sweep needs kind = t_sweep");
  TSweepResult result;
  result.rows = run_sweep(config);

  std::vector<double> errors;
  for (const auto& row : result.rows) errors.push_back(row.joint_error);
  result.achieved_median = median(errors);

  const NonlinearityParams params = link_params(config.link, config.quadrature_order);
  const Eigen::Index m = config.m_grid.front();
  const GroundTruth truth = generate_truth(spec_for(config, Cell{m, config.s, config.k}, 0));
  const Vector anchor_x = params.mu * truth.x_star;
  const ResolvedSets sets = resolve_sets(config, anchor_x, truth.v_star);
  const ConstraintSet joint = ConstraintSet::product(sets.x, sets.v);
  Vector anchor(anchor_x.size() + truth.v_star.size());
  anchor << anchor_x, truth.v_star;

  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double scale = params.sigma + params.psi_hat + params.mu;
  const std::uint64_t geometry_seed = derive_seed(config.seed, {kTSweepGeometryStream});
  result.gaussian_norm = expected_gaussian_norm(joint.dim());
  result.min_bound_proxy = std::numeric_limits<double>::infinity();
  for (double t : config.t_grid) {
    TSweepPoint point;
    point.t = t;
    // Same Gaussian stream for every t, so omega_t is monotone draw by draw.
    point.local_width = local_gaussian_width_mc(joint, anchor, t, config.geometry_trials, geometry_seed, config.threads);
    point.width_ratio = point.local_width.mean / t;
    point.bound_proxy = t + (point.width_ratio * scale + config.deviation_s * params.sigma) / sqrt_m;
    if (point.bound_proxy < result.min_bound_proxy) {
      result.min_bound_proxy = point.bound_proxy;
      result.best_t = t;
    }
    result.points.push_back(point);
  }
  result.c_hat = result.achieved_median / result.min_bound_proxy;
  return result;
}

}  // namespace tlasso
