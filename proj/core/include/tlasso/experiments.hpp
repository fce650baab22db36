#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlasso/config.hpp"
#include "tlasso/geometry.hpp"
#include "tlasso/links.hpp"
#include "tlasso/model.hpp"
#include "tlasso/sets.hpp"
#include "tlasso/solver.hpp"

namespace tlasso {

enum class SweepKind { error_vs_m, phase_diagram, t_sweep, corruption_sweep };

std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view text);

/// One seeded experiment. Set specs use the set grammar plus anchor-relative
/// radii resolved per trial against the truth (mu x*, v*):
///   `l1:anchor`, `l2:anchor`      radius = ||anchor||_1 or ||anchor||_2
///   `l1:anchor*1.5`               radius scaled by a factor
/// An anchor-relative ball around a zero anchor becomes the point {0}.
struct SweepConfig {
  SweepKind kind = SweepKind::error_vs_m;
  std::vector<Eigen::Index> m_grid;
  Eigen::Index n = 128;
  Eigen::Index s = 4;
  Eigen::Index k = 0;
  std::vector<Eigen::Index> s_grid;  ///< phase diagrams over (m, s)
  std::vector<Eigen::Index> k_grid;  ///< phase diagrams over (m, k), corruption sweeps
  std::string phase_axis = "s";
  double amplitude = 1.0;
  LinkFunction link = LinkFunction::identity();
  std::string set_x = "l1:anchor";
  std::string set_v = "l1:anchor";
  int trials = 10;
  std::uint64_t seed = 1;
  std::string output;
  std::string manifest;
  unsigned threads = 0;
  int quadrature_order = kDefaultQuadratureOrder;
  SolveOptions solve;
  /// Phase-diagram success: joint error <= success_fraction * sqrt(mu^2 + ||v*||^2).
  double success_fraction = 0.1;
  std::vector<double> t_grid;
  int geometry_trials = 500;
  /// The deviation parameter in the t-sweep bound proxy's s*sigma term.
  double deviation_s = 1.0;
  bool record_timing = false;

  /// Throws config on a non-increasing m grid, trials < 1, or similar.
  void validate() const;
};

/// Throws config for unknown keys or unparsable values.
SweepConfig sweep_config_from(const KeyValueConfig& values);
/// The resolved configuration as key/value pairs, for manifests.
std::vector<std::pair<std::string, std::string>> describe(const SweepConfig& config);

struct SweepRow {
  SweepKind kind = SweepKind::error_vs_m;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index s = 0;
  Eigen::Index k = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double mu = 0.0;
  double sigma = 0.0;
  double psi_hat = 0.0;
  double joint_error = 0.0;
  double signal_error = 0.0;
  double corruption_error = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  ///< seconds; 0 unless record_timing
  /// Not part of the CSV schema; kept for success thresholds.
  double trivial_error = 0.0;
};

/// Seed of one trial: a hash of the base seed and the cell coordinates.
std::uint64_t trial_seed(std::uint64_t base, Eigen::Index m, Eigen::Index s, Eigen::Index k, int trial);

/// Resolves an (anchor-relative) set spec against one block of the anchor.
ConstraintSet resolve_set(std::string_view spec, const Vector& anchor);

/// Generates, solves and scores every (cell, trial). Rows come back ordered
/// by (m, s, k, trial) whatever the thread count. Anchor feasibility is
/// checked for every trial before the first solve.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> m_values;
  std::vector<double> medians;
};

/// Least squares of log(median joint error) on log(m). Needs >= 3 distinct
/// m values and positive medians, otherwise throws fit_undefined.
ScalingFit scaling_fit(std::span<const SweepRow> rows);

double median(std::vector<double> values);

struct PhaseCell {
  Eigen::Index m = 0;
  Eigen::Index s = 0;
  Eigen::Index k = 0;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
};

struct PhaseResult {
  std::vector<SweepRow> rows;
  std::vector<PhaseCell> cells;
};

PhaseResult phase_diagram(const SweepConfig& config);

struct TSweepPoint {
  double t = 0.0;
  WidthEstimate local_width;
  double width_ratio = 0.0;  ///< omega_t(K) / t
  double bound_proxy = 0.0;  ///< t + (omega_t(K)(sigma + psi + mu) / t + s sigma) / sqrt(m)
};

struct TSweepResult {
  std::vector<SweepRow> rows;
  std::vector<TSweepPoint> points;
  double achieved_median = 0.0;
  double best_t = 0.0;
  double min_bound_proxy = 0.0;
  /// achieved_median / min_bound_proxy: the empirical constant for this run.
  double c_hat = 0.0;
  /// E||g||_2 in dimension n + m, the t -> 0 limit of omega_t(K) / t.
  double gaussian_norm = 0.0;
};

/// Needs a single m, an anchor strictly inside both blocks and a t grid.
TSweepResult t_sweep(const SweepConfig& config);

}  // namespace tlasso
