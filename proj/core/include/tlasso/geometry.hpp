#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tlasso/errors.hpp"
#include "tlasso/model.hpp"
#include "tlasso/parallel.hpp"
#include "tlasso/rng.hpp"
#include "tlasso/sets.hpp"

namespace tlasso {

enum class WidthQuantity { width, complexity, local_width, cone_width, cone_complexity };

std::string_view to_string(WidthQuantity quantity);

/// A Monte Carlo estimate with its standard error (sample sd / sqrt(trials)).
struct WidthEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
  std::optional<double> t;
  WidthQuantity quantity = WidthQuantity::width;
};

/// Default number of Gaussian draws per estimate.
inline constexpr int kDefaultWidthTrials = 2000;

// Per-draw values. Each is a deterministic function of g, which is what makes
// shared-stream comparisons (scaling, monotonicity in t) exact.

/// sup_{x in S} <g, x>, in closed form per kind. Throws unbounded_width for
/// full_space and radius-free top_k.
double support_value(const ConstraintSet& set, const Vector& g);
/// A maximizer of <g, x> over S.
Vector support_point(const ConstraintSet& set, const Vector& g);
/// sup_{x in S} |<g, x>| = max(h_S(g), h_S(-g)).
double abs_support_value(const ConstraintSet& set, const Vector& g);

/// sup over (S - anchor) intersected with t * B_2 of <g, x>. The set must be
/// star-shaped about the anchor. Closed form for an unshifted l2 ball, top_k
/// and full space; otherwise a 1-d search on the multiplier nu of the l2
/// constraint, where x(nu) = P_{S - anchor}(g / nu) and ||x(nu)|| = t.
double local_support_value(const ConstraintSet& set, const Vector& g, double t);
double local_support_value(const ConstraintSet& set, const Vector& anchor, const Vector& g, double t);

/// Draw-level Monte Carlo driver: value(g) averaged over `trials` standard
/// normal vectors of dimension dim, draw i using stream derive_seed(seed, {i}).
template <typename DrawValue>
WidthEstimate monte_carlo(Eigen::Index dim, int trials, std::uint64_t seed, WidthQuantity quantity,
                          DrawValue&& value, unsigned threads = 0);

WidthEstimate gaussian_width_mc(const ConstraintSet& set, int trials, std::uint64_t seed,
                                unsigned threads = 0);
WidthEstimate gaussian_complexity_mc(const ConstraintSet& set, int trials, std::uint64_t seed,
                                     unsigned threads = 0);
/// Throws invalid_parameter for t <= 0.
WidthEstimate local_gaussian_width_mc(const ConstraintSet& set, double t, int trials,
                                      std::uint64_t seed, unsigned threads = 0);
/// Local width of the shifted set K = S - anchor.
WidthEstimate local_gaussian_width_mc(const ConstraintSet& set, const Vector& anchor, double t,
                                      int trials, std::uint64_t seed, unsigned threads = 0);

struct ConeSearchOptions {
  int iterations = 200;
  int restarts = 5;
  /// Feasible directions d satisfy anchor + epsilon * d in T.
  double epsilon = 1e-6;
  double membership_tol = 1e-9;
};

/// The tangent cone D(T, anchor) of T = set_x x set_v, accessed through the
/// rescaled set (T - anchor) / epsilon. Near the origin that set coincides
/// with D for polyhedral T and agrees with it to O(epsilon) for curved T.
class DescentCone {
 public:
  /// Throws invalid_anchor if the anchor is not in T (tolerance 1e-9).
  DescentCone(ConstraintSet set_x, ConstraintSet set_v, const Vector& anchor_x,
              const Vector& anchor_v, ConeSearchOptions opts = {});

  const ConstraintSet& set() const { return set_; }
  const Vector& anchor() const { return anchor_; }
  Eigen::Index dim() const { return anchor_.size(); }
  Eigen::Index signal_dim() const { return set_.first().dim(); }
  const ConeSearchOptions& options() const { return opts_; }

  /// P_{(T - anchor)/eps}(q) = (P_T(anchor + eps q) - anchor) / eps.
  Vector project_scaled(const Vector& q) const;
  /// Projection onto the cone intersected with the unit ball.
  Vector project_unit(const Vector& q) const;
  /// anchor + eps * d lies in T within the membership tolerance.
  bool admits(const Vector& d) const;

  /// sup over D intersected with B_2 of <g, d>, by projected gradient ascent
  /// with random restarts. Never negative (d = 0 is feasible).
  double support_value(const Vector& g, Rng& rng) const;

 private:
  ConstraintSet set_;
  Vector anchor_;
  ConeSearchOptions opts_;
};

/// omega_1(D) = omega(D intersected with B_2^{n+m}).
WidthEstimate descent_cone_width_mc(const ConstraintSet& set_x, const ConstraintSet& set_v,
                                    const Vector& anchor_x, const Vector& anchor_v, int trials,
                                    std::uint64_t seed, const ConeSearchOptions& opts = {},
                                    unsigned threads = 0);
WidthEstimate descent_cone_width_mc(const DescentCone& cone, int trials, std::uint64_t seed,
                                    unsigned threads = 0);
/// gamma(D intersected with S^{n+m-1}); per draw max(h(g), h(-g)) with h the
/// cone support value above.
WidthEstimate descent_cone_complexity_mc(const DescentCone& cone, int trials, std::uint64_t seed,
                                         unsigned threads = 0);

/// Unit directions in the tangent cone at base_point. When `cone` is set the
/// rsv check estimates gamma through it; otherwise from the directions alone.
struct ConeSample {
  Vector base_point;
  std::vector<Vector> directions;
  std::optional<DescentCone> cone;
};

/// `count` directions P_D(g) / ||P_D(g)|| for independent Gaussian g (draws
/// with P_D(g) = 0 are skipped). Every direction is checked with admits().
ConeSample sample_cone(const DescentCone& cone, int count, std::uint64_t seed);

struct RsvReport {
  double empirical_min = 0.0;  ///< min over directions of ||Phi a + sqrt(m) b||
  double sqrt_m = 0.0;
  WidthEstimate gamma;          ///< gamma(D intersected with the unit sphere)
  double implied_constant = 0.0;  ///< (sqrt(m) - empirical_min) / gamma
};

/// Throws invalid_input for an empty direction list, a non-unit direction or
/// a dimension mismatch with the instance.
RsvReport rsv_check(const ProblemInstance& inst, const ConeSample& cone, int trials,
                    std::uint64_t seed, unsigned threads = 0);

/// E ||g||_2 for g ~ N(0, I_dim), via the Gamma-function ratio.
double expected_gaussian_norm(Eigen::Index dim);

// ---------------------------------------------------------------------------

template <typename DrawValue>
WidthEstimate monte_carlo(Eigen::Index dim, int trials, std::uint64_t seed, WidthQuantity quantity,
                          DrawValue&& value, unsigned threads) {
  if (trials < 1) fail(ErrorCode::invalid_parameter, "Monte Carlo needs at least one trial");
  std::vector<double> draws(static_cast<std::size_t>(trials));
  parallel_for(draws.size(), threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    Vector g = rng.normal_vector(dim);
    draws[i] = value(g, rng);
  });
  // Sequential reduction keeps the result independent of scheduling.
  double sum = 0.0;
  for (double d : draws) sum += d;
  const double mean = sum / trials;
  double sq = 0.0;
  for (double d : draws) sq += (d - mean) * (d - mean);
  WidthEstimate est;
  est.mean = mean;
  est.std_error = trials > 1 ? std::sqrt(sq / (trials - 1)) / std::sqrt(static_cast<double>(trials)) : 0.0;
  est.trials = trials;
  est.quantity = quantity;
  return est;
}

}  // namespace tlasso
