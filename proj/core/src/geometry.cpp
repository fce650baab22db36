#include "tlasso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tlasso/errors.hpp"

namespace tlasso {
namespace {

constexpr int kMultiplierBisections = 64;
constexpr double kStallTol = 1e-12;

Vector top_k_part(const Vector& g, Eigen::Index k) {
  // Same selection rule as the top_k projection: largest magnitudes, lower
  // index on ties.
  return project(ConstraintSet::top_k(g.size(), k), g);
}

void check_dim(const ConstraintSet& set, const Vector& g) {
  if (g.size() != set.dim()) fail(ErrorCode::shape, "Gaussian vector and set dimensions differ");
}

}  // namespace

std::string_view to_string(WidthQuantity quantity) {
  switch (quantity) {
    case WidthQuantity::width: return "width";
    case WidthQuantity::complexity: return "complexity";
    case WidthQuantity::local_width: return "local_width";
    case WidthQuantity::cone_width: return "cone_width";
    case WidthQuantity::cone_complexity: return "cone_complexity";
  }
  return "width";
}

Vector support_point(const ConstraintSet& set, const Vector& g) {
  check_dim(set, g);
  switch (set.kind()) {
    case SetKind::l1_ball: {
      Eigen::Index best = 0;
      g.cwiseAbs().maxCoeff(&best);
      Vector x = Vector::Zero(g.size());
      x[best] = g[best] >= 0.0 ? set.radius() : -set.radius();
      return x;
    }
    case SetKind::l2_ball: {
      const double norm = g.norm();
      return norm > 0.0 ? Vector(g * (set.radius() / norm)) : Vector(Vector::Zero(g.size()));
    }
    case SetKind::top_k: {
      if (!set.is_bounded()) fail(ErrorCode::unbounded_width, "top_k without a radius is unbounded");
      Vector part = top_k_part(g, set.k());
      const double norm = part.norm();
      return norm > 0.0 ? Vector(part * (set.radius() / norm)) : part;
    }
    case SetKind::full_space: fail(ErrorCode::unbounded_width, "full space has infinite width");
    case SetKind::singleton: return set.anchor();
    case SetKind::product: {
      const Eigen::Index n1 = set.first().dim();
      Vector x(g.size());
      x.head(n1) = support_point(set.first(), g.head(n1));
      x.tail(g.size() - n1) = support_point(set.second(), g.tail(g.size() - n1));
      return x;
    }
  }
  return g;
}

double support_value(const ConstraintSet& set, const Vector& g) {
  check_dim(set, g);
  switch (set.kind()) {
    case SetKind::l1_ball: return set.radius() * g.cwiseAbs().maxCoeff();
    case SetKind::l2_ball: return set.radius() * g.norm();
    case SetKind::top_k:
      if (!set.is_bounded()) fail(ErrorCode::unbounded_width, "top_k without a radius is unbounded");
      return set.radius() * top_k_part(g, set.k()).norm();
    case SetKind::full_space: fail(ErrorCode::unbounded_width, "full space has infinite width");
    case SetKind::singleton: return g.dot(set.anchor());
    case SetKind::product: {
      const Eigen::Index n1 = set.first().dim();
      return support_value(set.first(), g.head(n1)) +
             support_value(set.second(), g.tail(g.size() - n1));
    }
  }
  return 0.0;
}

double abs_support_value(const ConstraintSet& set, const Vector& g) {
  return std::max(support_value(set, g), support_value(set, Vector(-g)));
}

double local_support_value(const ConstraintSet& set, const Vector& g, double t) {
  return local_support_value(set, Vector::Zero(set.dim()), g, t);
}

double local_support_value(const ConstraintSet& set, const Vector& anchor, const Vector& g, double t) {
  if (!(t > 0.0)) fail(ErrorCode::invalid_parameter, "local width needs t > 0");
  check_dim(set, g);
  if (anchor.size() != set.dim()) fail(ErrorCode::shape, "anchor and set dimensions differ");
  const bool shifted = !anchor.isZero(0.0);

  if (!shifted) {
    switch (set.kind()) {
      case SetKind::l2_ball: return std::min(set.radius(), t) * g.norm();
      case SetKind::top_k: return std::min(set.radius(), t) * top_k_part(g, set.k()).norm();
      case SetKind::full_space: return t * g.norm();
      default: break;
    }
  }
  if (!contains(set, anchor, 1e-9)) {
    fail(shifted ? ErrorCode::invalid_anchor : ErrorCode::invalid_parameter,
         "local width needs a set that is star-shaped about the anchor");
  }

  auto shifted_projection = [&](const Vector& q) -> Vector {
    return shifted ? Vector(project(set, anchor + q) - anchor) : project(set, q);
  };

  double saturated = std::numeric_limits<double>::infinity();
  if (set.is_bounded()) {
    const Vector far = support_point(set, g) - anchor;
    saturated = g.dot(far);
    if (far.norm() <= t) return saturated;
  }

  const double gnorm = g.norm();
  if (gnorm == 0.0) return 0.0;
  auto norm_at = [&](double nu) { return shifted_projection(g / nu).norm(); };

  // ||P_K(g / nu)|| is non-increasing in nu and at most ||g|| / nu.
  double hi = gnorm / t;
  double lo = hi;
  bool bracketed = false;
  for (int i = 0; i < 2000 && !bracketed; ++i) {
    lo *= 0.5;
    bracketed = norm_at(lo) > t;
  }
  if (bracketed) {
    for (int i = 0; i < kMultiplierBisections; ++i) {
      const double mid = std::sqrt(lo * hi);
      (norm_at(mid) > t ? lo : hi) = mid;
    }
  }
  return std::min(saturated, g.dot(shifted_projection(g / hi)));
}

WidthEstimate gaussian_width_mc(const ConstraintSet& set, int trials, std::uint64_t seed, unsigned threads) {
  if (!set.is_bounded()) fail(ErrorCode::unbounded_width, "Gaussian width of an unbounded set is infinite");
  return monte_carlo(set.dim(), trials, seed, WidthQuantity::width,
                     [&](const Vector& g, Rng&) { return support_value(set, g); }, threads);
}

WidthEstimate gaussian_complexity_mc(const ConstraintSet& set, int trials, std::uint64_t seed,
                                     unsigned threads) {
  if (!set.is_bounded()) fail(ErrorCode::unbounded_width, "Gaussian complexity of an unbounded set is infinite");
  return monte_carlo(set.dim(), trials, seed, WidthQuantity::complexity,
                     [&](const Vector& g, Rng&) { return abs_support_value(set, g); }, threads);
}

WidthEstimate local_gaussian_width_mc(const ConstraintSet& set, double t, int trials, std::uint64_t seed,
                                      unsigned threads) {
  return local_gaussian_width_mc(set, Vector::Zero(set.dim()), t, trials, seed, threads);
}

WidthEstimate local_gaussian_width_mc(const ConstraintSet& set, const Vector& anchor, double t, int trials,
                                      std::uint64_t seed, unsigned threads) {
  if (!(t > 0.0)) fail(ErrorCode::invalid_parameter, "local width needs t > 0");
  auto est = monte_carlo(set.dim(), trials, seed, WidthQuantity::local_width,
                         [&](const Vector& g, Rng&) { return local_support_value(set, anchor, g, t); },
                         threads);
  est.t = t;
  return est;
}

// --- descent cones ----------------------------------------------------------

DescentCone::DescentCone(ConstraintSet set_x, ConstraintSet set_v, const Vector& anchor_x,
                         const Vector& anchor_v, ConeSearchOptions opts)
    : set_(ConstraintSet::product(std::move(set_x), std::move(set_v))), opts_(opts) {
  if (anchor_x.size() != set_.first().dim() || anchor_v.size() != set_.second().dim()) {
    fail(ErrorCode::shape, "anchor blocks must match the set dimensions");
  }
  if (!(opts_.epsilon > 0.0) || opts_.iterations < 1 || opts_.restarts < 1 || opts_.membership_tol < 0.0) {
    fail(ErrorCode::invalid_parameter, "cone search needs epsilon > 0, iterations >= 1, restarts >= 1");
  }
  anchor_.resize(anchor_x.size() + anchor_v.size());
  anchor_ << anchor_x, anchor_v;
  if (!contains(set_, anchor_, opts_.membership_tol)) {
    fail(ErrorCode::invalid_anchor, "descent-cone anchor lies outside T");
  }
}

Vector DescentCone::project_scaled(const Vector& q) const {
  return (project(set_, anchor_ + opts_.epsilon * q) - anchor_) / opts_.epsilon;
}

Vector DescentCone::project_unit(const Vector& q) const {
  Vector d = project_scaled(q);
  const double norm = d.norm();
  if (norm > 1.0) d /= norm;
  return d;
}

bool DescentCone::admits(const Vector& d) const {
  return contains(set_, anchor_ + opts_.epsilon * d, opts_.membership_tol);
}

double DescentCone::support_value(const Vector& g, Rng& rng) const {
  const double gnorm = g.norm();
  if (gnorm == 0.0) return 0.0;
  const double step = 1.0 / gnorm;
  const bool convex = set_.is_convex();

  double best = 0.0;
  auto consider = [&](const Vector& d) {
    const double value = g.dot(d);
    if (value > best && admits(d)) best = value;
  };

  for (int restart = 0; restart < opts_.restarts; ++restart) {
    Vector d = Vector::Zero(dim());
    if (restart > 0) {
      Vector start = rng.normal_vector(dim());
      d = project_unit(start / start.norm());
    }
    for (int it = 0; it < opts_.iterations; ++it) {
      Vector next = project_unit(d + step * g);
      const double moved = (next - d).norm();
      d = std::move(next);
      if (!convex) consider(d);
      if (moved <= kStallTol) break;
    }
    // Ascent on a linear objective over a convex set is monotone, so the last
    // iterate is the best one of the run.
    if (convex) consider(d);
  }
  return best;
}

WidthEstimate descent_cone_width_mc(const ConstraintSet& set_x, const ConstraintSet& set_v,
                                    const Vector& anchor_x, const Vector& anchor_v, int trials,
                                    std::uint64_t seed, const ConeSearchOptions& opts, unsigned threads) {
  return descent_cone_width_mc(DescentCone(set_x, set_v, anchor_x, anchor_v, opts), trials, seed, threads);
}

WidthEstimate descent_cone_width_mc(const DescentCone& cone, int trials, std::uint64_t seed, unsigned threads) {
  return monte_carlo(cone.dim(), trials, seed, WidthQuantity::cone_width,
                     [&](const Vector& g, Rng& rng) { return cone.support_value(g, rng); }, threads);
}

WidthEstimate descent_cone_complexity_mc(const DescentCone& cone, int trials, std::uint64_t seed,
                                         unsigned threads) {
  return monte_carlo(cone.dim(), trials, seed, WidthQuantity::cone_complexity,
                     [&](const Vector& g, Rng& rng) {
                       const double plus = cone.support_value(g, rng);
                       const double minus = cone.support_value(Vector(-g), rng);
                       return std::max(plus, minus);
                     },
                     threads);
}

ConeSample sample_cone(const DescentCone& cone, int count, std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::invalid_parameter, "need at least one cone direction");
  ConeSample sample;
  sample.base_point = cone.anchor();
  sample.cone = cone;
  sample.directions.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    for (int attempt = 0; attempt < 100; ++attempt) {
      Vector g = rng.normal_vector(cone.dim());
      Vector d = cone.project_scaled(g / g.norm());
      const double norm = d.norm();
      if (norm < 1e-12) continue;
      d /= norm;
      if (!cone.admits(d)) continue;
      sample.directions.push_back(std::move(d));
      break;
    }
  }
  if (sample.directions.empty()) fail(ErrorCode::invalid_input, "cone sampling found no feasible direction");
  return sample;
}

RsvReport rsv_check(const ProblemInstance& inst, const ConeSample& sample, int trials, std::uint64_t seed,
                    unsigned threads) {
  if (sample.directions.empty()) fail(ErrorCode::invalid_input, "rsv check needs at least one direction");
  const Eigen::Index n = inst.n();
  const Eigen::Index dim = n + inst.m();
  RsvReport report;
  report.sqrt_m = inst.sqrt_m();
  report.empirical_min = std::numeric_limits<double>::infinity();
  for (const Vector& d : sample.directions) {
    if (d.size() != dim) fail(ErrorCode::invalid_input, "cone direction has the wrong dimension");
    if (std::abs(d.norm() - 1.0) > 1e-9) fail(ErrorCode::invalid_input, "cone directions must be unit-norm");
    const double value = (inst.phi * d.head(n) + report.sqrt_m * d.tail(inst.m())).norm();
    report.empirical_min = std::min(report.empirical_min, value);
  }

  if (sample.cone) {
    if (sample.cone->dim() != dim) fail(ErrorCode::invalid_input, "cone and instance dimensions differ");
    report.gamma = descent_cone_complexity_mc(*sample.cone, trials, seed, threads);
  } else {
    report.gamma = monte_carlo(dim, trials, seed, WidthQuantity::cone_complexity,
                               [&](const Vector& g, Rng&) {
                                 double best = 0.0;
                                 for (const Vector& d : sample.directions) best = std::max(best, std::abs(g.dot(d)));
                                 return best;
                               },
                               threads);
  }
  report.implied_constant = report.gamma.mean > 0.0
                                ? (report.sqrt_m - report.empirical_min) / report.gamma.mean
                                : std::numeric_limits<double>::infinity();
  return report;
}

double expected_gaussian_norm(Eigen::Index dim) {
  if (dim < 1) fail(ErrorCode::invalid_parameter, "dimension must be >= 1");
  const double d = static_cast<double>(dim);
  return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5 * d));
}

}  // namespace tlasso
