#include "tlasso/sets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <vector>

#include "tlasso/errors.hpp"
#include "text.hpp"

namespace tlasso {
namespace {

void require_radius(double r) {
  if (!(r > 0.0)) fail(ErrorCode::invalid_spec, "ball radius must be > 0");
}

void require_dim(Eigen::Index dim) {
  if (dim < 1) fail(ErrorCode::invalid_spec, "set dimension must be >= 1");
}

// Relative slack on "already inside" tests so that a point produced by a
// projection (whose norm is the radius up to summation rounding) projects to
// itself bit-for-bit.
double inside_slack(Eigen::Index dim) {
  return 1.0 + 4.0 * static_cast<double>(dim + 1) * std::numeric_limits<double>::epsilon();
}

Vector clip_to_l2(const Vector& p, double radius) {
  const double norm = p.norm();
  if (norm <= radius * inside_slack(p.size())) return p;
  return p * (radius / norm);
}

Vector keep_top_k(const Vector& p, Eigen::Index k) {
  std::vector<Eigen::Index> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                   [&p](Eigen::Index a, Eigen::Index b) {
                     const double ma = std::abs(p[a]);
                     const double mb = std::abs(p[b]);
                     return ma > mb || (ma == mb && a < b);
                   });
  Vector out = Vector::Zero(p.size());
  for (Eigen::Index i = 0; i < k; ++i) out[order[i]] = p[order[i]];
  return out;
}

Vector read_point(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open point file '" + path + "'");
  std::vector<double> values;
  std::string token;
  while (in >> token) values.push_back(text::parse_double(token, ErrorCode::io, "point coordinate"));
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Splits "a,b" at the single top-level comma.
std::pair<std::string_view, std::string_view> split_pair(std::string_view inner) {
  int depth = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] == '(') ++depth;
    if (inner[i] == ')') --depth;
    if (inner[i] == ',' && depth == 0) return {inner.substr(0, i), inner.substr(i + 1)};
  }
  fail(ErrorCode::invalid_spec, "product spec needs two comma-separated factors");
}

}  // namespace

ConstraintSet ConstraintSet::l1_ball(Eigen::Index dim, double radius) {
  require_dim(dim);
  require_radius(radius);
  ConstraintSet s(SetKind::l1_ball, dim);
  s.radius_ = radius;
  return s;
}

ConstraintSet ConstraintSet::l2_ball(Eigen::Index dim, double radius) {
  require_dim(dim);
  require_radius(radius);
  ConstraintSet s(SetKind::l2_ball, dim);
  s.radius_ = radius;
  return s;
}

ConstraintSet ConstraintSet::top_k(Eigen::Index dim, Eigen::Index k, double radius) {
  require_dim(dim);
  if (k < 1 || k > dim) fail(ErrorCode::invalid_spec, "top_k requires 1 <= k <= dimension");
  require_radius(radius);
  ConstraintSet s(SetKind::top_k, dim);
  s.k_ = k;
  s.radius_ = radius;
  return s;
}

ConstraintSet ConstraintSet::full_space(Eigen::Index dim) {
  require_dim(dim);
  return ConstraintSet(SetKind::full_space, dim);
}

ConstraintSet ConstraintSet::singleton(Vector anchor) {
  require_dim(anchor.size());
  if (!anchor.allFinite()) fail(ErrorCode::invalid_spec, "singleton anchor must be finite");
  ConstraintSet s(SetKind::singleton, anchor.size());
  s.anchor_ = std::move(anchor);
  return s;
}

ConstraintSet ConstraintSet::product(ConstraintSet first, ConstraintSet second) {
  ConstraintSet s(SetKind::product, first.dim() + second.dim());
  s.first_ = std::make_shared<const ConstraintSet>(std::move(first));
  s.second_ = std::make_shared<const ConstraintSet>(std::move(second));
  return s;
}

ConstraintSet ConstraintSet::parse(std::string_view spec, Eigen::Index dim) {
  spec = text::trim(spec);
  if (spec.starts_with("prod(")) {
    fail(ErrorCode::invalid_spec, "product specs need both block dimensions (use parse_product)");
  }
  if (spec == "full") return full_space(dim);
  if (spec == "zero") return singleton(Vector::Zero(dim));

  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) fail(ErrorCode::invalid_spec, "unknown set spec '" + std::string(spec) + "'");
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg = spec.substr(colon + 1);
  if (head == "l1") return l1_ball(dim, text::parse_double(arg, ErrorCode::invalid_spec, "l1 radius"));
  if (head == "l2") return l2_ball(dim, text::parse_double(arg, ErrorCode::invalid_spec, "l2 radius"));
  if (head == "topk") {
    const auto second_colon = arg.find(':');
    const auto k = text::parse_int<Eigen::Index>(arg.substr(0, second_colon), ErrorCode::invalid_spec, "top-k k");
    if (second_colon == std::string_view::npos) return top_k(dim, k);
    return top_k(dim, k, text::parse_double(arg.substr(second_colon + 1), ErrorCode::invalid_spec, "top-k radius"));
  }
  if (head == "point") {
    Vector anchor = read_point(std::string(text::trim(arg)));
    if (anchor.size() != dim) {
      fail(ErrorCode::shape, "point file has " + std::to_string(anchor.size()) +
                                 " coordinates, expected " + std::to_string(dim));
    }
    return singleton(std::move(anchor));
  }
  fail(ErrorCode::invalid_spec, "unknown set spec '" + std::string(spec) + "'");
}

ConstraintSet ConstraintSet::parse_product(std::string_view spec, Eigen::Index first_dim,
                                           Eigen::Index second_dim) {
  spec = text::trim(spec);
  if (!spec.starts_with("prod(") || !spec.ends_with(")")) {
    fail(ErrorCode::invalid_spec, "expected prod(<set>,<set>), got '" + std::string(spec) + "'");
  }
  auto [a, b] = split_pair(spec.substr(5, spec.size() - 6));
  return product(parse(a, first_dim), parse(b, second_dim));
}

bool ConstraintSet::is_convex() const {
  switch (kind_) {
    case SetKind::top_k: return k_ == dim_;
    case SetKind::product: return first_->is_convex() && second_->is_convex();
    default: return true;
  }
}

bool ConstraintSet::is_bounded() const {
  switch (kind_) {
    case SetKind::full_space: return false;
    case SetKind::top_k: return std::isfinite(radius_);
    case SetKind::product: return first_->is_bounded() && second_->is_bounded();
    default: return true;
  }
}

std::string ConstraintSet::spec() const {
  switch (kind_) {
    case SetKind::l1_ball: return "l1:" + text::format_double(radius_);
    case SetKind::l2_ball: return "l2:" + text::format_double(radius_);
    case SetKind::top_k:
      return "topk:" + std::to_string(k_) + (std::isfinite(radius_) ? ":" + text::format_double(radius_) : "");
    case SetKind::full_space: return "full";
    case SetKind::singleton: return anchor_.isZero(0.0) ? "zero" : "point:<inline>";
    case SetKind::product: return "prod(" + first_->spec() + "," + second_->spec() + ")";
  }
  return "full";
}

Vector project_l1_ball(const Vector& p, double radius) {
  const double l1 = p.lpNorm<1>();
  if (l1 <= radius * inside_slack(p.size())) return p;

  std::vector<double> mags(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) mags[i] = std::abs(p[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());

  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mags[j] - candidate > 0.0) theta = candidate;
  }
  return p.unaryExpr([theta](double v) {
    const double shrunk = std::abs(v) - theta;
    return shrunk > 0.0 ? std::copysign(shrunk, v) : 0.0;
  });
}

Vector project(const ConstraintSet& set, const Vector& p) {
  if (p.size() != set.dim()) {
    fail(ErrorCode::shape, "projection input has dimension " + std::to_string(p.size()) +
                               ", set has " + std::to_string(set.dim()));
  }
  switch (set.kind()) {
    case SetKind::l1_ball: return project_l1_ball(p, set.radius());
    case SetKind::l2_ball: return clip_to_l2(p, set.radius());
    case SetKind::top_k: {
      Vector kept = keep_top_k(p, set.k());
      return std::isfinite(set.radius()) ? clip_to_l2(kept, set.radius()) : kept;
    }
    case SetKind::full_space: return p;
    case SetKind::singleton: return set.anchor();
    case SetKind::product: {
      const Eigen::Index n1 = set.first().dim();
      Vector out(p.size());
      out.head(n1) = project(set.first(), p.head(n1));
      out.tail(p.size() - n1) = project(set.second(), p.tail(p.size() - n1));
      return out;
    }
  }
  return p;
}

bool contains(const ConstraintSet& set, const Vector& p, double tol) {
  if (tol < 0.0) fail(ErrorCode::invalid_parameter, "membership tolerance must be >= 0");
  return (project(set, p) - p).norm() <= tol;
}

}  // namespace tlasso
