#pragma once

#include <limits>
#include <memory>
#include <string>
#include <string_view>

#include "tlasso/types.hpp"

namespace tlasso {

enum class SetKind { l1_ball, l2_ball, top_k, full_space, singleton, product };

/// An origin-centered structure set with an exact Euclidean projection.
/// Every set knows its ambient dimension, which is how a product splits a
/// stacked vector (x, v) into its blocks.
///
/// top_k optionally carries an l2 radius: {x : |supp x| <= k, ||x||_2 <= r}.
/// Without it the set is an unbounded union of subspaces.
class ConstraintSet {
 public:
  static ConstraintSet l1_ball(Eigen::Index dim, double radius);
  static ConstraintSet l2_ball(Eigen::Index dim, double radius);
  static ConstraintSet top_k(Eigen::Index dim, Eigen::Index k,
                             double radius = std::numeric_limits<double>::infinity());
  static ConstraintSet full_space(Eigen::Index dim);
  static ConstraintSet singleton(Vector anchor);
  static ConstraintSet product(ConstraintSet first, ConstraintSet second);

  /// Grammar: `l1:<r>`, `l2:<r>`, `topk:<k>`, `topk:<k>:<r>`, `full`,
  /// `point:<path>` (whitespace-separated coordinates), `zero`, and
  /// `prod(<set>,<set>)`. Non-product specs take the given dimension; a
  /// product needs the split, so use parse_product.
  static ConstraintSet parse(std::string_view spec, Eigen::Index dim);
  /// Parses `prod(a,b)`, or builds product(parse(a_spec), parse(b_spec)).
  static ConstraintSet parse_product(std::string_view spec, Eigen::Index first_dim,
                                     Eigen::Index second_dim);

  SetKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  double radius() const { return radius_; }
  Eigen::Index k() const { return k_; }
  const Vector& anchor() const { return anchor_; }
  const ConstraintSet& first() const { return *first_; }
  const ConstraintSet& second() const { return *second_; }

  bool is_convex() const;
  bool is_bounded() const;

  std::string spec() const;

 private:
  ConstraintSet(SetKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  SetKind kind_;
  Eigen::Index dim_ = 0;
  double radius_ = 0.0;
  Eigen::Index k_ = 0;
  Vector anchor_;
  std::shared_ptr<const ConstraintSet> first_;
  std::shared_ptr<const ConstraintSet> second_;
};

/// Euclidean projection argmin_{q in set} ||q - p||_2. For top_k, ties in
/// magnitude keep the lower index. Throws shape on dimension mismatch.
Vector project(const ConstraintSet& set, const Vector& p);

/// True iff p is within l2 distance tol of the set.
bool contains(const ConstraintSet& set, const Vector& p, double tol);

/// Exact l1-ball projection by sorting (soft threshold at the level that
/// lands on the sphere). Exposed for the solver benchmarks.
Vector project_l1_ball(const Vector& p, double radius);

}  // namespace tlasso
