#pragma once

#include <span>
#include <vector>

namespace tlasso::quadrature {

/// Nodes and weights of a quadrature rule: sum_i w_i h(x_i) approximates an
/// integral against the rule's weight function. log_weights holds log(w_i)
/// to full relative accuracy even where w_i underflows, for integrands that
/// grow like exp(c x^2) in the tails.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite rule for the standard normal density: sum_i w_i h(x_i)
/// approximates E h(g), g ~ N(0, 1). Weights sum to one. Cached per order.
const Rule& gauss_hermite_normal(int order);

/// Gauss-Legendre rule on [-1, 1]. Cached per order.
const Rule& gauss_legendre(int order);

/// Half-width of the truncated real line used when the integrand has kinks.
/// The standard normal density at this point is below 1e-347 (it underflows).
inline constexpr double kTruncation = 40.0;

/// Rule for E h(g), g ~ N(0, 1), for an h that is smooth except at the given
/// breakpoints. With no breakpoints inside the truncation window this is
/// plain Gauss-Hermite of the given order; otherwise the window is split at
/// the breakpoints and each piece gets an order-point Gauss-Legendre rule
/// carrying the normal density in its weights.
Rule gaussian_rule(int order, std::span<const double> breakpoints);

}  // namespace tlasso::quadrature
