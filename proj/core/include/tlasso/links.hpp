#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tlasso/types.hpp"

namespace tlasso {

enum class LinkKind { identity, sign, clip, tanh_scaled, cubic, tabulated };

struct Breakpoint {
  double input;
  double output;
};

/// The scalar map f in y_i = f(<phi_i, x>). Values are immutable once built.
///
/// Kinds and their shape parameter:
///   identity     f(x) = x
///   sign         f(x) = sign(x), with sign(0) = 0
///   clip         f(x) = max(-tau, min(tau, x)),  tau > 0
///   tanh_scaled  f(x) = tanh(beta * x),          beta > 0
///   cubic        f(x) = x^3 (grows super-linearly; it has no finite
///                sub-Gaussian norm and exists to exercise that path)
///   tabulated    piecewise-linear through the breakpoints, held constant
///                beyond the first and last breakpoint
class LinkFunction {
 public:
  static LinkFunction identity();
  static LinkFunction sign();
  static LinkFunction clip(double tau);
  static LinkFunction tanh_scaled(double beta);
  static LinkFunction cubic();
  /// Throws invalid_link unless there are >= 2 breakpoints with strictly
  /// increasing, finite inputs. `source` is the path echoed by spec().
  static LinkFunction tabulated(std::vector<Breakpoint> table, std::string source = {});

  /// Parses `identity`, `sign`, `clip:<tau>`, `tanh:<beta>`, `cubic` or
  /// `table:<path>` (two whitespace-separated columns per line, '#' comments).
  static LinkFunction parse(std::string_view spec);

  double operator()(double x) const;

  LinkKind kind() const { return kind_; }
  double shape() const { return shape_; }
  const std::vector<Breakpoint>& table() const { return table_; }

  /// Points where f is not smooth; used to split quadrature.
  std::vector<double> kinks() const;

  /// Canonical grammar string; parse(spec()) reproduces the link.
  std::string spec() const;

 private:
  LinkFunction(LinkKind kind, double shape) : kind_(kind), shape_(shape) {}

  LinkKind kind_;
  double shape_ = 0.0;
  std::vector<Breakpoint> table_;
  std::string source_;
};

/// Elementwise f(u_i).
Vector apply_link(const LinkFunction& link, const Vector& u);

/// Mean term mu = E f(g) g, variance term sigma^2 = E (f(g) - mu g)^2 and the
/// estimated sub-Gaussian norm of f(g), for g ~ N(0, 1).
struct NonlinearityParams {
  double mu = 0.0;
  double sigma = 0.0;
  double psi_hat = 0.0;
  int quadrature_order = 0;
};

inline constexpr int kDefaultQuadratureOrder = 256;

/// Throws invalid_parameter for order < 32, numerical_failure for non-finite
/// expectations and not_sub_gaussian when estimate_psi fails.
NonlinearityParams link_params(const LinkFunction& link, int order = kDefaultQuadratureOrder);

/// E f(g) and E f(g)^2 under the same quadrature link_params uses.
double link_mean(const LinkFunction& link, int order = kDefaultQuadratureOrder);
double link_second_moment(const LinkFunction& link, int order = kDefaultQuadratureOrder);

/// Smallest t in [1e-6, 1e6] with E exp((f(g) - E f(g))^2 / t^2) <= 2, by 60
/// steps of geometric bisection. Throws not_sub_gaussian if even t = 1e6
/// fails, which is what happens for links that grow faster than linearly.
double estimate_psi(const LinkFunction& link, int order = kDefaultQuadratureOrder);

}  // namespace tlasso
