#include "tlasso/solver.hpp"

#include <cmath>

#include "tlasso/errors.hpp"
#include "tlasso/rng.hpp"

namespace tlasso {
namespace {

constexpr double kLipschitzMargin = 1.01;
constexpr std::uint64_t kPowerIterationStream = 0x706f776572ULL;

}  // namespace

double lipschitz_estimate(const Matrix& phi, int iters, std::uint64_t seed) {
  if (iters < 10) fail(ErrorCode::invalid_parameter, "power iteration needs at least 10 iterations");
  const auto m = static_cast<double>(phi.rows());
  // lambda_max(Phi Phi^T) = lambda_max(Phi^T Phi); iterate on the smaller Gram.
  const bool use_cols = phi.cols() <= phi.rows();
  Rng rng(derive_seed(seed, {kPowerIterationStream}));
  Vector u = rng.normal_vector(use_cols ? phi.cols() : phi.rows());
  u.normalize();

  for (int i = 0; i < iters; ++i) {
    Vector w = use_cols ? Vector(phi.transpose() * (phi * u)) : Vector(phi * (phi.transpose() * u));
    const double norm = w.norm();
    if (!std::isfinite(norm)) fail(ErrorCode::numerical_failure, "power iteration produced a non-finite iterate");
    if (norm == 0.0) break;  // Phi = 0: the Gram part vanishes
    u = w / norm;
  }
  // Rayleigh quotient of the unit iterate.
  const double top = use_cols ? (phi * u).squaredNorm() : (phi.transpose() * u).squaredNorm();
  const double lipschitz = kLipschitzMargin * (top + m);
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    fail(ErrorCode::numerical_failure, "Lipschitz estimate is not a positive finite number");
  }
  return lipschitz;
}

double lipschitz_estimate(const ProblemInstance& inst, int iters) {
  return lipschitz_estimate(inst.phi, iters, inst.seed);
}

SolveResult solve_tlasso(const ProblemInstance& inst, const ConstraintSet& set_x,
                         const ConstraintSet& set_v, const SolveOptions& opts) {
  const Eigen::Index n = inst.n();
  const Eigen::Index m = inst.m();
  if (set_x.dim() != n || set_v.dim() != m) {
    fail(ErrorCode::shape, "constraint sets must have dimensions (n, m)");
  }
  if (opts.max_iters < 1) fail(ErrorCode::invalid_parameter, "max_iters must be >= 1");
  const double tol = opts.grad_map_tol.value_or(1e-8 * inst.sqrt_m());
  if (!(tol > 0.0)) fail(ErrorCode::invalid_parameter, "grad_map_tol must be > 0");

  SolveResult result;
  result.convex = set_x.is_convex() && set_v.is_convex();
  result.underdetermined = m < n;
  if (opts.step_rule == StepRule::fixed) {
    if (!(opts.fixed_step > 0.0)) fail(ErrorCode::invalid_parameter, "fixed step must be > 0");
    result.step = opts.fixed_step;
  } else {
    result.lipschitz = lipschitz_estimate(inst, opts.power_iters);
    result.step = 1.0 / result.lipschitz;
  }
  const double step = result.step;
  const double sqrt_m = inst.sqrt_m();

  Vector x = project(set_x, Vector::Zero(n));
  Vector v = project(set_v, Vector::Zero(m));
  Vector r = residual(inst, x, v);
  if (opts.record_trace) result.objective_trace.push_back(0.5 * r.squaredNorm());

  for (int it = 0; it < opts.max_iters; ++it) {
    // grad = (-Phi^T r, -sqrt(m) r)
    Vector x_next = project(set_x, x + step * (inst.phi.transpose() * r));
    Vector v_next = project(set_v, v + (step * sqrt_m) * r);
    const double moved = std::sqrt((x_next - x).squaredNorm() + (v_next - v).squaredNorm());
    x = std::move(x_next);
    v = std::move(v_next);
    r = residual(inst, x, v);
    if (!r.allFinite()) fail(ErrorCode::numerical_failure, "iterate diverged (non-finite residual)");
    if (opts.record_trace) result.objective_trace.push_back(0.5 * r.squaredNorm());
    result.iterations = it + 1;
    result.final_grad_map = moved / step;
    if (result.final_grad_map < tol) {
      result.converged = true;
      break;
    }
  }

  result.x_hat = std::move(x);
  result.v_hat = std::move(v);
  result.final_residual_norm = r.norm();
  return result;
}

double signal_error(const SolveResult& result, const ProblemInstance& inst,
                    const NonlinearityParams& params) {
  if (result.x_hat.size() != inst.n()) fail(ErrorCode::shape, "x_hat has the wrong dimension");
  return (result.x_hat - params.mu * inst.x_star).norm();
}

double corruption_error(const SolveResult& result, const ProblemInstance& inst) {
  if (result.v_hat.size() != inst.m()) fail(ErrorCode::shape, "v_hat has the wrong dimension");
  return (result.v_hat - inst.v_star).norm();
}

double joint_error(const SolveResult& result, const ProblemInstance& inst,
                   const NonlinearityParams& params) {
  return std::hypot(signal_error(result, inst, params), corruption_error(result, inst));
}

}  // namespace tlasso
