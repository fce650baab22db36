#pragma once

#include <optional>
#include <vector>

#include "tlasso/links.hpp"
#include "tlasso/model.hpp"
#include "tlasso/sets.hpp"

namespace tlasso {

enum class StepRule { inverse_lipschitz, fixed };

struct SolveOptions {
  int max_iters = 100000;
  /// Stop once ||z_{k+1} - z_k|| / step drops below this. Unset means the
  /// scale-aware default 1e-8 * sqrt(m).
  std::optional<double> grad_map_tol;
  StepRule step_rule = StepRule::inverse_lipschitz;
  double fixed_step = 0.0;  ///< used when step_rule == fixed
  int power_iters = 200;
  bool record_trace = true;
};

struct SolveResult {
  Vector x_hat;
  Vector v_hat;
  int iterations = 0;
  double final_residual_norm = 0.0;
  /// 0.5 * ||residual||^2 at the starting point and after every step.
  std::vector<double> objective_trace;
  /// Gradient-mapping criterion met. For non-convex T this certifies a
  /// stationary point of the projected iteration, not a global minimizer.
  bool converged = false;
  bool convex = true;
  double lipschitz = 0.0;
  double step = 0.0;
  double final_grad_map = 0.0;
  /// m < n: Phi alone is rank deficient. Reported, not rejected.
  bool underdetermined = false;
};

/// Projected gradient descent on 0.5 * ||y - Phi x - sqrt(m) v||^2 over
/// set_x x set_v, started at the projection of the origin.
SolveResult solve_tlasso(const ProblemInstance& inst, const ConstraintSet& set_x,
                         const ConstraintSet& set_v, const SolveOptions& opts = {});

/// sqrt(||x_hat - mu x*||^2 + ||v_hat - v*||^2).
double joint_error(const SolveResult& result, const ProblemInstance& inst,
                   const NonlinearityParams& params);
double signal_error(const SolveResult& result, const ProblemInstance& inst,
                    const NonlinearityParams& params);
double corruption_error(const SolveResult& result, const ProblemInstance& inst);

/// Power-iteration estimate of lambda_max(Phi Phi^T + m I), inflated by 1%.
/// Requires iters >= 10.
double lipschitz_estimate(const ProblemInstance& inst, int iters);
double lipschitz_estimate(const Matrix& phi, int iters, std::uint64_t seed);

}  // namespace tlasso
