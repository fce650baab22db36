#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "tlasso/links.hpp"
#include "tlasso/types.hpp"

namespace tlasso {

struct InstanceSpec {
  Eigen::Index n = 0;  ///< signal dimension
  Eigen::Index m = 0;  ///< number of measurements
  Eigen::Index s = 1;  ///< signal sparsity, 1..n
  Eigen::Index k = 0;  ///< corruption sparsity, 0..m
  double amplitude = 1.0;
  LinkFunction link = LinkFunction::identity();
  std::uint64_t seed = 0;
};

/// y = f(Phi x*) + sqrt(m) v*, with ||x*||_2 = 1.
struct ProblemInstance {
  Matrix phi;
  Vector x_star;
  Vector v_star;
  Vector y;
  LinkFunction link = LinkFunction::identity();
  std::uint64_t seed = 0;

  Eigen::Index n() const { return phi.cols(); }
  Eigen::Index m() const { return phi.rows(); }
  double sqrt_m() const { return std::sqrt(static_cast<double>(phi.rows())); }
};

struct GroundTruth {
  Vector x_star;
  Vector v_star;
};

/// The structured truths alone. They come from their own RNG streams, so this
/// is cheap and agrees exactly with generate_instance(spec).x_star / v_star.
GroundTruth generate_truth(const InstanceSpec& spec);

/// Phi has i.i.d. N(0,1) entries; x* is s-sparse on a uniform support with
/// Gaussian nonzeros, normalized; v* is k-sparse on a uniform support with
/// entries +-amplitude. Bit-identical for equal specs.
ProblemInstance generate_instance(const InstanceSpec& spec);

/// y - Phi x - sqrt(m) v.
Vector residual(const ProblemInstance& inst, const Vector& x, const Vector& v);

/// Text format: header line `<n> <m> <seed> <link-spec>`, then Phi (m rows
/// of n values), x* (n values), v* (m values), y (m values), one block per
/// line group, 17 significant digits.
void write_instance(std::ostream& out, const ProblemInstance& inst);
ProblemInstance read_instance(std::istream& in);

void save_instance(const std::string& path, const ProblemInstance& inst);
ProblemInstance load_instance(const std::string& path);

}  // namespace tlasso
