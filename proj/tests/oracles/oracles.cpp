#include "oracles.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace tlasso::oracle {

MomentEstimate link_moments(const std::function<double(double)>& f, long samples, std::uint64_t seed) {
  // Pass one: mu = E f(g) g. Pass two replays the same draws for sigma^2.
  auto pass = [&](auto&& accumulate) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal;
    for (long i = 0; i < samples; ++i) {
      const double g = normal(engine);
      accumulate(g, f(g));
    }
  };
  const double count = static_cast<double>(samples);
  double s1 = 0.0, s2 = 0.0, fsum = 0.0;
  pass([&](double g, double fg) {
    s1 += fg * g;
    s2 += fg * g * fg * g;
    fsum += fg;
  });
  MomentEstimate est;
  est.mu = s1 / count;
  est.mu_se = std::sqrt(std::max(0.0, s2 / count - est.mu * est.mu) / count);
  est.mean = fsum / count;
  double r1 = 0.0, r2 = 0.0;
  pass([&](double g, double fg) {
    const double d = fg - est.mu * g;
    r1 += d * d;
    r2 += d * d * d * d;
  });
  est.sigma2 = r1 / count;
  // The plug-in mu adds an O(mu_se^2) term on top of the sampling error.
  est.sigma2_se = std::sqrt(std::max(0.0, r2 / count - est.sigma2 * est.sigma2) / count) + est.mu_se * est.mu_se;
  return est;
}

double identity_psi_root() {
  // h(t) = (1 - 2/t^2)^(-1/2) - 2 is decreasing on (sqrt 2, inf).
  double lo = std::sqrt(2.0) * (1.0 + 1e-12), hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double h = 1.0 / std::sqrt(1.0 - 2.0 / (mid * mid)) - 2.0;
    (h > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Vector project_l1_bisect(const Vector& p, double radius) {
  if (p.lpNorm<1>() <= radius) return p;
  auto shrink = [&](double lambda) {
    return p.unaryExpr([lambda](double x) { return std::copysign(std::max(std::abs(x) - lambda, 0.0), x); });
  };
  double lo = 0.0, hi = p.cwiseAbs().maxCoeff();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (shrink(mid).lpNorm<1>() > radius ? lo : hi) = mid;
  }
  return shrink(hi);
}

Vector project_l2(const Vector& p, double radius) {
  const double norm = p.norm();
  return norm <= radius ? p : Vector(p * (radius / norm));
}

Vector project_l1_faces(const Vector& p, double radius) {
  if (p.lpNorm<1>() <= radius) return p;
  const int dim = static_cast<int>(p.size());
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int support = 1; support < (1 << dim); ++support) {
    std::vector<int> idx;
    for (int i = 0; i < dim; ++i)
      if (support & (1 << i)) idx.push_back(i);
    const int size = static_cast<int>(idx.size());
    for (int signs = 0; signs < (1 << size); ++signs) {
      Vector sigma = Vector::Zero(dim);
      for (int j = 0; j < size; ++j) sigma[idx[j]] = (signs & (1 << j)) ? -1.0 : 1.0;
      const double shift = (sigma.dot(p) - radius) / size;
      Vector q = Vector::Zero(dim);
      bool valid = true;
      for (int i : idx) {
        q[i] = p[i] - shift * sigma[i];
        if (sigma[i] * q[i] < 0.0) valid = false;
      }
      if (!valid) continue;
      const double dist = (q - p).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = q;
      }
    }
  }
  return best;
}

Vector project_topk_enumerate(const Vector& p, int k) {
  const int dim = static_cast<int>(p.size());
  Vector best;
  double best_kept = -1.0;
  // Supports in lexicographic order of their sorted index lists; a later
  // support must be strictly better to win.
  std::vector<int> mask(static_cast<std::size_t>(dim), 0);
  std::fill(mask.begin(), mask.begin() + k, 1);
  do {
    double kept = 0.0;
    Vector q = Vector::Zero(dim);
    for (int i = 0; i < dim; ++i)
      if (mask[static_cast<std::size_t>(i)]) {
        kept += p[i] * p[i];
        q[i] = p[i];
      }
    if (kept > best_kept) {
      best_kept = kept;
      best = q;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

Vector project_l1_grid(const Vector& p, double radius, int steps) {
  const int dim = static_cast<int>(p.size());
  Vector best = Vector::Zero(dim);
  double best_dist = p.norm();
  std::vector<int> counter(static_cast<std::size_t>(dim), 0);
  Vector q(dim);
  while (true) {
    for (int i = 0; i < dim; ++i) q[i] = -radius + 2.0 * radius * counter[static_cast<std::size_t>(i)] / steps;
    if (q.lpNorm<1>() <= radius) {
      const double dist = (q - p).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = q;
      }
    }
    int i = 0;
    while (i < dim && ++counter[static_cast<std::size_t>(i)] > steps) counter[static_cast<std::size_t>(i++)] = 0;
    if (i == dim) break;
  }
  return best;
}

AdmmResult admm_tlasso(const Matrix& phi, const Vector& y, const Projector& project_x, const Projector& project_v,
                       int iterations, double rho) {
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd a(m, n + m);
  a << phi, sqrt_m * Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd normal = a.transpose() * a;
  normal.diagonal().array() += rho;
  const Eigen::LLT<Eigen::MatrixXd> factor(normal);
  const Vector aty = a.transpose() * y;

  auto project_t = [&](const Vector& z) {
    Vector out(n + m);
    out << project_x(z.head(n)), project_v(z.tail(m));
    return out;
  };

  Vector w = project_t(Vector::Zero(n + m));
  Vector u = Vector::Zero(n + m);
  AdmmResult result;
  for (int it = 0; it < iterations; ++it) {
    const Vector z = factor.solve(aty + rho * (w - u));
    const Vector w_next = project_t(z + u);
    u += z - w_next;
    const double primal = (z - w_next).norm();
    const double dual = rho * (w_next - w).norm();
    w = w_next;
    result.iterations = it + 1;
    if (primal < 1e-13 && dual < 1e-13) break;
  }
  result.x = w.head(n);
  result.v = w.tail(m);
  result.objective = 0.5 * (y - a * w).squaredNorm();
  return result;
}

double dense_lambda_max(const Matrix& phi) {
  const Eigen::Index m = phi.rows();
  Eigen::MatrixXd gram = phi * phi.transpose();
  gram.diagonal().array() += static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double gaussian_norm_gamma(int dim) {
  return std::sqrt(2.0) * std::tgamma(0.5 * (dim + 1)) / std::tgamma(0.5 * dim);
}

namespace {

Vector from_angles(const std::vector<double>& angles) {
  const int dim = static_cast<int>(angles.size()) + 1;
  Vector u(dim);
  double sin_prod = 1.0;
  for (int i = 0; i + 1 < dim; ++i) {
    u[i] = sin_prod * std::cos(angles[static_cast<std::size_t>(i)]);
    sin_prod *= std::sin(angles[static_cast<std::size_t>(i)]);
  }
  u[dim - 1] = sin_prod;
  return u;
}

}  // namespace

double sphere_mesh_max(int dim, const std::function<double(const Vector&)>& value, int mesh, int rounds) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double best = neg_inf;
  Vector best_u;

  // Coarse mesh: dim-2 polar angles on [0, pi], the last angle on [0, 2 pi).
  const int n_angles = dim - 1;
  std::vector<int> counter(static_cast<std::size_t>(n_angles), 0);
  std::vector<double> angles(static_cast<std::size_t>(n_angles));
  auto limit = [&](int i) { return i + 1 == n_angles ? 2 * mesh : mesh; };
  while (true) {
    for (int i = 0; i < n_angles; ++i) {
      const double span = i + 1 == n_angles ? 2.0 * std::numbers::pi : std::numbers::pi;
      angles[static_cast<std::size_t>(i)] = span * (counter[static_cast<std::size_t>(i)] + 0.5) / limit(i);
    }
    const Vector u = from_angles(angles);
    const double v = value(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
    int i = 0;
    while (i < n_angles && ++counter[static_cast<std::size_t>(i)] >= limit(i)) counter[static_cast<std::size_t>(i++)] = 0;
    if (i == n_angles) break;
  }
  if (best == neg_inf) return best;

  // Local refinement: a 5^dim grid of offsets around the incumbent,
  // renormalized onto the sphere, shrinking every round.
  double h = std::numbers::pi / mesh;
  const int side = 5;
  std::vector<int> offset(static_cast<std::size_t>(dim), 0);
  for (int round = 0; round < rounds; ++round) {
    std::fill(offset.begin(), offset.end(), 0);
    Vector center = best_u;
    while (true) {
      Vector u = center;
      for (int i = 0; i < dim; ++i) u[i] += h * (offset[static_cast<std::size_t>(i)] - side / 2) / (side / 2);
      const double norm = u.norm();
      if (norm > 0.0) {
        u /= norm;
        const double v = value(u);
        if (v > best) {
          best = v;
          best_u = u;
        }
      }
      int i = 0;
      while (i < dim && ++offset[static_cast<std::size_t>(i)] >= side) offset[static_cast<std::size_t>(i++)] = 0;
      if (i == dim) break;
    }
    h *= 0.6;
  }
  return best;
}

double l1_local_support_mesh(const Vector& g, double radius, double t) {
  return sphere_mesh_max(static_cast<int>(g.size()), [&](const Vector& u) {
    const double rho = std::min(t, radius / u.lpNorm<1>());
    return rho * g.dot(u);
  });
}

namespace {

double golden_min(double lo, double hi, const std::function<double(double)>& f) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(lo), f(hi)});
}

}  // namespace

double l1_l2_local_support_dual(const Vector& g1, double r1, const Vector& g2, double r2, double t) {
  const double g2_norm = g2.size() ? g2.norm() : 0.0;
  const double g1_max = g1.size() ? g1.cwiseAbs().maxCoeff() : 0.0;
  auto soft_sq = [&](double lambda) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < g1.size(); ++i) {
      const double v = std::max(std::abs(g1[i]) - lambda, 0.0);
      sum += v * v;
    }
    return sum;
  };
  return golden_min(0.0, g1_max, [&](double lambda) {
    const double s = soft_sq(lambda);
    const double inner = golden_min(0.0, g2_norm, [&](double beta) {
      const double rest = g2_norm - beta;
      return r2 * beta + t * std::sqrt(s + rest * rest);
    });
    return r1 * lambda + inner;
  });
}

bool l1_cone_contains(const Vector& a, double radius, const Vector& d, double tol) {
  if (a.lpNorm<1>() < radius * (1.0 - 1e-12)) return true;
  double value = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) value += a[i] != 0.0 ? std::copysign(1.0, a[i]) * d[i] : std::abs(d[i]);
  return value <= tol;
}

double l1_product_cone_support_mesh(const Vector& ax, double rx, const Vector& av, double rv, const Vector& g) {
  const Eigen::Index n = ax.size();
  const Eigen::Index m = av.size();
  const double best = sphere_mesh_max(static_cast<int>(n + m), [&](const Vector& u) {
    if (!l1_cone_contains(ax, rx, u.head(n)) || !l1_cone_contains(av, rv, u.tail(m)))
      return -std::numeric_limits<double>::infinity();
    return g.dot(u);
  });
  return std::max(best, 0.0);
}

McValue halfspace_cone_width(int n, long samples, std::uint64_t seed) {
  // By rotation invariance take the outward normal a = e_1.
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  double sum = 0.0, sq = 0.0;
  Vector g(n);
  for (long i = 0; i < samples; ++i) {
    for (int j = 0; j < n; ++j) g[j] = normal(engine);
    const double value = g[0] <= 0.0 ? g.norm() : g.tail(n - 1).norm();
    sum += value;
    sq += value * value;
  }
  McValue out;
  out.mean = sum / samples;
  out.std_error = std::sqrt((sq / samples - out.mean * out.mean) / samples);
  return out;
}

}  // namespace tlasso::oracle
