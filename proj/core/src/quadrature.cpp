#include "tlasso/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tlasso/errors.hpp"

namespace tlasso::quadrature {
namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// orthogonal family, weights are mu0 * (first eigenvector component)^2.
Rule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::numerical_failure, "Jacobi matrix eigensolve did not converge");
  }
  const Eigen::Index n = diag.size();
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.log_weights.resize(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[i] = solver.eigenvalues()[i];
    rule.weights[i] = mu0 * v0 * v0;
    total += rule.weights[i];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.weights[i] *= mu0 / total;
    rule.log_weights[i] = std::log(rule.weights[i]);
  }
  return rule;
}

// log of the Christoffel number 1 / sum_k p_k(x)^2 for the orthonormal
// probabilists' Hermite family, accumulated with rescaling so that tail nodes
// (where p_k(x) ~ exp(x^2 / 4)) neither overflow nor lose relative accuracy.
double hermite_log_weight(double x, int order) {
  double prev = 0.0;
  double cur = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;  // true values are (cur, prev, sum) * exp(log_scale), sum * exp(2 log_scale)
  for (int k = 0; k + 1 < order; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
    sum += cur * cur;
    if (std::abs(cur) > 1e100) {
      prev *= 1e-100;
      cur *= 1e-100;
      sum *= 1e-200;
      log_scale += 100.0 * std::log(10.0);
    }
  }
  return -(std::log(sum) + 2.0 * log_scale);
}

Rule build_hermite(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off(order - 1);
  // Probabilists' Hermite polynomials: beta_k = k.
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
  Rule rule = golub_welsch(diag, off, 1.0);
  // Replace eigenvector-based weights, which are only absolutely accurate.
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.log_weights[i] = hermite_log_weight(rule.nodes[i], order);
    total += std::exp(rule.log_weights[i]);
  }
  const double log_total = std::log(total);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.log_weights[i] -= log_total;
    rule.weights[i] = std::exp(rule.log_weights[i]);
  }
  return rule;
}

Rule build_legendre(int order) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd off(order - 1);
  for (int k = 1; k < order; ++k) {
    const double kk = static_cast<double>(k);
    off[k - 1] = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  return golub_welsch(diag, off, 2.0);
}

const Rule& cached(std::map<int, Rule>& cache, int order, Rule (*build)(int)) {
  static std::mutex mutex;
  if (order < 1) fail(ErrorCode::invalid_parameter, "quadrature order must be positive");
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build(order)).first;
  return it->second;
}

}  // namespace

const Rule& gauss_hermite_normal(int order) {
  static std::map<int, Rule> cache;
  return cached(cache, order, &build_hermite);
}

const Rule& gauss_legendre(int order) {
  static std::map<int, Rule> cache;
  return cached(cache, order, &build_legendre);
}

Rule gaussian_rule(int order, std::span<const double> breakpoints) {
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (std::isfinite(b) && b > -kTruncation && b < kTruncation) cuts.push_back(b);
  }
  if (cuts.empty()) return gauss_hermite_normal(order);

  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.insert(cuts.begin(), -kTruncation);
  cuts.push_back(kTruncation);

  const Rule& base = gauss_legendre(order);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  Rule rule;
  rule.nodes.reserve(base.size() * (cuts.size() - 1));
  rule.weights.reserve(rule.nodes.capacity());
  rule.log_weights.reserve(rule.nodes.capacity());
  for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
    const double lo = cuts[piece];
    const double hi = cuts[piece + 1];
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < base.size(); ++i) {
      const double x = mid + half * base.nodes[i];
      const double log_w = std::log(half * base.weights[i] * inv_sqrt_2pi) - 0.5 * x * x;
      rule.nodes.push_back(x);
      rule.weights.push_back(std::exp(log_w));
      rule.log_weights.push_back(log_w);
    }
  }
  return rule;
}

}  // namespace tlasso::quadrature
