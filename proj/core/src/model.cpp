#include "tlasso/model.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "tlasso/errors.hpp"
#include "tlasso/rng.hpp"
#include "text.hpp"

namespace tlasso {
namespace {

enum Stream : std::uint64_t { kPhiStream = 1, kSignalStream = 2, kCorruptionStream = 3 };

void validate(const InstanceSpec& spec) {
  if (spec.n < 1 || spec.m < 1) fail(ErrorCode::invalid_spec, "n and m must be >= 1");
  if (spec.s < 1) fail(ErrorCode::invalid_spec, "signal sparsity must be >= 1 (x* must be normalizable)");
  if (spec.s > spec.n) fail(ErrorCode::invalid_spec, "signal sparsity exceeds n");
  if (spec.k < 0 || spec.k > spec.m) fail(ErrorCode::invalid_spec, "corruption sparsity must lie in [0, m]");
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    fail(ErrorCode::invalid_spec, "corruption amplitude must be finite and >= 0");
  }
}

// First `count` entries of a partial Fisher-Yates shuffle of 0..size-1.
std::vector<Eigen::Index> random_support(Rng& rng, Eigen::Index size, Eigen::Index count) {
  std::vector<Eigen::Index> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(size - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

void write_block(std::ostream& out, const double* data, Eigen::Index count, Eigen::Index per_line) {
  for (Eigen::Index i = 0; i < count; ++i) {
    out << data[i] << ((i + 1) % per_line == 0 || i + 1 == count ? '\n' : ' ');
  }
}

void read_block(std::istream& in, double* data, Eigen::Index count, const char* what) {
  std::string token;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> token)) fail(ErrorCode::io, std::string("instance file truncated in ") + what);
    data[i] = text::parse_double(token, ErrorCode::io, what);
  }
}

}  // namespace

GroundTruth generate_truth(const InstanceSpec& spec) {
  validate(spec);
  GroundTruth truth;

  Rng signal_rng(derive_seed(spec.seed, {kSignalStream}));
  truth.x_star = Vector::Zero(spec.n);
  for (Eigen::Index i : random_support(signal_rng, spec.n, spec.s)) truth.x_star[i] = signal_rng.normal();
  double norm = truth.x_star.norm();
  // A Gaussian draw of exactly zero in every slot has probability zero, but
  // keep the unit-norm invariant unconditional.
  while (norm == 0.0) {
    truth.x_star[random_support(signal_rng, spec.n, 1).front()] = signal_rng.normal();
    norm = truth.x_star.norm();
  }
  truth.x_star /= norm;

  Rng corruption_rng(derive_seed(spec.seed, {kCorruptionStream}));
  truth.v_star = Vector::Zero(spec.m);
  for (Eigen::Index i : random_support(corruption_rng, spec.m, spec.k)) {
    truth.v_star[i] = corruption_rng.sign() * spec.amplitude;
  }
  return truth;
}

ProblemInstance generate_instance(const InstanceSpec& spec) {
  GroundTruth truth = generate_truth(spec);

  ProblemInstance inst;
  inst.phi.resize(spec.m, spec.n);
  Rng phi_rng(derive_seed(spec.seed, {kPhiStream}));
  double* entries = inst.phi.data();
  for (Eigen::Index i = 0; i < inst.phi.size(); ++i) entries[i] = phi_rng.normal();

  inst.x_star = std::move(truth.x_star);
  inst.v_star = std::move(truth.v_star);
  inst.link = spec.link;
  inst.seed = spec.seed;
  inst.y = apply_link(spec.link, inst.phi * inst.x_star) + inst.sqrt_m() * inst.v_star;
  return inst;
}

Vector residual(const ProblemInstance& inst, const Vector& x, const Vector& v) {
  if (x.size() != inst.n() || v.size() != inst.m()) {
    fail(ErrorCode::shape, "residual needs x of size n and v of size m");
  }
  return inst.y - inst.phi * x - inst.sqrt_m() * v;
}

void write_instance(std::ostream& out, const ProblemInstance& inst) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << inst.n() << ' ' << inst.m() << ' ' << inst.seed << ' ' << inst.link.spec() << '\n';
  out << std::setprecision(17);
  write_block(out, inst.phi.data(), inst.phi.size(), inst.n());
  write_block(out, inst.x_star.data(), inst.n(), inst.n());
  write_block(out, inst.v_star.data(), inst.m(), inst.m());
  write_block(out, inst.y.data(), inst.m(), inst.m());
  out.flags(flags);
  out.precision(precision);
}

ProblemInstance read_instance(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorCode::io, "instance file is empty");
  std::istringstream fields(header);
  std::string n_text, m_text, seed_text, link_text;
  if (!(fields >> n_text >> m_text >> seed_text >> link_text)) {
    fail(ErrorCode::io, "instance header must be '<n> <m> <seed> <link>'");
  }
  const auto n = text::parse_int<Eigen::Index>(n_text, ErrorCode::io, "n");
  const auto m = text::parse_int<Eigen::Index>(m_text, ErrorCode::io, "m");
  if (n < 1 || m < 1) fail(ErrorCode::io, "instance dimensions must be positive");

  ProblemInstance inst;
  inst.seed = text::parse_int<std::uint64_t>(seed_text, ErrorCode::io, "seed");
  inst.link = LinkFunction::parse(link_text);
  inst.phi.resize(m, n);
  inst.x_star.resize(n);
  inst.v_star.resize(m);
  inst.y.resize(m);
  read_block(in, inst.phi.data(), inst.phi.size(), "phi");
  read_block(in, inst.x_star.data(), n, "x_star");
  read_block(in, inst.v_star.data(), m, "v_star");
  read_block(in, inst.y.data(), m, "y");
  return inst;
}

void save_instance(const std::string& path, const ProblemInstance& inst) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write instance file '" + path + "'");
  write_instance(out, inst);
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open instance file '" + path + "'");
  return read_instance(in);
}

}  // namespace tlasso
