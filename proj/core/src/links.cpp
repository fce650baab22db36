#include "tlasso/links.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tlasso/errors.hpp"
#include "tlasso/quadrature.hpp"
#include "text.hpp"

namespace tlasso {
namespace {

constexpr double kPsiLower = 1e-6;
constexpr double kPsiUpper = 1e6;
constexpr int kPsiBisections = 60;

void require_positive(double value, std::string_view what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::invalid_link, std::string(what) + " must be finite and > 0");
  }
}

double interpolate(const std::vector<Breakpoint>& table, double x) {
  if (x <= table.front().input) return table.front().output;
  if (x >= table.back().input) return table.back().output;
  auto hi = std::upper_bound(table.begin(), table.end(), x,
                             [](double v, const Breakpoint& b) { return v < b.input; });
  auto lo = hi - 1;
  const double frac = (x - lo->input) / (hi->input - lo->input);
  return lo->output + frac * (hi->output - lo->output);
}

std::vector<Breakpoint> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::invalid_link, "cannot open link table '" + path + "'");
  std::vector<Breakpoint> table;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (text::trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      fail(ErrorCode::invalid_link, "link table rows need exactly two columns: '" + line + "'");
    }
    table.push_back({text::parse_double(a, ErrorCode::invalid_link, "table input"),
                     text::parse_double(b, ErrorCode::invalid_link, "table output")});
  }
  return table;
}

double expectation(const quadrature::Rule& rule, auto&& integrand) {
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) total += rule.weights[i] * integrand(rule.nodes[i]);
  return total;
}

// Hermite is exact for the polynomial links only. tanh has poles at
// i*pi/(2 beta), so it gets unit-width Legendre panels on [-8, 8] instead.
quadrature::Rule rule_for(const LinkFunction& link, int order) {
  auto cuts = link.kinks();
  if (link.kind() == LinkKind::tanh_scaled) {
    for (int c = -8; c <= 8; ++c) cuts.push_back(c);
  }
  return quadrature::gaussian_rule(order, cuts);
}

// E exp((f(g) - center)^2 / t^2), or +inf when the integrand stops decaying
// somewhere in the tail (checked at geometrically spaced probes past the
// quadrature window).
double orlicz_expectation(const LinkFunction& link, const quadrature::Rule& rule, double center,
                          double t) {
  const double inv_t2 = 1.0 / (t * t);
  for (double x = quadrature::kTruncation; x < 1e12; x *= 2.0) {
    for (double sx : {x, -x}) {
      const double dev = link(sx) - center;
      if (dev * dev * inv_t2 - 0.5 * x * x > 0.0) return std::numeric_limits<double>::infinity();
    }
  }
  double value = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double dev = link(rule.nodes[i]) - center;
    value += std::exp(rule.log_weights[i] + dev * dev * inv_t2);
  }
  return std::isnan(value) ? std::numeric_limits<double>::infinity() : value;
}

}  // namespace

LinkFunction LinkFunction::identity() { return LinkFunction(LinkKind::identity, 0.0); }
LinkFunction LinkFunction::sign() { return LinkFunction(LinkKind::sign, 0.0); }
LinkFunction LinkFunction::cubic() { return LinkFunction(LinkKind::cubic, 0.0); }

LinkFunction LinkFunction::clip(double tau) {
  require_positive(tau, "clip level");
  return LinkFunction(LinkKind::clip, tau);
}

LinkFunction LinkFunction::tanh_scaled(double beta) {
  require_positive(beta, "tanh slope");
  return LinkFunction(LinkKind::tanh_scaled, beta);
}

LinkFunction LinkFunction::tabulated(std::vector<Breakpoint> table, std::string source) {
  if (table.size() < 2) fail(ErrorCode::invalid_link, "tabulated link needs at least two breakpoints");
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!std::isfinite(table[i].input) || !std::isfinite(table[i].output)) {
      fail(ErrorCode::invalid_link, "tabulated link has a non-finite breakpoint");
    }
    if (i > 0 && !(table[i].input > table[i - 1].input)) {
      fail(ErrorCode::invalid_link, "tabulated link inputs must be strictly increasing");
    }
  }
  LinkFunction link(LinkKind::tabulated, 0.0);
  link.table_ = std::move(table);
  link.source_ = std::move(source);
  return link;
}

LinkFunction LinkFunction::parse(std::string_view spec) {
  spec = text::trim(spec);
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;

  if (!has_arg) {
    if (head == "identity") return identity();
    if (head == "sign") return sign();
    if (head == "cubic") return cubic();
  } else {
    if (head == "clip") return clip(text::parse_double(arg, ErrorCode::invalid_link, "clip level"));
    if (head == "tanh") return tanh_scaled(text::parse_double(arg, ErrorCode::invalid_link, "tanh slope"));
    if (head == "table") {
      std::string path(text::trim(arg));
      return tabulated(read_table(path), path);
    }
  }
  fail(ErrorCode::invalid_link, "unknown link spec '" + std::string(spec) + "'");
}

double LinkFunction::operator()(double x) const {
  switch (kind_) {
    case LinkKind::identity: return x;
    case LinkKind::sign: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    case LinkKind::clip: return std::clamp(x, -shape_, shape_);
    case LinkKind::tanh_scaled: return std::tanh(shape_ * x);
    case LinkKind::cubic: return x * x * x;
    case LinkKind::tabulated: return interpolate(table_, x);
  }
  return x;
}

std::vector<double> LinkFunction::kinks() const {
  switch (kind_) {
    case LinkKind::sign: return {0.0};
    case LinkKind::clip: return {-shape_, shape_};
    case LinkKind::tabulated: {
      std::vector<double> out;
      out.reserve(table_.size());
      for (const auto& b : table_) out.push_back(b.input);
      return out;
    }
    default: return {};
  }
}

std::string LinkFunction::spec() const {
  switch (kind_) {
    case LinkKind::identity: return "identity";
    case LinkKind::sign: return "sign";
    case LinkKind::clip: return "clip:" + text::format_double(shape_);
    case LinkKind::tanh_scaled: return "tanh:" + text::format_double(shape_);
    case LinkKind::cubic: return "cubic";
    case LinkKind::tabulated: return "table:" + source_;
  }
  return "identity";
}

Vector apply_link(const LinkFunction& link, const Vector& u) {
  return u.unaryExpr([&link](double v) { return link(v); });
}

double link_mean(const LinkFunction& link, int order) {
  return expectation(rule_for(link, order), [&](double x) { return link(x); });
}

double link_second_moment(const LinkFunction& link, int order) {
  return expectation(rule_for(link, order), [&](double x) {
    const double f = link(x);
    return f * f;
  });
}

double estimate_psi(const LinkFunction& link, int order) {
  const auto rule = rule_for(link, order);
  const double center = expectation(rule, [&](double x) { return link(x); });
  if (!std::isfinite(center)) fail(ErrorCode::numerical_failure, "E f(g) is not finite");

  auto excess = [&](double t) { return orlicz_expectation(link, rule, center, t) > 2.0; };
  if (excess(kPsiUpper)) {
    fail(ErrorCode::not_sub_gaussian,
         "no t in [1e-6, 1e6] satisfies E exp(f(g)^2/t^2) <= 2 for link " + link.spec());
  }
  if (!excess(kPsiLower)) return kPsiLower;

  double lo = kPsiLower;  // fails the Orlicz condition
  double hi = kPsiUpper;  // satisfies it
  for (int i = 0; i < kPsiBisections; ++i) {
    const double mid = std::sqrt(lo * hi);
    (excess(mid) ? lo : hi) = mid;
  }
  return hi;
}

NonlinearityParams link_params(const LinkFunction& link, int order) {
  if (order < 32) fail(ErrorCode::invalid_parameter, "quadrature order must be >= 32");
  const auto rule = rule_for(link, order);
  const double mu = expectation(rule, [&](double x) { return link(x) * x; });
  const double var = expectation(rule, [&](double x) {
    const double r = link(x) - mu * x;
    return r * r;
  });
  if (!std::isfinite(mu) || !std::isfinite(var)) {
    fail(ErrorCode::numerical_failure, "non-finite quadrature result for link " + link.spec());
  }
  NonlinearityParams params;
  params.mu = mu;
  params.sigma = std::sqrt(std::max(var, 0.0));
  params.psi_hat = estimate_psi(link, order);
  params.quadrature_order = order;
  return params;
}

}  // namespace tlasso
