#include "tlasso/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "tlasso/config.hpp"
#include "tlasso/errors.hpp"
#include "text.hpp"

namespace tlasso::csv {
namespace {

std::string num(double v) { return text::format_double(v); }

}  // namespace

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

void write_sweep(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << r.m << ',' << r.n << ',' << r.s << ',' << r.k << ',' << r.trial << ','
        << r.seed << ',' << num(r.mu) << ',' << num(r.sigma) << ',' << num(r.psi_hat) << ',' << num(r.joint_error)
        << ',' << num(r.signal_error) << ',' << num(r.corruption_error) << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << num(r.wall_time) << '\n';
  }
}

void write_phase(std::ostream& out, std::span<const PhaseCell> cells) {
  out << kPhaseHeader << '\n';
  for (const auto& c : cells) {
    out << c.m << ',' << c.s << ',' << c.k << ',' << c.trials << ',' << c.successes << ',' << num(c.rate) << '\n';
  }
}

void write_tsweep(std::ostream& out, const TSweepResult& result) {
  out << kTSweepHeader << '\n';
  for (const auto& p : result.points) {
    out << num(p.t) << ',' << num(p.local_width.mean) << ',' << num(p.local_width.std_error) << ','
        << num(p.width_ratio) << ',' << num(p.bound_proxy) << ',' << num(result.achieved_median) << ','
        << num(result.c_hat) << ',' << (p.t == result.best_t ? "true" : "false") << '\n';
  }
}

void write_width_header(std::ostream& out) { out << kWidthHeader << '\n'; }

void write_width_row(std::ostream& out, const WidthRecord& record) {
  const auto& e = record.estimate;
  out << to_string(e.quantity) << ',' << quote(record.set_spec) << ',' << (e.t ? num(*e.t) : std::string()) << ','
      << num(e.mean) << ',' << num(e.std_error) << ',' << e.trials << ',' << record.seed << '\n';
}

std::vector<SweepRow> read_sweep(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kSweepHeader) {
    fail(ErrorCode::io, "sweep CSV header does not match the frozen schema");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto f = split_record(line);
    if (f.size() != 16) fail(ErrorCode::io, "sweep CSV row has " + std::to_string(f.size()) + " fields, expected 16");
    SweepRow r;
    r.kind = parse_sweep_kind(f[0]);
    r.m = text::parse_int<Eigen::Index>(f[1], ErrorCode::io, "m");
    r.n = text::parse_int<Eigen::Index>(f[2], ErrorCode::io, "n");
    r.s = text::parse_int<Eigen::Index>(f[3], ErrorCode::io, "s");
    r.k = text::parse_int<Eigen::Index>(f[4], ErrorCode::io, "k");
    r.trial = text::parse_int<int>(f[5], ErrorCode::io, "trial");
    r.seed = text::parse_int<std::uint64_t>(f[6], ErrorCode::io, "seed");
    r.mu = text::parse_double(f[7], ErrorCode::io, "mu");
    r.sigma = text::parse_double(f[8], ErrorCode::io, "sigma");
    r.psi_hat = text::parse_double(f[9], ErrorCode::io, "psi_hat");
    r.joint_error = text::parse_double(f[10], ErrorCode::io, "joint_error");
    r.signal_error = text::parse_double(f[11], ErrorCode::io, "signal_error");
    r.corruption_error = text::parse_double(f[12], ErrorCode::io, "corruption_error");
    r.iterations = text::parse_int<int>(f[13], ErrorCode::io, "iterations");
    r.converged = f[14] == "true";
    r.wall_time = text::parse_double(f[15], ErrorCode::io, "wall_time");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tlasso::csv

namespace tlasso {

std::string manifest_json(const SweepConfig& config, const ManifestInfo& info) {
  nlohmann::ordered_json doc;
  doc["library_version"] = std::string(library_version());
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [key, value] : describe(config)) echo[key] = value;
  doc["config"] = echo;
  doc["csv"] = info.csv_path;
  doc["wall_seconds"] = info.wall_seconds;
  if (info.fit) {
    doc["scaling_fit"] = {{"exponent", info.fit->exponent},
                          {"intercept", info.fit->intercept},
                          {"r2", info.fit->r2},
                          {"m", info.fit->m_values},
                          {"median_joint_error", info.fit->medians}};
  }
  if (info.tsweep) {
    doc["t_sweep"] = {{"achieved_median", info.tsweep->achieved_median},
                      {"best_t", info.tsweep->best_t},
                      {"min_bound_proxy", info.tsweep->min_bound_proxy},
                      {"c_hat", info.tsweep->c_hat},
                      {"gaussian_norm_limit", info.tsweep->gaussian_norm}};
  }
  for (const auto& [key, value] : info.extras) doc[key] = value;
  return doc.dump(2) + "\n";
}

void write_manifest(const std::string& path, const SweepConfig& config, const ManifestInfo& info) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write manifest '" + path + "'");
  out << manifest_json(config, info);
}

}  // namespace tlasso
