#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlasso/experiments.hpp"
#include "tlasso/geometry.hpp"

namespace tlasso::csv {

// Frozen column lists. Downstream tools (the figure scripts) key on these.
inline constexpr std::string_view kSweepHeader =
    "kind,m,n,s,k,trial,seed,mu,sigma,psi_hat,joint_error,signal_error,corruption_error,iterations,converged,"
    "wall_time";
inline constexpr std::string_view kPhaseHeader = "m,s,k,trials,successes,success_rate";
inline constexpr std::string_view kTSweepHeader =
    "t,local_width,local_width_se,width_ratio,bound_proxy,achieved_median,c_hat,is_best_t";
inline constexpr std::string_view kWidthHeader = "quantity,set,t,mean,std_error,trials,seed";

/// RFC 4180 quoting: fields containing a comma, quote or line break are
/// wrapped in double quotes with inner quotes doubled.
std::string quote(std::string_view field);

/// Splits one CSV record, undoing quote().
std::vector<std::string> split_record(std::string_view line);

void write_sweep(std::ostream& out, std::span<const SweepRow> rows);
void write_phase(std::ostream& out, std::span<const PhaseCell> cells);
void write_tsweep(std::ostream& out, const TSweepResult& result);

struct WidthRecord {
  WidthEstimate estimate;
  std::string set_spec;
  std::uint64_t seed = 0;
};
void write_width_header(std::ostream& out);
void write_width_row(std::ostream& out, const WidthRecord& record);

/// Reads rows written by write_sweep (header required).
std::vector<SweepRow> read_sweep(std::istream& in);

}  // namespace tlasso::csv

namespace tlasso {

/// Run manifest (JSON): config echo, library version, wall time and any
/// summary numbers the run produced (scaling fit, t-sweep constant).
struct ManifestInfo {
  double wall_seconds = 0.0;
  std::optional<ScalingFit> fit;
  std::optional<TSweepResult> tsweep;
  std::string csv_path;
  std::vector<std::pair<std::string, double>> extras;
};

std::string manifest_json(const SweepConfig& config, const ManifestInfo& info);
void write_manifest(const std::string& path, const SweepConfig& config, const ManifestInfo& info);

}  // namespace tlasso
