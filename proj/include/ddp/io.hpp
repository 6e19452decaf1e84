#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddp/bellman.hpp"
#include "ddp/distributions.hpp"
#include "ddp/engine.hpp"
#include "ddp/mdp.hpp"
#include "ddp/schedules.hpp"

namespace ddp::io {

using Json = nlohmann::json;
/// Preserves key insertion order in emitted reports.
using OrderedJson = nlohmann::ordered_json;

/// %.17g, with "inf", "-inf" and "nan" for nonfinite values.
std::string format_number(double v);

/// Parses {"type": "normal", "mu": .., "sigma2": ..} and the other descriptor
/// shapes. Throws std::invalid_argument naming the offending field.
Distribution parse_distribution(const Json& j);
Json to_json(const Distribution& dist);

/// Builds an MdpSpec from the configuration schema. Shape and stochasticity
/// are left to validate().
MdpSpec mdp_from_json(const Json& j);
Json to_json(const MdpSpec& mdp);

Json read_json(const std::filesystem::path& path);
MdpSpec load_mdp(const std::filesystem::path& path);

/// Per-state descriptors: either a bare array or {"ground_truth": [...]}.
std::vector<Distribution> parse_ground_truth(const Json& j);

/// Keys of a run configuration file. Every field is optional so that command
/// line flags can override what the file leaves unset.
struct RunFile {
  ScheduleConfig schedule;
  std::optional<std::size_t> max_iterations;
  std::optional<double> max_seconds;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<MetricSpec>> metrics;
  std::optional<std::vector<Distribution>> ground_truth;
  std::optional<ReturnApprox> initial;
};

RunFile parse_run_file(const Json& j);

/// Particle table rows (state, point, weight) grouped per state label.
ReturnApprox read_particles_csv(const std::filesystem::path& path, const MdpSpec& mdp);

struct EmitOptions {
  /// Write 0 for every wall-clock field so outputs are reproducible bytes.
  bool zero_timing = false;
};

OrderedJson report_json(const RunReport& report, const MdpSpec& mdp, const EmitOptions& opts);
/// Header k,seconds,total_particles then one column per traced metric.
void write_iterations_csv(std::ostream& os, const RunReport& report, const std::vector<MetricSpec>& traced,
                          const EmitOptions& opts);
void write_particles_csv(std::ostream& os, const ReturnApprox& eta, const MdpSpec& mdp);
/// Header metric,value,<state labels...>.
void write_metric_table_csv(std::ostream& os, const std::vector<MetricResult>& table, const MdpSpec& mdp);

}  // namespace ddp::io
