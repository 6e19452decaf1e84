#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ddp/bellman.hpp"
#include "ddp/mdp.hpp"
#include "ddp/metrics.hpp"
#include "ddp/schedules.hpp"

namespace ddp {

/// Runs fn(0..n-1) on up to `threads` workers (0 means 1). Exceptions are
/// rethrown on the calling thread after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

struct RunConfig {
  ScheduleConfig schedule;
  std::size_t max_iterations = 40;
  double max_seconds = std::numeric_limits<double>::infinity();
  /// Defaults to dirac(0) in every state.
  std::optional<ReturnApprox> initial;
  std::vector<MetricSpec> metrics;
  std::optional<std::vector<Distribution>> ground_truth;
  std::uint64_t seed = 0;
  /// Evaluate metrics against ground truth after every iteration.
  bool trace_metrics = false;
  /// Record PE(k) = max_s w1(eta_s^(k), T_s eta^(k-1)); needs finite rewards.
  bool track_projection_error = false;
  unsigned threads = 1;
};

struct StateSummary {
  std::size_t m;  ///< support size of eta_s^(k)
  double x_min;
  double x_max;
};

struct IterationRecord {
  std::size_t k;
  double seconds;  ///< cumulative wall time
  std::size_t total_particles;
  std::vector<StateSummary> states;
  std::vector<ExtendedValue> metrics;  ///< traced metrics, in RunConfig order
  std::optional<double> projection_error;
};

struct MetricResult {
  std::string name;
  ExtendedValue value;
  std::vector<ExtendedValue> per_state;
};

struct RunReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> iterations;
  ReturnApprox final;
  std::vector<MetricResult> metrics;
  double seconds = 0.0;
};

/// Projected distributional dynamic programming: every iteration first
/// computes all parameters from eta^(n-1), then all projections.
RunReport run_ddp(const MdpSpec& mdp, const RunConfig& cfg);

/// Hook invoked after parameters for iteration k are fixed and before any
/// projection of that iteration runs. Used by ordering tests.
using PhaseHook = std::function<void(std::size_t k, const ReturnApprox& previous)>;
RunReport run_ddp(const MdpSpec& mdp, const RunConfig& cfg, const PhaseHook& after_parameters);

struct McConfig {
  int horizon = 30;
  /// Trajectories per state; ignored when particle_budget is set.
  std::size_t samples = 0;
  /// Total particle budget shared evenly by the states.
  std::optional<std::size_t> particle_budget;
  /// With samples == 0 and no budget, sample in rounds until this elapses.
  double max_seconds = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::vector<MetricSpec> metrics;
  std::optional<std::vector<Distribution>> ground_truth;
  unsigned threads = 1;
};

/// Monte-Carlo baseline: per state, the empirical law of truncated returns.
RunReport run_mc(const MdpSpec& mdp, const McConfig& cfg);

/// Max-over-states metric table of `eta` against `truth`.
std::vector<MetricResult> compare(const ReturnApprox& eta, const std::vector<Distribution>& truth,
                                  const std::vector<MetricSpec>& metrics);

}  // namespace ddp
