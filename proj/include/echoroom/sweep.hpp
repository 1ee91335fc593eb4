#pragma once

// Noise sweeps: for every sigma on a grid, simulate noisy echoes of a fixed
// room and trajectory, reconstruct, and score against the truth.
//
// Trial (k, t) at grid index k uses seed stream_seed(master, {k, t}) for both
// the noise and the solver restarts, so the output depends only on the
// configuration and never on the number of workers or their scheduling.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "echoroom/pipeline.hpp"

namespace echoroom {

struct SweepConfig {
  double sigma_start = 0.0;
  double sigma_end = 0.15;
  double sigma_step = 0.005;
  int trials = 100;
  std::string room_spec = "random-convex 5 3";
  std::string traj_spec = "random-interior 8 5";
  /// File-provided geometry overrides the generator specs.
  std::optional<Room> room;
  std::optional<Trajectory> trajectory;
  PipelineOptions pipeline;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
  std::vector<double> sigmas() const;
};

struct SweepRow {
  std::size_t sigma_index = 0;
  double sigma = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double cost = 0.0;
  double vertex_error = 0.0;
  double location_error = 0.0;
  double vertex_error_sum = 0.0;
  double location_error_sum = 0.0;
  bool converged = false;
  std::string status = "ok";  // or the error code of a failed trial
};

struct SweepSummaryRow {
  double sigma = 0.0;
  int trials = 0;
  int converged = 0;
  int failed = 0;
  double snr_db = 0.0;  // 20 log10(rms(D) / sigma); +inf at sigma = 0
  double vertex_median = 0.0, vertex_mean = 0.0, vertex_q25 = 0.0, vertex_q75 = 0.0;
  double location_median = 0.0, location_mean = 0.0, location_q25 = 0.0, location_q75 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // completed trials in (sigma index, trial) order
  std::vector<SweepSummaryRow> summary;
  bool interrupted = false;
};

/// Runs every trial unless `cancel` becomes true, in which case the trials
/// already finished are returned with interrupted = true. `progress` is
/// called (from worker threads, serialized) after each finished trial.
SweepResult run_sweep(const SweepConfig& cfg, const std::atomic<bool>* cancel = nullptr,
                      const std::function<void(std::size_t done, std::size_t total)>& progress = {});

/// Per-sigma aggregates; failed trials count as infinite error.
std::vector<SweepSummaryRow> summarize(const std::vector<SweepRow>& rows, double signal_rms);

std::string sweep_csv(const SweepResult& result);
std::string sweep_summary_csv(const SweepResult& result);

/// Worker count after applying the ECHOROOM_THREADS cap (at least 1).
int effective_workers(int requested);

/// Rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// Linear-interpolation quantile of a sample, p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace echoroom
