#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slamkit/filter.hpp"
#include "slamkit/metrics.hpp"
#include "slamkit/sim.hpp"

namespace slamkit {

struct ExperimentConfig {
  std::string scenario_path;
  FilterConfig filter;
  // Noise model the filter believes; when unset the scenario truth is used.
  // Setting it different from the truth gives the wrong-R regime.
  std::optional<NoiseConfig> filter_noise;
  int runs = 1;
  std::uint64_t base_seed = 1;
  std::string output_dir;  // empty = keep results in memory only
  int threads = 1;
  double divergence_threshold = 5.0;  // meters of final position error
};

struct RunSummary {
  double pos_rmse = 0.0;
  double heading_rmse = 0.0;
  double two_sigma_coverage = 0.0;                    // all components jointly
  std::array<double, 3> component_coverage{0, 0, 0};  // x, y, phi
  bool diverged = false;
  Vec2 final_r;  // diagonal of the R in effect at the end of the run
  int degenerate_epochs = 0;
  bool failed = false;
  std::string error;
};

struct AggregateReport {
  std::vector<RunSummary> runs;  // ordered by run index
  double mean_pos_rmse = 0.0;
  double std_pos_rmse = 0.0;
  double mean_heading_rmse = 0.0;
  double divergence_rate = 0.0;
  double mean_2sigma_coverage = 0.0;
  double mean_component_coverage = 0.0;
  double mean_final_r_range = 0.0;
  double mean_final_r_bearing = 0.0;
  double wall_time_s = 0.0;
  int failed_runs = 0;
};

/// Runs `cfg.runs` independent simulations (seeds base_seed + i), each
/// driving the simulator and the filter in lockstep: controls at dt_control,
/// scans every obs_period_steps. Per-run CSVs and an aggregate summary are
/// written under output_dir when set. Runs execute on `threads` workers;
/// every run is self-seeded, so outputs are identical for any worker count.
AggregateReport run_monte_carlo(const ExperimentConfig& cfg, const Scenario& scenario);

/// Loads an experiment config from JSON; `scenario` paths are resolved
/// relative to the config file's directory.
ExperimentConfig load_experiment_config(const std::string& path);

/// Writes the aggregate report as "key = value" lines.
std::string format_summary(const AggregateReport& report, const ExperimentConfig& cfg);

struct CompareReport {
  Variant variant_a = Variant::baseline;
  Variant variant_b = Variant::pso;
  AggregateReport report_a;
  AggregateReport report_b;
  // One-sided paired test of H1: variant a has larger mean position RMSE.
  PairedTestResult pos_rmse_a_greater;
};

/// Runs two variants on identical per-run truth (same seeds, independent
/// filter streams) and pairs their position RMSEs.
CompareReport compare_variants(const ExperimentConfig& cfg, const Scenario& scenario,
                               Variant a, Variant b);

std::string format_compare(const CompareReport& report);

}  // namespace slamkit
