#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slamkit/anfis.hpp"
#include "slamkit/core.hpp"
#include "slamkit/pso.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

enum class Variant { baseline, pso, pso_anfis };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct FilterConfig {
  int num_particles = 20;
  Variant variant = Variant::baseline;
  double resample_fraction = 0.75;  // resample when N_eff < fraction * M
  PsoOptions pso_opts;
  Mat2 r_initial = Mat2::diagonal(0.04, deg2rad(1.0) * deg2rad(1.0));
  AdaptiveRConfig anfis_config;

  void validate() const {
    if (num_particles < 1) throw std::invalid_argument("FilterConfig: num_particles must be >= 1");
    if (!(resample_fraction > 0.0 && resample_fraction <= 1.0))
      throw std::invalid_argument("FilterConfig: resample_fraction must be in (0, 1]");
  }
};

struct FilterState {
  std::vector<Particle> particles;
  std::optional<AdaptiveR> adaptive_r;
  long step_count = 0;

  // Per-epoch diagnostics.
  bool last_resampled = false;
  double last_neff = std::numeric_limits<double>::quiet_NaN();  // pre-resample
  int last_pso_iters = 0;
  double last_gbest_fitness = std::numeric_limits<double>::quiet_NaN();
  int degenerate_epochs = 0;
  int skipped_adaptations = 0;
};

/// All particles at the initial pose with uniform weights and empty maps;
/// the adaptive-R state is created for the pso_anfis variant.
FilterState make_filter_state(const FilterConfig& cfg, const Pose& initial);

/// Moves every particle through the motion model with an independent noise
/// draw. Weights and maps are untouched.
void predict(FilterState& state, const ControlInput& u, const NoiseConfig& n,
             const VehicleParams& p, RandomStream& rng);

/// Product over the known observed features of the bivariate Gaussian
/// density of the innovation (normalizer 1/(2 pi sqrt(|Z|))). Observations
/// of unseen landmarks are skipped; no applicable feature gives 1.
double likelihood(const Particle& particle, std::span<const Observation> obs,
                  const Mat2& r_mat);

/// Recomputes importance weights from the scan and normalizes them to sum 1.
/// The baseline multiplies the prior weights by the likelihood; the modified
/// variants replace the weight with the likelihood when refinement is
/// enabled (and reduce to the baseline rule when it is disabled). A total
/// mass below 1e-300 resets to uniform and counts a degenerate epoch.
void weight_update(FilterState& state, std::span<const Observation> obs, const Mat2& r_mat,
                   const FilterConfig& cfg);

/// N_eff = 1 / sum(w_i^2). Weights must already be normalized.
double effective_sample_size(std::span<const double> weights);

/// Low-variance systematic resampling from a single uniform draw. Particle
/// count is preserved, weights reset to 1/M, maps deep-copied on duplication.
void resample_systematic(FilterState& state, RandomStream& rng);

/// One filter epoch: predict; and when a scan is present, refine (modified
/// variants), weight, adapt R (pso_anfis), update the per-particle maps, and
/// resample when N_eff falls below the threshold.
void step(FilterState& state, const ControlInput& u,
          std::optional<std::span<const Observation>> obs, const FilterConfig& cfg,
          const NoiseConfig& n, const VehicleParams& p, RandomStream& rng);

struct Estimate {
  Pose pose;
  std::vector<std::pair<int, LandmarkEstimate>> landmarks;
};

/// Point estimate: weighted mean position, circular weighted mean heading,
/// and the map of the highest-weight particle.
Estimate estimate(const FilterState& state);

/// Weighted sample variance of the particle poses per component (x, y, phi);
/// heading deviations are wrapped about the circular mean.
std::array<double, 3> pose_variance(const FilterState& state);

/// R matrix the filter currently applies (adapted when running pso_anfis).
Mat2 current_r(const FilterState& state, const FilterConfig& cfg);

}  // namespace slamkit
