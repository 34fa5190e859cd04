#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "slamkit/core.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

struct PsoOptions {
  int max_iters = 10;
  // Per-observation stop threshold (95% chi-square with 2 dof); the
  // effective threshold is this value times the observation count.
  double fitness_threshold = 5.99;
  bool enabled = true;
};

/// Swarm over pose space. Positions start at the particle poses with zero
/// velocities; pbest/gbest track the best fitness seen so far.
struct SwarmState {
  std::vector<Pose> positions;
  std::vector<std::array<double, 3>> velocities;  // (x, y, phi) components
  std::vector<Pose> pbest_pose;
  std::vector<double> pbest_fitness;
  Pose gbest_pose;
  double gbest_fitness = 0.0;
};

/// Fitness of a swarm member: first argument is the member index (fitness is
/// evaluated against that particle's own landmark map), second its candidate pose.
using SwarmFitnessFn = std::function<double(std::size_t, const Pose&)>;

/// Sum over the applicable observations of the innovation Mahalanobis
/// distance (z - zhat)^T Z^-1 (z - zhat), bearing residuals wrapped.
/// Observations of landmarks absent from the map carry no prior and are
/// skipped; no applicable observation gives 0.
double fitness(const Pose& pose, const LandmarkMap& landmarks,
               std::span<const Observation> obs, const Mat2& r_mat);

/// Builds a swarm from starting poses, evaluating initial fitness per member.
SwarmState make_swarm(std::span<const Pose> start, const SwarmFitnessFn& evaluate);

/// One Gaussian velocity/position update: per member, per dimension,
/// v = |randn| (pbest - x) + |randn| (gbest - x) with independent draws,
/// then x += v. Heading differences and the updated heading are wrapped.
/// pbest/gbest are updated after all members moved; gbest never worsens.
void gaussian_pso_step(SwarmState& s, const SwarmFitnessFn& evaluate, RandomStream& rng);

struct RefineResult {
  std::vector<Pose> poses;  // aligned with the input particles
  int iterations = 0;
  double gbest_fitness = 0.0;
};

/// Moves particle poses toward the high-likelihood region of the current
/// scan. Iterates Gaussian swarm steps until the best fitness drops below
/// threshold * |obs| or max_iters is reached. Only poses change; landmark
/// maps and weights are untouched.
RefineResult pso_refine(std::span<const Particle> particles, std::span<const Observation> obs,
                        const Mat2& r_mat, const PsoOptions& opts, RandomStream& rng);

}  // namespace slamkit
