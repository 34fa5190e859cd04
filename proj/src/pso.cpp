#include "slamkit/pso.hpp"

#include <cmath>
#include <limits>

#include "slamkit/models.hpp"

namespace slamkit {

double fitness(const Pose& pose, const LandmarkMap& landmarks,
               std::span<const Observation> obs, const Mat2& r_mat) {
  double total = 0.0;
  for (const Observation& z : obs) {
    const auto it = landmarks.find(z.landmark_id);
    if (it == landmarks.end()) continue;  // no prior yet
    const LandmarkEstimate& lm = it->second;
    const RangeBearing zhat = predict_observation(pose, lm.mean);
    const Mat2 g = obs_jacobian_landmark(pose, lm.mean);
    const Mat2 innov_cov = (g * lm.cov * g.transpose() + r_mat).symmetrized();
    const Mat2 inv = checked_spd_inverse(innov_cov);
    const Vec2 r{z.range - zhat.range, wrap_angle(z.bearing - zhat.bearing)};
    total += r.dot(inv * r);
  }
  return total;
}

SwarmState make_swarm(std::span<const Pose> start, const SwarmFitnessFn& evaluate) {
  SwarmState s;
  const std::size_t n = start.size();
  s.positions.assign(start.begin(), start.end());
  s.velocities.assign(n, {0.0, 0.0, 0.0});
  s.pbest_pose = s.positions;
  s.pbest_fitness.resize(n);
  s.gbest_fitness = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    s.pbest_fitness[i] = evaluate(i, s.positions[i]);
    if (s.pbest_fitness[i] < s.gbest_fitness) {
      s.gbest_fitness = s.pbest_fitness[i];
      s.gbest_pose = s.positions[i];
    }
  }
  return s;
}

void gaussian_pso_step(SwarmState& s, const SwarmFitnessFn& evaluate, RandomStream& rng) {
  const std::size_t n = s.positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    Pose& x = s.positions[i];
    auto& v = s.velocities[i];
    const Pose& p = s.pbest_pose[i];
    const Pose& g = s.gbest_pose;

    // Draw order is fixed (pbest term then gbest term, per dimension) so a
    // seeded stream reproduces the same trajectory.
    v[0] = std::abs(rng.gauss()) * (p.x - x.x) + std::abs(rng.gauss()) * (g.x - x.x);
    v[1] = std::abs(rng.gauss()) * (p.y - x.y) + std::abs(rng.gauss()) * (g.y - x.y);
    v[2] = std::abs(rng.gauss()) * wrap_angle(p.phi - x.phi) +
           std::abs(rng.gauss()) * wrap_angle(g.phi - x.phi);

    x.x += v[0];
    x.y += v[1];
    x.phi = wrap_angle(x.phi + v[2]);
  }

  // Best-so-far reduction is a single synchronization point after all moves.
  for (std::size_t i = 0; i < n; ++i) {
    const double f = evaluate(i, s.positions[i]);
    if (f < s.pbest_fitness[i]) {
      s.pbest_fitness[i] = f;
      s.pbest_pose[i] = s.positions[i];
    }
    if (f < s.gbest_fitness) {
      s.gbest_fitness = f;
      s.gbest_pose = s.positions[i];
    }
  }
}

RefineResult pso_refine(std::span<const Particle> particles, std::span<const Observation> obs,
                        const Mat2& r_mat, const PsoOptions& opts, RandomStream& rng) {
  RefineResult out;
  out.poses.reserve(particles.size());
  for (const Particle& p : particles) out.poses.push_back(p.pose);
  if (!opts.enabled) {
    out.gbest_fitness = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const SwarmFitnessFn evaluate = [&](std::size_t i, const Pose& pose) {
    return fitness(pose, particles[i].landmarks, obs, r_mat);
  };

  SwarmState swarm = make_swarm(out.poses, evaluate);
  const double threshold = opts.fitness_threshold * static_cast<double>(obs.size());
  while (swarm.gbest_fitness >= threshold && out.iterations < opts.max_iters) {
    gaussian_pso_step(swarm, evaluate, rng);
    ++out.iterations;
  }

  out.poses = swarm.positions;
  out.gbest_fitness = swarm.gbest_fitness;
  return out;
}

}  // namespace slamkit
