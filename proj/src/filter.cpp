#include "slamkit/filter.hpp"

#include <algorithm>
#include <cmath>

#include "slamkit/ekf_landmark.hpp"
#include "slamkit/models.hpp"

namespace slamkit {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::pso: return "pso";
    case Variant::pso_anfis: return "pso_anfis";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "pso") return Variant::pso;
  if (name == "pso_anfis") return Variant::pso_anfis;
  throw std::invalid_argument("unknown variant: " + name);
}

FilterState make_filter_state(const FilterConfig& cfg, const Pose& initial) {
  cfg.validate();
  FilterState state;
  state.particles.resize(cfg.num_particles);
  const double w = 1.0 / cfg.num_particles;
  for (Particle& p : state.particles) {
    p.pose = initial;
    p.weight = w;
  }
  if (cfg.variant == Variant::pso_anfis)
    state.adaptive_r = make_adaptive_r(cfg.r_initial, cfg.anfis_config);
  return state;
}

void predict(FilterState& state, const ControlInput& u, const NoiseConfig& n,
             const VehicleParams& p, RandomStream& rng) {
  for (Particle& particle : state.particles)
    particle.pose = sample_motion(particle.pose, u, n, p, rng);
}

double likelihood(const Particle& particle, std::span<const Observation> obs,
                  const Mat2& r_mat) {
  double density = 1.0;
  for (const Observation& z : obs) {
    const auto it = particle.landmarks.find(z.landmark_id);
    if (it == particle.landmarks.end()) continue;  // handled by map update
    const LandmarkEstimate& lm = it->second;
    const RangeBearing zhat = predict_observation(particle.pose, lm.mean);
    const Mat2 g = obs_jacobian_landmark(particle.pose, lm.mean);
    const Mat2 innov_cov = (g * lm.cov * g.transpose() + r_mat).symmetrized();
    const Mat2 inv = checked_spd_inverse(innov_cov);
    const Vec2 r{z.range - zhat.range, wrap_angle(z.bearing - zhat.bearing)};
    const double mahal = r.dot(inv * r);
    density *= std::exp(-0.5 * mahal) / (2.0 * kPi * std::sqrt(innov_cov.det()));
  }
  return density;
}

namespace {

bool uses_weight_replacement(const FilterConfig& cfg) {
  // Replacement weighting belongs to the refined proposal; with refinement
  // disabled the modified variants reduce exactly to the baseline.
  return cfg.variant != Variant::baseline && cfg.pso_opts.enabled;
}

}  // namespace

void weight_update(FilterState& state, std::span<const Observation> obs, const Mat2& r_mat,
                   const FilterConfig& cfg) {
  const bool replace = uses_weight_replacement(cfg);
  double total = 0.0;
  for (Particle& p : state.particles) {
    const double l = likelihood(p, obs, r_mat);
    p.weight = replace ? l : p.weight * l;
    total += p.weight;
  }
  if (!(total >= 1e-300) || !std::isfinite(total)) {
    const double w = 1.0 / state.particles.size();
    for (Particle& p : state.particles) p.weight = w;
    ++state.degenerate_epochs;
    return;
  }
  for (Particle& p : state.particles) p.weight /= total;
}

double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("effective_sample_size: weights must sum to 1");
  return 1.0 / sum_sq;
}

void resample_systematic(FilterState& state, RandomStream& rng) {
  const std::size_t m = state.particles.size();
  const double step_size = 1.0 / static_cast<double>(m);
  const double start = rng.uniform() * step_size;

  std::vector<Particle> next;
  next.reserve(m);
  double cumulative = state.particles[0].weight;
  std::size_t i = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double u = start + static_cast<double>(k) * step_size;
    while (u > cumulative && i + 1 < m) {
      ++i;
      cumulative += state.particles[i].weight;
    }
    next.push_back(state.particles[i]);  // deep copy, maps included
    next.back().weight = step_size;
  }
  state.particles = std::move(next);
}

namespace {

std::size_t best_particle_index(const FilterState& state) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.particles.size(); ++i)
    if (state.particles[i].weight > state.particles[best].weight) best = i;
  return best;
}

// Feeds the best particle's innovations for this scan into the adaptive-R
// state. The theoretical covariance is the particle's pre-update innovation
// covariance under the R that was used for weighting. Epochs whose mismatch
// falls outside the membership support are skipped rather than aborting the run.
void feed_adaptation(FilterState& state, const Particle& best,
                     std::span<const Observation> obs, const Mat2& r_mat) {
  for (const Observation& z : obs) {
    const auto it = best.landmarks.find(z.landmark_id);
    if (it == best.landmarks.end()) continue;
    const LandmarkEstimate& lm = it->second;
    const RangeBearing zhat = predict_observation(best.pose, lm.mean);
    const Mat2 g = obs_jacobian_landmark(best.pose, lm.mean);
    const Mat2 innov_cov = (g * lm.cov * g.transpose() + r_mat).symmetrized();
    const Vec2 innovation{z.range - zhat.range, wrap_angle(z.bearing - zhat.bearing)};
    try {
      adapt_r(*state.adaptive_r, innovation, innov_cov);
    } catch (const DegenerateActivationError&) {
      ++state.skipped_adaptations;
    }
  }
}

void update_maps(FilterState& state, std::span<const Observation> obs, const Mat2& r_mat) {
  for (Particle& p : state.particles) {
    for (const Observation& z : obs) {
      auto it = p.landmarks.find(z.landmark_id);
      if (it == p.landmarks.end()) {
        p.landmarks.emplace(z.landmark_id, init_landmark(p.pose, z, r_mat));
      } else {
        it->second = update_landmark(it->second, p.pose, z, r_mat).estimate;
      }
    }
  }
}

}  // namespace

Mat2 current_r(const FilterState& state, const FilterConfig& cfg) {
  if (cfg.variant == Variant::pso_anfis && state.adaptive_r)
    return state.adaptive_r->r_current;
  return cfg.r_initial;
}

void step(FilterState& state, const ControlInput& u,
          std::optional<std::span<const Observation>> obs, const FilterConfig& cfg,
          const NoiseConfig& n, const VehicleParams& p, RandomStream& rng) {
  state.last_resampled = false;
  state.last_pso_iters = 0;
  state.last_gbest_fitness = std::numeric_limits<double>::quiet_NaN();

  predict(state, u, n, p, rng);
  if (!obs.has_value() || obs->empty()) {
    std::vector<double> current;
    current.reserve(state.particles.size());
    for (const Particle& particle : state.particles) current.push_back(particle.weight);
    state.last_neff = effective_sample_size(current);
    ++state.step_count;
    return;
  }
  const std::span<const Observation> scan = *obs;
  const Mat2 r_mat = current_r(state, cfg);

  if (cfg.variant != Variant::baseline && cfg.pso_opts.enabled) {
    RefineResult refined = pso_refine(state.particles, scan, r_mat, cfg.pso_opts, rng);
    for (std::size_t i = 0; i < state.particles.size(); ++i)
      state.particles[i].pose = refined.poses[i];
    state.last_pso_iters = refined.iterations;
    state.last_gbest_fitness = refined.gbest_fitness;
  }

  weight_update(state, scan, r_mat, cfg);

  if (cfg.variant == Variant::pso_anfis)
    feed_adaptation(state, state.particles[best_particle_index(state)], scan, r_mat);

  update_maps(state, scan, current_r(state, cfg));

  std::vector<double> weights;
  weights.reserve(state.particles.size());
  for (const Particle& particle : state.particles) weights.push_back(particle.weight);
  const double neff = effective_sample_size(weights);
  state.last_neff = neff;
  if (neff < cfg.resample_fraction * static_cast<double>(state.particles.size())) {
    resample_systematic(state, rng);
    state.last_resampled = true;
  }
  ++state.step_count;
}

Estimate estimate(const FilterState& state) {
  Estimate out;
  double sx = 0.0, sy = 0.0, ssin = 0.0, scos = 0.0;
  for (const Particle& p : state.particles) {
    sx += p.weight * p.pose.x;
    sy += p.weight * p.pose.y;
    ssin += p.weight * std::sin(p.pose.phi);
    scos += p.weight * std::cos(p.pose.phi);
  }
  out.pose = {sx, sy, wrap_angle(std::atan2(ssin, scos))};

  const Particle& best = state.particles[best_particle_index(state)];
  out.landmarks.assign(best.landmarks.begin(), best.landmarks.end());
  return out;
}

std::array<double, 3> pose_variance(const FilterState& state) {
  const Estimate est = estimate(state);
  std::array<double, 3> var{0.0, 0.0, 0.0};
  for (const Particle& p : state.particles) {
    const double dx = p.pose.x - est.pose.x;
    const double dy = p.pose.y - est.pose.y;
    const double dphi = wrap_angle(p.pose.phi - est.pose.phi);
    var[0] += p.weight * dx * dx;
    var[1] += p.weight * dy * dy;
    var[2] += p.weight * dphi * dphi;
  }
  return var;
}

}  // namespace slamkit
