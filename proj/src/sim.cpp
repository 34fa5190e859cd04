#include "slamkit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "slamkit/models.hpp"

namespace slamkit {

ControlInput control_step(SimState& sim, const Scenario& sc) {
  if (sim.terminal) throw std::logic_error("control_step: simulation already terminal");

  const auto& wps = sc.waypoints;
  Vec2 target = wps[sim.waypoint_index];
  const Vec2 pos{sim.true_pose.x, sim.true_pose.y};
  if ((target - pos).norm() < sc.waypoint_radius) {
    ++sim.waypoint_index;
    if (sim.waypoint_index >= static_cast<int>(wps.size())) {
      ++sim.lap;
      if (sim.lap >= sc.loops) {
        sim.terminal = true;
        sim.waypoint_index = static_cast<int>(wps.size()) - 1;
        return {0.0, 0.0};
      }
      sim.waypoint_index = 0;
    }
    target = wps[sim.waypoint_index];
  }

  const double desired = wrap_angle(std::atan2(target.y - sim.true_pose.y,
                                               target.x - sim.true_pose.x) -
                                    sim.true_pose.phi);
  const double gamma = std::clamp(desired, -sc.vehicle.max_steer, sc.vehicle.max_steer);
  return {sc.commanded_speed, gamma};
}

void advance_truth(SimState& sim, const ControlInput& u, const Scenario& sc, RandomStream& rng) {
  sim.true_pose = sample_motion(sim.true_pose, u, sc.noise, sc.vehicle, rng);
  ++sim.step;
}

std::vector<Observation> sense(const SimState& sim, const Scenario& sc, RandomStream& rng) {
  std::vector<Observation> out;
  for (std::size_t id = 0; id < sc.landmarks.size(); ++id) {
    const RangeBearing truth = predict_observation(sim.true_pose, sc.landmarks[id]);
    if (truth.range > sc.vehicle.sensor_max_range) continue;
    if (std::abs(truth.bearing) > 0.5 * sc.vehicle.sensor_fov) continue;
    Observation z;
    z.range = std::max(1e-6, truth.range + rng.gauss(sc.noise.sigma_r));
    z.bearing = wrap_angle(truth.bearing + rng.gauss(sc.noise.sigma_theta));
    z.landmark_id = static_cast<int>(id);
    out.push_back(z);
  }
  return out;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  nlohmann::json j;
  in >> j;

  Scenario sc;
  sc.landmarks.clear();
  for (const auto& lm : j.at("landmarks"))
    sc.landmarks.push_back({lm.at(0).get<double>(), lm.at(1).get<double>()});
  sc.waypoints.clear();
  for (const auto& wp : j.at("waypoints"))
    sc.waypoints.push_back({wp.at(0).get<double>(), wp.at(1).get<double>()});

  sc.vehicle.wheelbase_b = j.at("wheelbase").get<double>();
  sc.vehicle.dt_control = j.at("dt_control").get<double>();
  sc.vehicle.obs_period_steps = j.at("obs_period_steps").get<int>();
  sc.vehicle.max_steer = deg2rad(j.at("max_steer_deg").get<double>());
  sc.vehicle.sensor_max_range = j.at("sensor_range").get<double>();
  sc.vehicle.sensor_fov = deg2rad(j.at("sensor_fov_deg").get<double>());

  sc.noise.sigma_v = j.at("sigma_v").get<double>();
  sc.noise.sigma_gamma = deg2rad(j.at("sigma_gamma_deg").get<double>());
  sc.noise.sigma_r = j.at("sigma_r").get<double>();
  sc.noise.sigma_theta = deg2rad(j.at("sigma_theta_deg").get<double>());

  sc.commanded_speed = j.at("speed").get<double>();
  sc.loops = j.at("loops").get<int>();
  sc.waypoint_radius = j.at("waypoint_radius").get<double>();

  sc.validate();
  return sc;
}

}  // namespace slamkit
