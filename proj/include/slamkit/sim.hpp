#pragma once

#include <string>
#include <vector>

#include "slamkit/core.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

/// World description: landmark field, waypoint course, vehicle and noise
/// parameters. Loaded from a scenario file; see load_scenario.
struct Scenario {
  std::vector<Vec2> landmarks;
  std::vector<Vec2> waypoints;
  VehicleParams vehicle;
  NoiseConfig noise;
  double commanded_speed = 3.0;  // m/s
  double waypoint_radius = 1.0;  // m, switch distance
  int loops = 1;                 // traversals of the waypoint list

  void validate() const {
    vehicle.validate();
    noise.validate();
    if (landmarks.empty()) throw std::invalid_argument("Scenario: needs at least one landmark");
    if (waypoints.size() < 2) throw std::invalid_argument("Scenario: needs at least two waypoints");
    if (!(commanded_speed > 0.0)) throw std::invalid_argument("Scenario: speed must be positive");
    if (!(waypoint_radius > 0.0)) throw std::invalid_argument("Scenario: waypoint_radius must be positive");
    if (loops < 1) throw std::invalid_argument("Scenario: loops must be >= 1");
  }
};

struct SimState {
  Pose true_pose;
  int waypoint_index = 0;
  int lap = 0;
  long step = 0;
  bool terminal = false;
};

/// Waypoint-following controller: full commanded speed, steer clamped toward
/// the current waypoint. Advances the waypoint index (wrapping across laps)
/// once the vehicle is inside the switch radius; sets `terminal` after the
/// last waypoint of the last lap.
ControlInput control_step(SimState& sim, const Scenario& sc);

/// Executes the control with actuation noise drawn from the scenario's
/// process noise and advances the true pose one step.
void advance_truth(SimState& sim, const ControlInput& u, const Scenario& sc, RandomStream& rng);

/// Range-bearing scan: landmarks within sensor range and the frontal field
/// of view (gated on true geometry, before noise) are returned with additive
/// Gaussian measurement noise. The landmark index is the association.
std::vector<Observation> sense(const SimState& sim, const Scenario& sc, RandomStream& rng);

/// Reads a scenario from a JSON file (keys: landmarks, waypoints, wheelbase,
/// dt_control, obs_period_steps, max_steer_deg, sensor_range, sensor_fov_deg,
/// speed, sigma_v, sigma_gamma_deg, sigma_r, sigma_theta_deg, loops,
/// waypoint_radius).
Scenario load_scenario(const std::string& path);

}  // namespace slamkit
