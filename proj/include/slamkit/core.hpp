#pragma once

#include <cmath>
#include <map>
#include <stdexcept>

namespace slamkit {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

/// Normalizes an angle to (-pi, pi]. The interval is half-open at -pi so
/// equality checks at the boundary are unambiguous; values already inside
/// the interval pass through bit-exact.
inline double wrap_angle(double a) {
  if (!std::isfinite(a)) throw std::domain_error("wrap_angle: non-finite angle");
  if (a > -kPi && a <= kPi) return a;
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Row-major 2x2 matrix. Everything the filters need (inverse, determinant,
/// eigenvalue bound) is closed-form; no general linear algebra involved.
struct Mat2 {
  double m00 = 0.0, m01 = 0.0;
  double m10 = 0.0, m11 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diagonal(double a, double b) { return {a, 0.0, 0.0, b}; }

  Mat2 operator+(const Mat2& o) const {
    return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
  }
  Mat2 operator-(const Mat2& o) const {
    return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
  }
  Mat2 operator*(const Mat2& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
  Vec2 operator*(const Vec2& v) const {
    return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y};
  }
  Mat2 operator*(double s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }

  Mat2 transpose() const { return {m00, m10, m01, m11}; }
  double det() const { return m00 * m11 - m01 * m10; }
  double trace() const { return m00 + m11; }

  Mat2 inverse() const {
    const double d = det();
    return {m11 / d, -m01 / d, -m10 / d, m00 / d};
  }

  Mat2 symmetrized() const {
    const double c = 0.5 * (m01 + m10);
    return {m00, c, c, m11};
  }

  /// Smallest eigenvalue; valid for symmetric matrices only.
  double min_eigenvalue() const {
    const double mean = 0.5 * (m00 + m11);
    const double r = std::hypot(0.5 * (m00 - m11), m01);
    return mean - r;
  }

  bool is_symmetric(double tol) const { return std::abs(m01 - m10) <= tol; }
};

inline Mat2 outer(const Vec2& a, const Vec2& b) {
  return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}

/// Inverts an innovation covariance, rejecting matrices that are singular
/// relative to their own scale (condition beyond ~1e12) or not positive
/// definite. The relative test keeps the guard meaningful across noise
/// scales from near-noiseless to meters.
inline Mat2 checked_spd_inverse(const Mat2& z) {
  const double d = z.det();
  const double scale = 0.5 * z.trace();
  if (!(d > 1e-300) || d <= 1e-12 * scale * scale)
    throw std::runtime_error("innovation covariance is singular");
  return z.inverse();
}

struct Pose {
  double x = 0.0;    // meters
  double y = 0.0;    // meters
  double phi = 0.0;  // heading, kept in (-pi, pi] by every producer
};

struct ControlInput {
  double v = 0.0;      // m/s
  double gamma = 0.0;  // steer angle, radians
};

struct Observation {
  double range = 0.0;    // meters, > 0
  double bearing = 0.0;  // radians in (-pi, pi], relative to heading
  int landmark_id = -1;  // association is known
};

/// Gaussian estimate of one landmark. The covariance is symmetrized on
/// construction so (cov + cov^T)/2 == cov holds exactly afterwards.
struct LandmarkEstimate {
  Vec2 mean;
  Mat2 cov;

  LandmarkEstimate() = default;
  LandmarkEstimate(const Vec2& m, const Mat2& c) : mean(m), cov(c.symmetrized()) {}
};

using LandmarkMap = std::map<int, LandmarkEstimate>;

struct Particle {
  Pose pose;
  double weight = 0.0;
  LandmarkMap landmarks;
};

/// Process and measurement noise as standard deviations; the diagonal
/// matrices Q and R are materialized on demand.
struct NoiseConfig {
  double sigma_v = 0.3;                  // m/s
  double sigma_gamma = deg2rad(3.0);     // rad
  double sigma_r = 0.2;                  // m
  double sigma_theta = deg2rad(1.0);     // rad

  Mat2 q_matrix() const { return Mat2::diagonal(sigma_v * sigma_v, sigma_gamma * sigma_gamma); }
  Mat2 r_matrix() const { return Mat2::diagonal(sigma_r * sigma_r, sigma_theta * sigma_theta); }

  void validate() const {
    if (!(sigma_v > 0.0 && sigma_gamma > 0.0 && sigma_r > 0.0 && sigma_theta > 0.0))
      throw std::invalid_argument("NoiseConfig: all standard deviations must be positive");
  }
};

struct VehicleParams {
  double wheelbase_b = 4.0;            // meters
  double dt_control = 0.025;           // seconds (40 Hz control)
  int obs_period_steps = 8;            // control steps per observation scan (5 Hz)
  double max_steer = deg2rad(30.0);    // rad
  double sensor_max_range = 20.0;      // meters
  double sensor_fov = kPi;             // frontal field of view, radians

  void validate() const {
    if (!(wheelbase_b > 0.0 && dt_control > 0.0 && max_steer > 0.0 &&
          sensor_max_range > 0.0 && sensor_fov > 0.0))
      throw std::invalid_argument("VehicleParams: all parameters must be positive");
    if (obs_period_steps < 1)
      throw std::invalid_argument("VehicleParams: obs_period_steps must be >= 1");
  }
};

}  // namespace slamkit
