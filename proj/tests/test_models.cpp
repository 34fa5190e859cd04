#include <doctest.h>

#include <cmath>

#include "slamkit/models.hpp"
#include "test_support.hpp"

using namespace slamkit;

namespace {

const VehicleParams kVehicle{};  // 4 m wheelbase, dt 0.025 s

// Central finite differences of predict_observation wrt the landmark,
// bearing differences wrapped.
testsup::M2 fd_obs_jacobian(const Pose& pose, const Vec2& lm) {
  const double h = 1e-6;
  testsup::M2 j{};
  for (int c = 0; c < 2; ++c) {
    Vec2 hi = lm, lo = lm;
    (c == 0 ? hi.x : hi.y) += h;
    (c == 0 ? lo.x : lo.y) -= h;
    const RangeBearing zh = predict_observation(pose, hi);
    const RangeBearing zl = predict_observation(pose, lo);
    j[0][c] = (zh.range - zl.range) / (2.0 * h);
    j[1][c] = wrap_angle(zh.bearing - zl.bearing) / (2.0 * h);
  }
  return j;
}

testsup::M2 as_array(const Mat2& m) {
  return {{{m.m00, m.m01}, {m.m10, m.m11}}};
}

double rel_frobenius_error(const testsup::M2& a, const testsup::M2& b) {
  testsup::M2 d{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d[i][j] = a[i][j] - b[i][j];
  return testsup::frobenius(d) / testsup::frobenius(b);
}

}  // namespace

TEST_CASE("motion_step examples") {
  const Pose origin{0.0, 0.0, 0.0};

  SUBCASE("no motion") {
    const Pose p = motion_step(origin, {0.0, 0.0}, 0.0, 0.0, kVehicle);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.phi == 0.0);
  }

  SUBCASE("straight line at 3 m/s covers dt*V") {
    const Pose p = motion_step(origin, {3.0, 0.0}, 0.0, 0.0, kVehicle);
    CHECK(p.x == doctest::Approx(0.075).epsilon(1e-15));
    CHECK(p.y == 0.0);
    CHECK(p.phi == 0.0);
  }

  SUBCASE("30 degree steer, hand-evaluated Euler step") {
    const double gamma = deg2rad(30.0);
    const Pose p = motion_step(origin, {3.0, gamma}, 0.0, 0.0, kVehicle);
    // Independent evaluation of the same kinematics.
    CHECK(p.x == doctest::Approx(0.025 * 3.0 * std::cos(gamma)).epsilon(1e-14));
    CHECK(p.y == doctest::Approx(0.025 * 3.0 * std::sin(gamma)).epsilon(1e-14));
    CHECK(p.phi == doctest::Approx(0.025 * (3.0 / 4.0) * std::sin(gamma)).epsilon(1e-14));
    CHECK(p.phi == doctest::Approx(0.009375).epsilon(1e-12));
  }

  SUBCASE("non-finite input is rejected") {
    CHECK_THROWS_AS(motion_step(origin, {std::nan(""), 0.0}, 0.0, 0.0, kVehicle),
                    std::domain_error);
  }
}

TEST_CASE("motion_step with zero steer preserves heading exactly") {
  Pose p{1.0, -2.0, 0.7};
  for (int i = 0; i < 100; ++i) p = motion_step(p, {2.5, 0.0}, 0.0, 0.0, kVehicle);
  CHECK(p.phi == 0.7);
}

TEST_CASE("sample_motion") {
  const Pose origin{0.0, 0.0, 0.0};

  SUBCASE("vanishing noise approaches the deterministic step") {
    NoiseConfig n;
    n.sigma_v = 1e-12;
    n.sigma_gamma = 1e-12;
    RandomStream rng(3);
    const Pose p = sample_motion(origin, {3.0, 0.0}, n, kVehicle, rng);
    CHECK(p.x == doctest::Approx(0.075).epsilon(1e-9));
    CHECK(std::abs(p.y) < 1e-9);
  }

  SUBCASE("Monte Carlo mean matches the noiseless step") {
    NoiseConfig n;  // sigma_v = 0.3
    // Small steer noise keeps the E[cos(dgamma)] bias far below the
    // sampling error, so the noiseless step is the correct mean.
    n.sigma_gamma = deg2rad(0.3);
    RandomStream rng(11);
    const int samples = 100000;
    double sum_x = 0.0;
    double sum_x2 = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double x = sample_motion(origin, {3.0, 0.0}, n, kVehicle, rng).x;
      sum_x += x;
      sum_x2 += x * x;
    }
    const double mean_x = sum_x / samples;
    const double var_x = sum_x2 / samples - mean_x * mean_x;
    const double se = std::sqrt(var_x / samples);
    CHECK(std::abs(mean_x - 0.075) < 3.0 * se);
  }

  SUBCASE("fixed seed reproduces the draw") {
    NoiseConfig n;
    RandomStream a(42), b(42);
    const Pose pa = sample_motion(origin, {3.0, 0.1}, n, kVehicle, a);
    const Pose pb = sample_motion(origin, {3.0, 0.1}, n, kVehicle, b);
    CHECK(pa.x == pb.x);
    CHECK(pa.y == pb.y);
    CHECK(pa.phi == pb.phi);
  }
}

TEST_CASE("predict_observation examples") {
  CHECK_THROWS_AS(predict_observation({1.0, 2.0, 0.0}, {1.0, 2.0}), std::domain_error);

  const RangeBearing a = predict_observation({0.0, 0.0, 0.0}, {3.0, 4.0});
  CHECK(a.range == doctest::Approx(5.0));
  CHECK(a.bearing == doctest::Approx(std::atan2(4.0, 3.0)));

  const RangeBearing b = predict_observation({0.0, 0.0, 0.0}, {1.0, 0.0});
  CHECK(b.range == doctest::Approx(1.0));
  CHECK(b.bearing == 0.0);

  const RangeBearing c = predict_observation({1.0, 1.0, kPi / 2.0}, {1.0, 3.0});
  CHECK(c.range == doctest::Approx(2.0));
  CHECK(c.bearing == doctest::Approx(0.0));
}

TEST_CASE("obs_jacobian_landmark examples and finite-difference agreement") {
  const Mat2 j1 = obs_jacobian_landmark({0.0, 0.0, 0.0}, {1.0, 0.0});
  CHECK(j1.m00 == doctest::Approx(1.0));
  CHECK(j1.m01 == doctest::Approx(0.0));
  CHECK(j1.m10 == doctest::Approx(0.0));
  CHECK(j1.m11 == doctest::Approx(1.0));

  const Mat2 j2 = obs_jacobian_landmark({0.0, 0.0, 0.0}, {0.0, 2.0});
  CHECK(j2.m00 == doctest::Approx(0.0));
  CHECK(j2.m01 == doctest::Approx(1.0));
  CHECK(j2.m10 == doctest::Approx(-0.5));
  CHECK(j2.m11 == doctest::Approx(0.0));
  CHECK(rel_frobenius_error(as_array(j2), fd_obs_jacobian({0.0, 0.0, 0.0}, {0.0, 2.0})) <
        1e-6);

  RandomStream rng(5);
  for (int i = 0; i < 100; ++i) {
    const Pose pose{(rng.uniform() - 0.5) * 50.0, (rng.uniform() - 0.5) * 50.0,
                    wrap_angle((rng.uniform() - 0.5) * 6.0)};
    const double range = 0.5 + rng.uniform() * 19.5;
    const double angle = rng.uniform() * 2.0 * kPi;
    const Vec2 lm{pose.x + range * std::cos(angle), pose.y + range * std::sin(angle)};
    const Mat2 j = obs_jacobian_landmark(pose, lm);
    CHECK(rel_frobenius_error(as_array(j), fd_obs_jacobian(pose, lm)) < 1e-6);
  }
}

TEST_CASE("inverse_observation examples and round trip") {
  const InverseObservation inv = inverse_observation({0.0, 0.0, 0.0}, {5.0, 0.927295218, 0});
  CHECK(inv.landmark.x == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(inv.landmark.y == doctest::Approx(4.0).epsilon(1e-8));

  CHECK_THROWS_AS(inverse_observation({0.0, 0.0, 0.0}, {0.0, 0.1, 0}), std::domain_error);

  RandomStream rng(9);
  for (int i = 0; i < 100; ++i) {
    const Pose pose{(rng.uniform() - 0.5) * 20.0, (rng.uniform() - 0.5) * 20.0,
                    wrap_angle((rng.uniform() - 0.5) * 6.0)};
    Observation z;
    z.range = 0.5 + rng.uniform() * 19.5;
    z.bearing = wrap_angle((rng.uniform() - 0.5) * 2.0 * kPi);

    const InverseObservation io = inverse_observation(pose, z);
    const RangeBearing back = predict_observation(pose, io.landmark);
    CHECK(std::abs(back.range - z.range) < 1e-9);
    CHECK(std::abs(wrap_angle(back.bearing - z.bearing)) < 1e-9);

    // Finite differences wrt (range, bearing).
    const double h = 1e-7;
    testsup::M2 fd{};
    for (int c = 0; c < 2; ++c) {
      Observation hi = z, lo = z;
      (c == 0 ? hi.range : hi.bearing) += h;
      (c == 0 ? lo.range : lo.bearing) -= h;
      const Vec2 lh = inverse_observation(pose, hi).landmark;
      const Vec2 ll = inverse_observation(pose, lo).landmark;
      fd[0][c] = (lh.x - ll.x) / (2.0 * h);
      fd[1][c] = (lh.y - ll.y) / (2.0 * h);
    }
    CHECK(rel_frobenius_error(as_array(io.jac_z), fd) < 1e-6);
  }
}

TEST_CASE("bearing output is always in (-pi, pi]") {
  RandomStream rng(13);
  for (int i = 0; i < 500; ++i) {
    const Pose pose{(rng.uniform() - 0.5) * 10.0, (rng.uniform() - 0.5) * 10.0,
                    wrap_angle((rng.uniform() - 0.5) * 20.0)};
    const Vec2 lm{(rng.uniform() - 0.5) * 100.0, (rng.uniform() - 0.5) * 100.0};
    if (std::abs(lm.x - pose.x) < 1e-6 && std::abs(lm.y - pose.y) < 1e-6) continue;
    const RangeBearing z = predict_observation(pose, lm);
    CHECK(z.bearing > -kPi);
    CHECK(z.bearing <= kPi);
  }
}
