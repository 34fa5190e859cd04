#include "slamkit/metrics.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace slamkit {

RmsePair pose_rmse(std::span<const Pose> true_path, std::span<const Pose> est_path) {
  if (true_path.size() != est_path.size() || true_path.empty())
    throw std::invalid_argument("pose_rmse: paths must have equal non-zero length");
  double pos_sq = 0.0;
  double heading_sq = 0.0;
  for (std::size_t i = 0; i < true_path.size(); ++i) {
    const double dx = true_path[i].x - est_path[i].x;
    const double dy = true_path[i].y - est_path[i].y;
    const double dphi = wrap_angle(true_path[i].phi - est_path[i].phi);
    pos_sq += dx * dx + dy * dy;
    heading_sq += dphi * dphi;
  }
  const double n = static_cast<double>(true_path.size());
  return {std::sqrt(pos_sq / n), std::sqrt(heading_sq / n)};
}

namespace {

std::array<long, 3> coverage_counts(std::span<const Pose> true_path,
                                    std::span<const Pose> est_path,
                                    std::span<const std::array<double, 3>> variances,
                                    long& joint) {
  if (true_path.size() != est_path.size() || true_path.size() != variances.size())
    throw std::invalid_argument("coverage: inputs must have equal length");
  std::array<long, 3> counts{0, 0, 0};
  joint = 0;
  for (std::size_t i = 0; i < true_path.size(); ++i) {
    const double err[3] = {true_path[i].x - est_path[i].x,
                           true_path[i].y - est_path[i].y,
                           wrap_angle(true_path[i].phi - est_path[i].phi)};
    bool all = true;
    for (int c = 0; c < 3; ++c) {
      const bool inside = std::abs(err[c]) <= 2.0 * std::sqrt(variances[i][c]);
      if (inside) ++counts[c];
      all = all && inside;
    }
    if (all) ++joint;
  }
  return counts;
}

}  // namespace

double two_sigma_coverage(std::span<const Pose> true_path, std::span<const Pose> est_path,
                          std::span<const std::array<double, 3>> variances) {
  if (true_path.empty()) throw std::invalid_argument("two_sigma_coverage: empty input");
  long joint = 0;
  coverage_counts(true_path, est_path, variances, joint);
  return static_cast<double>(joint) / static_cast<double>(true_path.size());
}

std::array<double, 3> per_component_two_sigma_coverage(
    std::span<const Pose> true_path, std::span<const Pose> est_path,
    std::span<const std::array<double, 3>> variances) {
  if (true_path.empty()) throw std::invalid_argument("coverage: empty input");
  long joint = 0;
  const auto counts = coverage_counts(true_path, est_path, variances, joint);
  const double n = static_cast<double>(true_path.size());
  return {counts[0] / n, counts[1] / n, counts[2] / n};
}

PairedTestResult paired_one_sided_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("paired test: inputs must have equal non-zero length");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    observed += d[i];
  }

  PairedTestResult out;
  out.mean_diff = observed / static_cast<double>(n);

  if (n <= 22) {
    // Exact sign-flip distribution, walked in Gray-code order so each
    // pattern differs from the previous by one flipped pair.
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<double> signed_d = d;
    double sum = observed;
    std::uint64_t count = 0;
    const double tol = 1e-12 * (std::abs(observed) + 1.0);
    if (sum >= observed - tol) ++count;
    for (std::uint64_t i = 1; i < total; ++i) {
      const int bit = std::countr_zero(i);
      signed_d[bit] = -signed_d[bit];
      sum += 2.0 * signed_d[bit];
      if (sum >= observed - tol) ++count;
    }
    out.p_value = static_cast<double>(count) / static_cast<double>(total);
    return out;
  }

  const double sd = sample_std(d);
  if (sd <= 0.0) {
    out.p_value = out.mean_diff > 0.0 ? 0.0 : 1.0;
    return out;
  }
  const double z = out.mean_diff / (sd / std::sqrt(static_cast<double>(n)));
  out.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (const double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace slamkit
