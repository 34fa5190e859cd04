#pragma once

#include <array>
#include <deque>
#include <span>
#include <stdexcept>

#include "slamkit/core.hpp"

namespace slamkit {

/// Thrown when every rule fires at zero strength, i.e. the inputs lie far
/// outside the membership-function support and layer 4 cannot normalize.
struct DegenerateActivationError : std::runtime_error {
  DegenerateActivationError() : std::runtime_error("all rule firing strengths are zero") {}
};

inline constexpr int kAnfisTerms = 5;   // L, LM, Z, HM, H
inline constexpr int kAnfisRules = 25;  // full 5x5 antecedent grid

/// Two-input (mismatch, mismatch delta) single-output neuro-fuzzy network:
/// Gaussian membership functions, product rule firing, normalized firing
/// strengths, singleton consequents. Rules are laid out row-major by
/// (input-0 term, input-1 term).
struct AnfisNet {
  std::array<std::array<double, kAnfisTerms>, 2> mf_mean{};
  std::array<std::array<double, kAnfisTerms>, 2> mf_width{};  // > 0
  std::array<double, kAnfisRules> consequents{};
  double learning_rate = 0.01;
};

/// Default net for one noise channel: five evenly spaced membership
/// functions over [-half_width, half_width] on both inputs (widths equal to
/// the center spacing), and consequents seeded from the seven-level rule
/// table scaled by `consequent_scale` (the level step). The rule table makes
/// the output oppose the mismatch: positive mismatch drives the output
/// negative, and the whole table is antisymmetric about the center rule.
AnfisNet make_default_net(double half_width, double consequent_scale, double learning_rate);

/// Per-layer values retained by the forward pass for training.
struct AnfisTrace {
  std::array<double, 2> inputs{};
  std::array<std::array<double, kAnfisTerms>, 2> mf{};  // layer-2 memberships
  std::array<double, kAnfisRules> firing{};             // layer-3 products
  std::array<double, kAnfisRules> normalized{};         // layer-4, sums to 1
  double firing_sum = 0.0;
  double output = 0.0;
};

struct AnfisForward {
  double delta_r = 0.0;
  AnfisTrace trace;
};

/// Forward pass. Throws DegenerateActivationError when the total firing
/// strength underflows to zero.
AnfisForward anfis_forward(const AnfisNet& net, double dom, double ddom);

/// d(output)/d(parameter) for every trainable parameter, from a forward trace.
struct AnfisGradients {
  std::array<std::array<double, kAnfisTerms>, 2> mf_mean{};
  std::array<std::array<double, kAnfisTerms>, 2> mf_width{};
  std::array<double, kAnfisRules> consequents{};
};

AnfisGradients anfis_output_gradients(const AnfisNet& net, const AnfisTrace& trace);

/// One gradient-descent step on E = e^2/2 with dE/dW = -e * d(output)/dW:
/// W += learning_rate * e * d(output)/dW. Widths are clamped to >= 1e-6.
/// Returns false (leaving the net unchanged) on degenerate activation.
bool anfis_train_step(AnfisNet& net, double dom, double ddom, double error);

/// Sample covariance of the innovation window: the average of the outer
/// products r_i r_i^T. Symmetric PSD by construction.
Mat2 actual_innovation_cov(std::span<const Vec2> window);

struct DomPair {
  Vec2 dom;   // diag(S - C_hat)
  Vec2 ddom;  // dom - dom_prev
};

DomPair compute_dom(const Mat2& s_theoretical, const Mat2& c_actual, const Vec2& dom_prev);

struct AdaptiveRConfig {
  int window_size = 15;
  double learning_rate = 0.01;
  double r_floor_range = 1e-6;     // m^2
  double r_floor_bearing = 1e-8;   // rad^2
  // Fraction of the initial diagonal used as the consequent level step.
  double consequent_scale = 0.02;
  // Membership half-widths per channel; <= 0 means "use the initial R diagonal".
  double mf_half_width_range = 0.0;
  double mf_half_width_bearing = 0.0;

  void validate() const {
    if (window_size < 1) throw std::invalid_argument("AdaptiveRConfig: window_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("AdaptiveRConfig: learning_rate must be > 0");
    if (!(r_floor_range > 0.0 && r_floor_bearing > 0.0))
      throw std::invalid_argument("AdaptiveRConfig: floors must be > 0");
  }
};

/// Innovation-adaptive estimate of the measurement noise covariance: one net
/// per channel (range, bearing), a bounded window of recent innovations, and
/// the current diagonal R. Single writer; adapt_r mutates the nets.
struct AdaptiveR {
  std::array<AnfisNet, 2> nets;  // [0] range, [1] bearing
  std::deque<Vec2> window;
  int window_capacity = 15;
  Mat2 r_current;
  Vec2 dom_prev;
  std::array<double, 2> r_floor{1e-6, 1e-8};

  // Diagnostics from the latest adaptation.
  Vec2 last_dom;
  Vec2 last_ddom;
  Vec2 last_delta_r;
  long adaptations = 0;
};

AdaptiveR make_adaptive_r(const Mat2& r_initial, const AdaptiveRConfig& cfg);

/// Pushes one innovation into the window (evicting the oldest past
/// capacity). Once the window is full every call measures the covariance
/// mismatch, moves each diagonal of R by the corresponding net output
/// (floored), and trains each net one step with error = mismatch.
void adapt_r(AdaptiveR& state, const Vec2& innovation, const Mat2& s_theoretical);

}  // namespace slamkit
