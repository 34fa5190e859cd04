#include "slamkit/anfis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace slamkit {

namespace {

// Seven-level rule table over the 5x5 antecedent grid, rows = input-0 term
// (L..H), columns = input-1 term. Level 4 is neutral; levels map to
// (level - 4) * consequent_scale, so level 1 pushes the output down hardest
// and level 7 up hardest.
constexpr int kRuleLevel[kAnfisTerms][kAnfisTerms] = {
    {7, 7, 6, 5, 4},
    {7, 6, 5, 4, 3},
    {6, 5, 4, 3, 2},
    {5, 4, 3, 2, 1},
    {4, 3, 2, 1, 1},
};

constexpr double kMinWidth = 1e-6;
constexpr double kMinFiringSum = 1e-300;

}  // namespace

AnfisNet make_default_net(double half_width, double consequent_scale, double learning_rate) {
  if (!(half_width > 0.0)) throw std::invalid_argument("make_default_net: half_width must be > 0");
  AnfisNet net;
  net.learning_rate = learning_rate;
  const double spacing = 2.0 * half_width / (kAnfisTerms - 1);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < kAnfisTerms; ++j) {
      net.mf_mean[i][j] = -half_width + spacing * j;
      net.mf_width[i][j] = spacing;
    }
  }
  for (int j0 = 0; j0 < kAnfisTerms; ++j0)
    for (int j1 = 0; j1 < kAnfisTerms; ++j1)
      net.consequents[j0 * kAnfisTerms + j1] =
          (kRuleLevel[j0][j1] - 4) * consequent_scale;
  return net;
}

AnfisForward anfis_forward(const AnfisNet& net, double dom, double ddom) {
  AnfisForward out;
  AnfisTrace& t = out.trace;
  t.inputs = {dom, ddom};

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < kAnfisTerms; ++j) {
      const double u = (t.inputs[i] - net.mf_mean[i][j]) / net.mf_width[i][j];
      t.mf[i][j] = std::exp(-u * u);
    }
  }

  t.firing_sum = 0.0;
  for (int j0 = 0; j0 < kAnfisTerms; ++j0) {
    for (int j1 = 0; j1 < kAnfisTerms; ++j1) {
      const double f = t.mf[0][j0] * t.mf[1][j1];
      t.firing[j0 * kAnfisTerms + j1] = f;
      t.firing_sum += f;
    }
  }
  if (!(t.firing_sum >= kMinFiringSum)) throw DegenerateActivationError{};

  t.output = 0.0;
  for (int l = 0; l < kAnfisRules; ++l) {
    t.normalized[l] = t.firing[l] / t.firing_sum;
    t.output += t.normalized[l] * net.consequents[l];
  }
  out.delta_r = t.output;
  return out;
}

AnfisGradients anfis_output_gradients(const AnfisNet& net, const AnfisTrace& t) {
  AnfisGradients g;

  // Output layer is linear in the consequents.
  for (int l = 0; l < kAnfisRules; ++l) g.consequents[l] = t.normalized[l];

  // d(output)/d(firing_l) through the normalization: (w_l - output) / sum.
  std::array<double, kAnfisRules> dfiring;
  for (int l = 0; l < kAnfisRules; ++l)
    dfiring[l] = (net.consequents[l] - t.output) / t.firing_sum;

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < kAnfisTerms; ++j) {
      // Accumulate over the rules this membership participates in.
      double dmu = 0.0;
      for (int k = 0; k < kAnfisTerms; ++k) {
        const int l = (i == 0) ? j * kAnfisTerms + k : k * kAnfisTerms + j;
        const double other = (i == 0) ? t.mf[1][k] : t.mf[0][k];
        dmu += dfiring[l] * other;
      }
      const double width = net.mf_width[i][j];
      const double centered = t.inputs[i] - net.mf_mean[i][j];
      const double mu = t.mf[i][j];
      g.mf_mean[i][j] = dmu * mu * 2.0 * centered / (width * width);
      g.mf_width[i][j] = dmu * mu * 2.0 * centered * centered / (width * width * width);
    }
  }
  return g;
}

bool anfis_train_step(AnfisNet& net, double dom, double ddom, double error) {
  AnfisForward fwd;
  try {
    fwd = anfis_forward(net, dom, ddom);
  } catch (const DegenerateActivationError&) {
    return false;
  }
  const AnfisGradients g = anfis_output_gradients(net, fwd.trace);
  const double step = net.learning_rate * error;

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < kAnfisTerms; ++j) {
      net.mf_mean[i][j] += step * g.mf_mean[i][j];
      net.mf_width[i][j] = std::max(kMinWidth, net.mf_width[i][j] + step * g.mf_width[i][j]);
    }
  }
  for (int l = 0; l < kAnfisRules; ++l) net.consequents[l] += step * g.consequents[l];
  return true;
}

Mat2 actual_innovation_cov(std::span<const Vec2> window) {
  if (window.empty())
    throw std::invalid_argument("actual_innovation_cov: empty window");
  Mat2 sum;
  for (const Vec2& r : window) sum = sum + outer(r, r);
  return (sum * (1.0 / static_cast<double>(window.size()))).symmetrized();
}

DomPair compute_dom(const Mat2& s_theoretical, const Mat2& c_actual, const Vec2& dom_prev) {
  DomPair out;
  out.dom = {s_theoretical.m00 - c_actual.m00, s_theoretical.m11 - c_actual.m11};
  out.ddom = out.dom - dom_prev;
  return out;
}

AdaptiveR make_adaptive_r(const Mat2& r_initial, const AdaptiveRConfig& cfg) {
  cfg.validate();
  AdaptiveR state;
  state.window_capacity = cfg.window_size;
  state.r_current = Mat2::diagonal(std::max(cfg.r_floor_range, r_initial.m00),
                                   std::max(cfg.r_floor_bearing, r_initial.m11));
  state.r_floor = {cfg.r_floor_range, cfg.r_floor_bearing};
  const double hw_range =
      cfg.mf_half_width_range > 0.0 ? cfg.mf_half_width_range : state.r_current.m00;
  const double hw_bearing =
      cfg.mf_half_width_bearing > 0.0 ? cfg.mf_half_width_bearing : state.r_current.m11;
  state.nets[0] = make_default_net(hw_range, cfg.consequent_scale * state.r_current.m00,
                                   cfg.learning_rate);
  state.nets[1] = make_default_net(hw_bearing, cfg.consequent_scale * state.r_current.m11,
                                   cfg.learning_rate);
  return state;
}

void adapt_r(AdaptiveR& state, const Vec2& innovation, const Mat2& s_theoretical) {
  state.window.push_back(innovation);
  while (static_cast<int>(state.window.size()) > state.window_capacity)
    state.window.pop_front();
  if (static_cast<int>(state.window.size()) < state.window_capacity) return;

  const std::vector<Vec2> window(state.window.begin(), state.window.end());
  const Mat2 c_actual = actual_innovation_cov(window);
  const DomPair mismatch = compute_dom(s_theoretical, c_actual, state.dom_prev);

  const double dom[2] = {mismatch.dom.x, mismatch.dom.y};
  const double ddom[2] = {mismatch.ddom.x, mismatch.ddom.y};
  double delta[2] = {0.0, 0.0};
  double* diag[2] = {&state.r_current.m00, &state.r_current.m11};

  for (int i = 0; i < 2; ++i) {
    delta[i] = anfis_forward(state.nets[i], dom[i], ddom[i]).delta_r;
    *diag[i] = std::max(state.r_floor[i], *diag[i] + delta[i]);
    anfis_train_step(state.nets[i], dom[i], ddom[i], dom[i]);
  }

  state.dom_prev = mismatch.dom;
  state.last_dom = mismatch.dom;
  state.last_ddom = mismatch.ddom;
  state.last_delta_r = {delta[0], delta[1]};
  ++state.adaptations;
}

}  // namespace slamkit
