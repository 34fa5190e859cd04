#include "slamkit/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace slamkit {

namespace {

constexpr std::uint64_t kSimStreamSalt = 0x51u;
constexpr std::uint64_t kFilterStreamSalt = 0xF1u;

// Shortest round-trip decimal form: locale-free and deterministic, so CSV
// bytes depend only on the run's numbers.
std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct RunData {
  RunSummary summary;
  std::string csv;
};

constexpr const char* kCsvHeader =
    "t,true_x,true_y,true_phi,est_x,est_y,est_phi,err_pos,err_phi,neff,"
    "resampled,r_range,r_bearing,pso_iters,gbest_fitness\n";

long step_cap(const Scenario& sc) {
  double length = 0.0;
  Vec2 prev{0.0, 0.0};
  for (const Vec2& wp : sc.waypoints) {
    length += (wp - prev).norm();
    prev = wp;
  }
  length += (sc.waypoints.front() - prev).norm();  // closing leg
  const double nominal = length * sc.loops / (sc.commanded_speed * sc.vehicle.dt_control);
  return static_cast<long>(4.0 * nominal) + 4000;
}

RunData execute_run(const ExperimentConfig& cfg, const Scenario& sc, int run_index) {
  RandomStream sim_rng(mix_seed(cfg.base_seed + run_index, kSimStreamSalt));
  RandomStream filter_rng(mix_seed(cfg.base_seed + run_index, kFilterStreamSalt));

  const NoiseConfig filter_noise = cfg.filter_noise.value_or(sc.noise);
  FilterConfig filter_cfg = cfg.filter;
  filter_cfg.r_initial = filter_noise.r_matrix();

  SimState sim;
  FilterState state = make_filter_state(filter_cfg, sim.true_pose);

  std::vector<Pose> true_path;
  std::vector<Pose> est_path;
  std::vector<std::array<double, 3>> variances;
  std::string csv = kCsvHeader;

  const long cap = step_cap(sc);
  while (!sim.terminal && sim.step < cap) {
    const ControlInput u = control_step(sim, sc);
    if (sim.terminal) break;
    advance_truth(sim, u, sc, sim_rng);

    const bool scan_due = sim.step % sc.vehicle.obs_period_steps == 0;
    std::vector<Observation> scan;
    if (scan_due) scan = sense(sim, sc, sim_rng);

    if (scan_due)
      step(state, u, std::span<const Observation>(scan), filter_cfg, filter_noise,
           sc.vehicle, filter_rng);
    else
      step(state, u, std::nullopt, filter_cfg, filter_noise, sc.vehicle, filter_rng);

    if (!scan_due) continue;

    const Estimate est = estimate(state);
    const std::array<double, 3> var = pose_variance(state);
    const Mat2 r_now = current_r(state, filter_cfg);
    const double err_pos = std::hypot(sim.true_pose.x - est.pose.x,
                                      sim.true_pose.y - est.pose.y);
    const double err_phi = std::abs(wrap_angle(sim.true_pose.phi - est.pose.phi));

    true_path.push_back(sim.true_pose);
    est_path.push_back(est.pose);
    variances.push_back(var);

    csv += format_double(sim.step * sc.vehicle.dt_control);
    csv += ',';
    csv += format_double(sim.true_pose.x); csv += ',';
    csv += format_double(sim.true_pose.y); csv += ',';
    csv += format_double(sim.true_pose.phi); csv += ',';
    csv += format_double(est.pose.x); csv += ',';
    csv += format_double(est.pose.y); csv += ',';
    csv += format_double(est.pose.phi); csv += ',';
    csv += format_double(err_pos); csv += ',';
    csv += format_double(err_phi); csv += ',';
    csv += format_double(state.last_neff); csv += ',';
    csv += state.last_resampled ? '1' : '0'; csv += ',';
    csv += format_double(r_now.m00); csv += ',';
    csv += format_double(r_now.m11); csv += ',';
    csv += std::to_string(state.last_pso_iters); csv += ',';
    csv += format_double(state.last_gbest_fitness);
    csv += '\n';
  }

  RunData out;
  out.csv = std::move(csv);
  if (true_path.empty()) {
    out.summary.failed = true;
    out.summary.error = "run produced no observation epochs";
    return out;
  }

  const RmsePair rmse = pose_rmse(true_path, est_path);
  out.summary.pos_rmse = rmse.pos;
  out.summary.heading_rmse = rmse.heading;
  out.summary.two_sigma_coverage = two_sigma_coverage(true_path, est_path, variances);
  out.summary.component_coverage =
      per_component_two_sigma_coverage(true_path, est_path, variances);
  const Pose& final_true = true_path.back();
  const Pose& final_est = est_path.back();
  out.summary.diverged = std::hypot(final_true.x - final_est.x, final_true.y - final_est.y) >
                         cfg.divergence_threshold;
  const Mat2 r_final = current_r(state, filter_cfg);
  out.summary.final_r = {r_final.m00, r_final.m11};
  out.summary.degenerate_epochs = state.degenerate_epochs;
  return out;
}

void aggregate(AggregateReport& report) {
  std::vector<double> pos, heading, coverage, comp_cov, r_range, r_bearing;
  int diverged = 0;
  int ok = 0;
  for (const RunSummary& r : report.runs) {
    if (r.failed) {
      ++report.failed_runs;
      continue;
    }
    ++ok;
    pos.push_back(r.pos_rmse);
    heading.push_back(r.heading_rmse);
    coverage.push_back(r.two_sigma_coverage);
    comp_cov.push_back((r.component_coverage[0] + r.component_coverage[1] +
                        r.component_coverage[2]) / 3.0);
    r_range.push_back(r.final_r.x);
    r_bearing.push_back(r.final_r.y);
    if (r.diverged) ++diverged;
  }
  if (ok == 0) return;
  report.mean_pos_rmse = mean(pos);
  report.std_pos_rmse = sample_std(pos);
  report.mean_heading_rmse = mean(heading);
  report.divergence_rate = static_cast<double>(diverged) / ok;
  report.mean_2sigma_coverage = mean(coverage);
  report.mean_component_coverage = mean(comp_cov);
  report.mean_final_r_range = mean(r_range);
  report.mean_final_r_bearing = mean(r_bearing);
}

std::string run_csv_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%03d.csv", index);
  return buf;
}

}  // namespace

AggregateReport run_monte_carlo(const ExperimentConfig& cfg, const Scenario& scenario) {
  scenario.validate();
  if (cfg.runs < 1) throw std::invalid_argument("run_monte_carlo: runs must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const bool write_files = !cfg.output_dir.empty();
  if (write_files) std::filesystem::create_directories(cfg.output_dir);

  AggregateReport report;
  report.runs.resize(cfg.runs);
  std::vector<std::string> csvs(cfg.runs);

  const int workers = std::max(1, std::min(cfg.threads, cfg.runs));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int i = next.fetch_add(1); i < cfg.runs; i = next.fetch_add(1)) {
      try {
        RunData data = execute_run(cfg, scenario, i);
        report.runs[i] = std::move(data.summary);
        csvs[i] = std::move(data.csv);
      } catch (const std::exception& e) {
        report.runs[i].failed = true;
        report.runs[i].error = e.what();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  if (write_files) {
    for (int i = 0; i < cfg.runs; ++i) {
      if (csvs[i].empty()) continue;
      std::ofstream out(std::filesystem::path(cfg.output_dir) / run_csv_name(i),
                        std::ios::binary);
      out << csvs[i];
    }
  }

  aggregate(report);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (write_files) {
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "summary.txt");
    out << format_summary(report, cfg);
  }
  return report;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config: " + path);
  nlohmann::json j;
  in >> j;

  ExperimentConfig cfg;
  const auto base_dir = std::filesystem::path(path).parent_path();
  const std::filesystem::path scenario = j.at("scenario").get<std::string>();
  cfg.scenario_path =
      scenario.is_absolute() ? scenario.string() : (base_dir / scenario).string();

  cfg.filter.variant = variant_from_string(j.value("variant", "baseline"));
  cfg.filter.num_particles = j.value("particles", 20);
  cfg.runs = j.value("runs", 1);
  cfg.base_seed = j.value("seed", std::uint64_t{1});
  cfg.output_dir = j.value("out", std::string{});
  cfg.threads = j.value("threads", 1);
  cfg.filter.resample_fraction = j.value("resample_fraction", 0.75);
  cfg.divergence_threshold = j.value("divergence_threshold", 5.0);

  if (j.contains("filter_noise")) {
    const auto& n = j.at("filter_noise");
    NoiseConfig fn;
    fn.sigma_v = n.at("sigma_v").get<double>();
    fn.sigma_gamma = deg2rad(n.at("sigma_gamma_deg").get<double>());
    fn.sigma_r = n.at("sigma_r").get<double>();
    fn.sigma_theta = deg2rad(n.at("sigma_theta_deg").get<double>());
    fn.validate();
    cfg.filter_noise = fn;
  }
  if (j.contains("pso")) {
    const auto& p = j.at("pso");
    cfg.filter.pso_opts.max_iters = p.value("max_iters", 10);
    cfg.filter.pso_opts.fitness_threshold = p.value("fitness_threshold", 5.99);
    cfg.filter.pso_opts.enabled = p.value("enabled", true);
  }
  if (j.contains("anfis")) {
    const auto& a = j.at("anfis");
    AdaptiveRConfig& ac = cfg.filter.anfis_config;
    ac.window_size = a.value("window", 15);
    ac.learning_rate = a.value("learning_rate", 0.01);
    ac.r_floor_range = a.value("r_floor_range", 1e-6);
    ac.r_floor_bearing = a.value("r_floor_bearing", 1e-8);
    ac.consequent_scale = a.value("consequent_scale", 0.02);
    ac.mf_half_width_range = a.value("mf_half_width_range", 0.0);
    ac.mf_half_width_bearing = a.value("mf_half_width_bearing", 0.0);
    ac.validate();
  }
  return cfg;
}

std::string format_summary(const AggregateReport& report, const ExperimentConfig& cfg) {
  std::string s;
  s += "variant = " + to_string(cfg.filter.variant) + "\n";
  s += "particles = " + std::to_string(cfg.filter.num_particles) + "\n";
  s += "runs = " + std::to_string(cfg.runs) + "\n";
  s += "failed_runs = " + std::to_string(report.failed_runs) + "\n";
  s += "mean_pos_rmse = " + format_double(report.mean_pos_rmse) + "\n";
  s += "std_pos_rmse = " + format_double(report.std_pos_rmse) + "\n";
  s += "mean_heading_rmse = " + format_double(report.mean_heading_rmse) + "\n";
  s += "divergence_rate = " + format_double(report.divergence_rate) + "\n";
  s += "mean_2sigma_coverage = " + format_double(report.mean_2sigma_coverage) + "\n";
  s += "mean_final_r_range = " + format_double(report.mean_final_r_range) + "\n";
  s += "mean_final_r_bearing = " + format_double(report.mean_final_r_bearing) + "\n";
  s += "wall_time_s = " + format_double(report.wall_time_s) + "\n";
  return s;
}

CompareReport compare_variants(const ExperimentConfig& cfg, const Scenario& scenario,
                               Variant a, Variant b) {
  CompareReport out;
  out.variant_a = a;
  out.variant_b = b;

  ExperimentConfig cfg_a = cfg;
  cfg_a.filter.variant = a;
  if (!cfg.output_dir.empty())
    cfg_a.output_dir = (std::filesystem::path(cfg.output_dir) / to_string(a)).string();
  ExperimentConfig cfg_b = cfg;
  cfg_b.filter.variant = b;
  if (!cfg.output_dir.empty())
    cfg_b.output_dir = (std::filesystem::path(cfg.output_dir) / to_string(b)).string();

  out.report_a = run_monte_carlo(cfg_a, scenario);
  out.report_b = run_monte_carlo(cfg_b, scenario);

  std::vector<double> rmse_a, rmse_b;
  for (int i = 0; i < cfg.runs; ++i) {
    if (out.report_a.runs[i].failed || out.report_b.runs[i].failed) continue;
    rmse_a.push_back(out.report_a.runs[i].pos_rmse);
    rmse_b.push_back(out.report_b.runs[i].pos_rmse);
  }
  if (!rmse_a.empty()) out.pos_rmse_a_greater = paired_one_sided_greater(rmse_a, rmse_b);

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream f(std::filesystem::path(cfg.output_dir) / "compare.txt");
    f << format_compare(out);
  }
  return out;
}

std::string format_compare(const CompareReport& report) {
  std::string s;
  s += "variant_a = " + to_string(report.variant_a) + "\n";
  s += "variant_b = " + to_string(report.variant_b) + "\n";
  s += "mean_pos_rmse_a = " + format_double(report.report_a.mean_pos_rmse) + "\n";
  s += "mean_pos_rmse_b = " + format_double(report.report_b.mean_pos_rmse) + "\n";
  s += "mean_diff_a_minus_b = " + format_double(report.pos_rmse_a_greater.mean_diff) + "\n";
  s += "p_value_a_greater = " + format_double(report.pos_rmse_a_greater.p_value) + "\n";
  s += "divergence_rate_a = " + format_double(report.report_a.divergence_rate) + "\n";
  s += "divergence_rate_b = " + format_double(report.report_b.divergence_rate) + "\n";
  return s;
}

}  // namespace slamkit
