#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wpg/dcm_regenerator.hpp"
#include "wpg/envelope.hpp"
#include "wpg/lipm.hpp"
#include "wpg/qp.hpp"
#include "wpg/scenario.hpp"
#include "wpg/simulator.hpp"
#include "wpg/step_adapter.hpp"
#include "wpg/swing.hpp"
#include "wpg/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 2;
constexpr int kExitBadInput = 3;

void print_run_line(const wpg::SimLog& log) {
  const wpg::RunMetrics m = wpg::compute_metrics(log);
  if (log.ok()) {
    std::printf("status=ok mode=%s steps=%d mean_velocity=%.4f peak_pitch=%.4f peak_roll=%.4f steps_to_recover=%d\n",
                to_string(log.mode), m.steps, m.mean_velocity, m.peak_pitch,
                m.peak_roll, m.steps_to_recover);
  } else {
    std::printf("status=failed mode=%s reason=%s t=%.3f steps=%d\n", to_string(log.mode),
                to_string(log.failure), log.t_failure, m.steps);
  }
}

int cmd_run(const std::string& path, const std::string& out_dir) {
  const wpg::Scenario sc = wpg::parse_scenario_file(path);
  const wpg::SimLog log = wpg::run_closed_loop(sc.config, sc.v_des, sc.pushes, sc.mode,
                                               sc.t_end, sc.start_stance);
  std::filesystem::create_directories(out_dir);
  wpg::write_trace_csv(out_dir + "/trace.csv", log);
  wpg::write_summary_json(out_dir + "/summary.json", log);
  print_run_line(log);
  return log.ok() ? kExitOk : kExitFailed;
}

int cmd_envelope(int dirs, const std::string& mode_name, double f_hi,
                 const std::string& out_dir) {
  wpg::EnvelopeMode mode = wpg::EnvelopeMode::Both;
  if (mode_name == "stage1") mode = wpg::EnvelopeMode::Stage1;
  else if (mode_name == "full") mode = wpg::EnvelopeMode::Full;
  else if (mode_name != "both")
    throw std::invalid_argument("mode must be stage1, full or both: " + mode_name);
  const wpg::GaitConfig config;
  const wpg::EnvelopeResult result = wpg::run_envelope(config, dirs, f_hi, 0.1, mode);
  std::filesystem::create_directories(out_dir);
  wpg::write_envelope_csv(out_dir + "/envelope.csv", result);
  wpg::write_envelope_json(out_dir + "/envelope.json", result);
  std::printf("%10s %14s %14s\n", "psi", "f_max_stage1", "f_max_full");
  for (const wpg::EnvelopePoint& p : result.points) {
    std::printf("%10.4f %14.1f %14.1f\n", p.psi, p.f_max_stage1, p.f_max_full);
  }
  return kExitOk;
}

int cmd_compare(const std::string& path, const std::string& out_dir) {
  const wpg::Scenario sc = wpg::parse_scenario_file(path);
  const wpg::CompareResult result = wpg::compare_modes(sc);
  std::filesystem::create_directories(out_dir);
  wpg::write_trace_csv(out_dir + "/trace_stage1_only.csv", result.stage1);
  wpg::write_trace_csv(out_dir + "/trace_full.csv", result.full);
  wpg::write_compare_csv(out_dir + "/compare.csv", result);
  wpg::write_compare_json(out_dir + "/compare.json", result);
  print_run_line(result.stage1);
  print_run_line(result.full);
  return kExitOk;
}

bool check(bool ok, const char* what, int& failed) {
  std::printf("  [%s] %s\n", ok ? "pass" : "FAIL", what);
  if (!ok) ++failed;
  return ok;
}

// Quick smoke pass over the solver, model and closed loop; the full property
// suites live in the unit tests.
int cmd_selftest() {
  int failed = 0;
  const wpg::GaitConfig config;
  const double w0 = config.omega0();

  {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    bool solved = true;
    for (int k = 0; k < 50; ++k) {
      const int n = 2 + static_cast<int>(rng() % 4);
      Eigen::MatrixXd M = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
      wpg::QpProblem prob;
      prob.H = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
      prob.f = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
      prob.A_in = Eigen::MatrixXd::Zero(2 * n, n);
      prob.b_in = Eigen::VectorXd::Ones(2 * n) * 0.5;
      prob.A_in.topRows(n) = Eigen::MatrixXd::Identity(n, n);
      prob.A_in.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
      const wpg::QpSolution sol = wpg::solve(prob);
      if (sol.status != wpg::QpStatus::Optimal) solved = false;
      else worst = std::max(worst, wpg::kkt_residual(prob, sol.x, sol.lambda_eq, sol.mu_in));
    }
    check(solved && worst < 1e-8, "box-constrained random QPs solve to KKT 1e-8", failed);
  }
  {
    const wpg::DiscreteModel model = wpg::discretize(w0, config.dt_s);
    wpg::StateVector5 x0;
    x0.xi = 0.12;
    x0.xi_dot = -0.4;
    x0.theta = 0.05;
    x0.theta_dot = 0.3;
    x0.theta_ddot = 1.5;
    const Eigen::Vector2d in(0.8, -2.0);
    const wpg::Vector5d x1 = model.A * x0.vec() + model.B * in;
    const auto f = [&](const wpg::Vector5d& s) {
      wpg::Vector5d d;
      d << s(1), in(0), s(3), s(4), in(1);
      return d;
    };
    wpg::Vector5d x = x0.vec();
    const int sub = 100;
    const double h = config.dt_s / sub;
    for (int i = 0; i < sub; ++i) {
      const wpg::Vector5d k1 = f(x);
      const wpg::Vector5d k2 = f(x + 0.5 * h * k1);
      const wpg::Vector5d k3 = f(x + 0.5 * h * k2);
      const wpg::Vector5d k4 = f(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    check((x1 - x).lpNorm<Eigen::Infinity>() < 1e-10,
          "exact discretization matches RK4 integration", failed);
  }
  {
    const wpg::NominalGait nom = wpg::compute_nominal_gait(0.5, config, wpg::Side::Left);
    wpg::Stage1Inputs in;
    in.u0 = {0.0, 0.0};
    in.stance = wpg::Side::Left;
    in.t = 0.3;
    // On the orbit the DCM diverges from the stance foot as e^{ω0 t} and meets
    // u_T + b_nom exactly at the nominal touchdown.
    const wpg::FlywheelPlant plant = wpg::on_orbit_state(config, 0.5, wpg::Side::Left, in.u0);
    const wpg::Vec2 xi0 = wpg::dcm(plant.com, plant.com_vel, w0);
    const double tau_t = std::exp(w0 * in.t);
    in.xi_mea = {in.u0.x + (xi0.x - in.u0.x) * tau_t, in.u0.y + (xi0.y - in.u0.y) * tau_t};
    const wpg::StepAdaptation adapt = wpg::adapt_step(in, nom, config);
    const bool fixed = std::abs(adapt.u_T.x - (in.u0.x + nom.L_nom)) < 1e-9 &&
                       std::abs(adapt.u_T.y - (in.u0.y + nom.W_nom)) < 1e-9 &&
                       std::abs(adapt.T_step - nom.T_nom) < 1e-9;
    check(fixed, "step adaptation reproduces the nominal plan on the orbit", failed);
  }
  {
    wpg::GaitConfig cfg = config;
    cfg.T_nom_ss = cfg.T_nom_ss + cfg.T_ds;
    cfg.T_ds = 0.0;
    const wpg::SimLog log =
        wpg::run_closed_loop(cfg, 0.5, {}, wpg::ControllerMode::Stage1Only, 5.0);
    double worst = 0.0;
    const wpg::NominalGait nl = wpg::compute_nominal_gait(0.5, cfg, wpg::Side::Left);
    const wpg::NominalGait nr = wpg::compute_nominal_gait(0.5, cfg, wpg::Side::Right);
    for (const wpg::StepRecord& s : log.steps) {
      const wpg::Vec2 b_nom = (s.stance == wpg::Side::Left ? nl : nr).b_nom;
      worst = std::max(worst, (s.b_end - b_nom).norm());
    }
    check(log.ok() && !log.steps.empty() && worst < 1e-6,
          "undisturbed stepping stays on the periodic orbit", failed);
  }
  {
    wpg::FootState foot;
    foot.pos = {-0.1, 0.2};
    const wpg::SwingPlan plan = wpg::plan_swing(foot, {0.3, 0.1}, 0.1, 0.6, 0.05);
    const wpg::FootState end = wpg::evaluate(plan, 0.6);
    const bool terminal = end.pos.x == 0.3 && end.pos.y == 0.1 && end.height == 0.0 &&
                          end.vel.norm() == 0.0;
    check(terminal, "swing interpolation lands exactly on the target", failed);
  }

  std::printf("selftest: %s\n", failed == 0 ? "all checks passed" : "FAILURES");
  return failed == 0 ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage reactive walking pattern generator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  int dirs = 16;
  std::string mode_name = "both";
  double f_hi = 600.0;

  CLI::App* run = app.add_subcommand("run", "Simulate one scenario; writes trace.csv and summary.json");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory (default .)");

  CLI::App* envelope =
      app.add_subcommand("envelope", "Sweep the recoverable-push envelope; writes envelope.csv/json");
  envelope->add_option("--dirs", dirs, "Number of push directions (default 16)");
  envelope->add_option("--mode", mode_name, "stage1, full or both (default both)");
  envelope->add_option("--fhi", f_hi, "Initial upper bracket magnitude [N]");
  envelope->add_option("--out", out_dir, "Output directory (default .)");

  CLI::App* compare = app.add_subcommand(
      "compare", "Run a scenario in both controller modes; writes traces and compare.csv/json");
  compare->add_option("scenario", scenario_path, "Scenario file")->required();
  compare->add_option("--out", out_dir, "Output directory (default .)");

  CLI::App* selftest = app.add_subcommand("selftest", "Quick solver/model/loop smoke checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir);
    if (envelope->parsed()) return cmd_envelope(dirs, mode_name, f_hi, out_dir);
    if (compare->parsed()) return cmd_compare(scenario_path, out_dir);
    if (selftest->parsed()) return cmd_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  }
  return kExitBadInput;
}
