#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "vharv/config.hpp"
#include "vharv/csv.hpp"
#include "vharv/errors.hpp"
#include "vharv/feasibility.hpp"
#include "vharv/linear_algebra.hpp"
#include "vharv/manifest.hpp"
#include "vharv/report.hpp"
#include "vharv/sim.hpp"
#include "vharv/sweep.hpp"
#include "vharv/synthesis.hpp"
#include "vharv/transforms.hpp"

namespace fs = std::filesystem;
using namespace vharv;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<double> xdot_m, sigma_a, vs, delta;
  std::optional<double> duration, dt;
  std::optional<std::uint64_t> seed;
};

PlantParams resolve_params(const CommonOpts& o) {
  PlantParams p = load_plant_params(o.config_path);
  if (o.sigma_a) p.disturbance.sigma_a = *o.sigma_a;
  if (o.vs) p.bus.v_s = *o.vs;
  if (o.delta) p.bus.delta = *o.delta;
  p.validate();
  return p;
}

// --vs accepts "inf" as well as a number.
void add_vs_flag(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option_function<std::string>(
      "--vs",
      [&o](const std::string& s) {
        if (s == "inf" || s == "Inf" || s == "infinity")
          o.vs = std::numeric_limits<double>::infinity();
        else
          o.vs = std::stod(s);
      },
      "Bus voltage override [V], number or 'inf'");
}

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.rfind("log:", 0) == 0) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    if (std::sscanf(spec.c_str(), "log:%lf:%lf:%d", &lo, &hi, &n) != 3)
      throw ValidationError("grid spec: expected log:<lo>:<hi>:<n>");
    return log_spaced_grid(lo, hi, n);
  }
  std::vector<double> g;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    try {
      g.push_back(std::stod(spec.substr(pos, next - pos)));
    } catch (const std::exception&) {
      throw ValidationError("grid spec: bad number in '" + spec + "'");
    }
    pos = next + 1;
  }
  if (g.empty()) throw ValidationError("grid spec: empty");
  return g;
}

int cmd_synth(const CommonOpts& o) {
  const PlantParams p = resolve_params(o);
  SynthesisConfig cfg = SynthesisConfig::from(p, o.xdot_m.value_or(0.0));
  const SynthesisResult res = iterate_design(p, cfg);

  fs::create_directories(o.out_dir);
  save_synthesis_report((fs::path(o.out_dir) / "synthesis.json").string(), res, cfg);
  save_controller((fs::path(o.out_dir) / "controller.json").string(),
                  res.controller);
  RunManifest man;
  man.command = "synth";
  man.config_path = o.config_path;
  man.resolved_params = p;
  man.seed = 0;
  man.out_dir = o.out_dir;
  man.extra_json = "{\"xdot_m\": " + std::to_string(cfg.xdot_m) + "}";
  write_manifest((fs::path(o.out_dir) / "manifest.json").string(), man);

  std::printf("synth: gamma=%.6f W  iterations=%d  converged=%s\n", res.gamma,
              res.iterations, res.converged ? "yes" : "no");
  std::printf("synth: E{iq^2}=%.6g A^2  E{xdot^2}=%.6g (m/s)^2  p_gen_lin=%.6f W\n",
              res.moments.eiq2, res.moments.ex2, res.moments.p_gen_lin);
  if (!res.converged) {
    std::fprintf(stderr, "synth: iteration did not converge within %d solves\n",
                 cfg.max_iters);
    return 3;
  }
  return 0;
}

int cmd_simulate(const CommonOpts& o, const std::string& controller_path,
                 int decimation) {
  const PlantParams p = resolve_params(o);
  const ControllerQ K = load_controller(controller_path);
  SimConfig cfg;
  cfg.duration = o.duration.value_or(1200.0);
  if (o.dt) cfg.dt = *o.dt;
  cfg.seed = o.seed.value_or(1);
  cfg.record_decimation = decimation;
  const SimulationResult res = simulate(p, K, cfg);

  fs::create_directories(o.out_dir);
  write_trajectory_csv((fs::path(o.out_dir) / "trajectory.csv").string(), res);
  RunManifest man;
  man.command = "simulate";
  man.config_path = o.config_path;
  man.resolved_params = p;
  man.seed = cfg.seed;
  man.out_dir = o.out_dir;
  man.extra_json = "{\"controller\": \"" + controller_path +
                   "\", \"duration\": " + std::to_string(cfg.duration) +
                   ", \"dt\": " + std::to_string(cfg.dt) +
                   ", \"record_decimation\": " + std::to_string(decimation) + "}";
  write_manifest((fs::path(o.out_dir) / "manifest.json").string(), man);

  std::printf("simulate: p_gen_bar=%.6f W over %.0f s\n", res.p_gen_bar,
              cfg.duration);
  std::printf(
      "simulate: id_loss=%.6f W  sat=%.2f%%  weaken=%.2f%%  backdrive=%.1f%%\n",
      res.id_loss_mean, 100.0 * res.sat_fraction, 100.0 * res.weaken_fraction,
      100.0 * res.backdrive_fraction);
  std::printf("simulate: min feasibility margin at xhat = %.3e A^2\n",
              res.min_margin_at_xhat);
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& xdotm_spec,
              const std::string& sigma_spec, int threads) {
  const PlantParams p = resolve_params(o);
  SweepConfig cfg;
  if (!xdotm_spec.empty()) cfg.xdot_m_grid = parse_grid(xdotm_spec);
  if (!sigma_spec.empty()) cfg.sigma_a_grid = parse_grid(sigma_spec);
  cfg.apply_default_grids();
  if (o.duration) cfg.sim.duration = *o.duration;
  if (o.dt) cfg.sim.dt = *o.dt;
  cfg.sim.seed = o.seed.value_or(1);
  cfg.sim.record_decimation = 4096;
  cfg.synth = SynthesisConfig::from(p, 0.0);
  cfg.threads = threads;
  const SweepResult res = sweep(p, cfg);

  fs::create_directories(o.out_dir);
  write_sweep_csv((fs::path(o.out_dir) / "sweep.csv").string(), res);
  RunManifest man;
  man.command = "sweep";
  man.config_path = o.config_path;
  man.resolved_params = p;
  man.seed = cfg.sim.seed;
  man.out_dir = o.out_dir;
  write_manifest((fs::path(o.out_dir) / "manifest.json").string(), man);

  int failures = 0;
  for (const auto& c : res.cells)
    if (!c.ok) {
      ++failures;
      std::fprintf(stderr, "sweep: cell (sigma_a=%.4g, xdot_m=%.4g) failed: %s\n",
                   c.sigma_a, c.xdot_m, c.error.c_str());
    }
  std::printf("sweep: %zu cells, %d failed\n", res.cells.size(), failures);
  for (std::size_t is = 0; is < res.sigma_a_grid.size(); ++is) {
    const int iv = res.ridge_index[is];
    if (iv < 0) {
      std::printf("  sigma_a=%.4g: no successful cells\n", res.sigma_a_grid[is]);
      continue;
    }
    const auto& c = res.at(is, static_cast<std::size_t>(iv));
    std::printf("  sigma_a=%.4g: ridge at xdot_m=%.4g  pgen=%.4f W  gamma=%.4f W\n",
                c.sigma_a, c.xdot_m, c.p_gen_bar, c.gamma);
  }
  return 0;
}

struct CheckPrinter {
  int failures = 0;
  void result(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
  }
  void vacuous(const std::string& name, const std::string& why) {
    std::printf("[VACUOUS] %s: %s\n", name.c_str(), why.c_str());
  }
};

int cmd_verify(const CommonOpts& o) {
  const PlantParams p = resolve_params(o);
  const double xdot_m = o.xdot_m.value_or(0.0286);
  CheckPrinter out;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  char buf[256];

  {  // Transform round trip and power invariance.
    double worst_rt = 0.0, worst_pw = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double theta = 20.0 * gauss(rng);
      Eigen::Vector3d v{gauss(rng), gauss(rng), gauss(rng)};
      const Eigen::Vector3d rt = inverse_park(theta, park(theta, v));
      worst_rt = std::max(worst_rt, (rt - v).norm() / std::max(v.norm(), 1e-30));
      Eigen::Vector3d i_dq{gauss(rng), gauss(rng), 0.0};
      Eigen::Vector3d v_dq{gauss(rng), gauss(rng), 0.0};
      const Eigen::Vector3d iabc = inverse_park(theta, i_dq);
      const Eigen::Vector3d vabc = inverse_park(theta, v_dq);
      const double lhs = vabc.dot(iabc);
      const double rhs = 1.5 * (v_dq[0] * i_dq[0] + v_dq[1] * i_dq[1]);
      worst_pw = std::max(worst_pw,
                          std::abs(lhs - rhs) / (vabc.norm() * iabc.norm() + 1e-30));
    }
    std::snprintf(buf, sizeof(buf), "max relative error %.3e", worst_rt);
    out.result("transform-round-trip", worst_rt <= 1e-12, buf);
    std::snprintf(buf, sizeof(buf), "max error per unit norm %.3e", worst_pw);
    out.result("power-invariance", worst_pw <= 1e-10, buf);
  }

  const StateSpace plant = assemble_plant(p.mech, p.transducer, p.disturbance,
                                          DriveMode::backdriven);
  {  // Riccati residual on the plant.
    const RiccatiSolution ric =
        solve_care(plant.A, plant.B, plant.C, p.transducer.R);
    const double rel = ric.residual_norm / std::max(1.0, ric.S.norm());
    const Eigen::Matrix4d acl = plant.A + plant.B * ric.H;
    std::snprintf(buf, sizeof(buf), "residual %.3e, closed-loop abscissa %.3e", rel,
                  spectral_abscissa(acl));
    out.result("riccati-plant", rel <= 1e-10 && is_hurwitz(acl), buf);
  }
  {  // Lyapunov residual on the disturbance filter: Var(a) must equal sigma_a^2.
    Eigen::Matrix2d af;
    af << 0.0, 1.0, -p.disturbance.omega_a * p.disturbance.omega_a,
        -2.0 * p.disturbance.zeta_a * p.disturbance.omega_a;
    Eigen::Vector2d gf{0.0, 2.0 * p.disturbance.sigma_a *
                                std::sqrt(p.disturbance.zeta_a * p.disturbance.omega_a)};
    const Eigen::Matrix2d sig = solve_lyapunov(af, gf * gf.transpose());
    const double err = std::abs(sig(1, 1) - p.disturbance.sigma_a * p.disturbance.sigma_a) /
                       (p.disturbance.sigma_a * p.disturbance.sigma_a);
    std::snprintf(buf, sizeof(buf), "Var(a) relative error %.3e", err);
    out.result("disturbance-variance", err <= 1e-10, buf);
  }

  SynthesisConfig cfg = SynthesisConfig::from(p, xdot_m);
  SynthesisResult design;
  bool have_design = false;
  try {
    design = iterate_design(p, cfg);
    have_design = true;
    std::snprintf(buf, sizeof(buf), "gamma=%.6f W in %d iterations", design.gamma,
                  design.iterations);
    out.result("synthesis-converged", design.converged, buf);
  } catch (const SolverError& e) {
    out.result("synthesis-converged", false, e.what());
  }

  if (have_design) {
    double worst = 0.0;
    for (const auto& [name, margin] : design.lmi_margins)
      worst = std::min(worst, margin);
    std::snprintf(buf, sizeof(buf), "smallest LMI margin %.3e", worst);
    out.result("lmi-margins", worst >= 0.0, buf);

    const double slack = 1e-6;
    const auto& m = design.moments;
    const double iq_bound = 0.25 * p.transducer.i_cont * p.transducer.i_cont;
    std::snprintf(buf, sizeof(buf), "E{iq^2}=%.6g vs bound %.6g", m.eiq2, iq_bound);
    out.result("guarantee-iq-variance", m.eiq2 <= iq_bound * (1.0 + slack), buf);
    std::snprintf(buf, sizeof(buf), "E{xdot^2}=%.6g vs bound %.6g", m.ex2,
                  xdot_m * xdot_m);
    out.result("guarantee-velocity-variance",
               m.ex2 <= xdot_m * xdot_m * (1.0 + slack), buf);
    std::snprintf(buf, sizeof(buf), "p_gen_lin=%.6f vs gamma=%.6f", m.p_gen_lin,
                  design.gamma);
    out.result("guarantee-power", m.p_gen_lin >= design.gamma * (1.0 - slack), buf);

    if (std::isinf(p.bus.v_s)) {
      out.vacuous("feasibility-at-xhat", "bus voltage is unbounded");
    } else {
      SimConfig sim_cfg;
      sim_cfg.duration = 150.0;
      sim_cfg.record_decimation = 4096;
      const SimulationResult sim_res = simulate(p, design.controller, sim_cfg);
      std::snprintf(buf, sizeof(buf), "min margin %.3e A^2 over %llu steps",
                    sim_res.min_margin_at_xhat,
                    static_cast<unsigned long long>(sim_res.steps));
      out.result("feasibility-at-xhat", sim_res.min_margin_at_xhat >= -1e-12, buf);
    }
  }

  std::printf("verify: %d check(s) failed\n", out.failures);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vector-controlled vibration energy harvester design toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string controller_path, xdotm_spec, sigma_spec;
  int decimation = 64;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", o.config_path, "Plant config JSON");
    if (needs_config) opt->required();
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--sigma-a", [&](auto& res) { o.sigma_a = std::stod(res[0]); return true; },
                    "Disturbance intensity override [m/s^2]");
    cmd->add_option("--delta", [&](auto& res) { o.delta = std::stod(res[0]); return true; },
                    "Bus safety factor override");
    cmd->add_option("--seed", [&](auto& res) { o.seed = std::stoull(res[0]); return true; },
                    "Random seed");
    cmd->add_option("--duration", [&](auto& res) { o.duration = std::stod(res[0]); return true; },
                    "Simulation duration [s]");
    cmd->add_option("--dt", [&](auto& res) { o.dt = std::stod(res[0]); return true; },
                    "Integration step [s]");
    cmd->add_option("--xdot-m", [&](auto& res) { o.xdot_m = std::stod(res[0]); return true; },
                    "Velocity bound [m/s]; 0 disables the velocity constraints");
    add_vs_flag(cmd, o);
  };

  auto* synth = app.add_subcommand("synth", "Design a quadrature current law");
  add_common(synth);

  auto* sim = app.add_subcommand("simulate", "Run the nonlinear closed loop");
  add_common(sim);
  sim->add_option("--controller", controller_path, "Controller JSON")->required();
  sim->add_option("--decim", decimation, "Trajectory recording decimation");

  auto* sw = app.add_subcommand("sweep", "Design + simulate over a parameter grid");
  add_common(sw);
  sw->add_option("--xdotm-grid", xdotm_spec, "Grid: 'log:lo:hi:n' or 'a,b,c'");
  sw->add_option("--sigma-grid", sigma_spec, "Grid: 'log:lo:hi:n' or 'a,b,c'");
  sw->add_option("--threads", threads, "Parallel sweep cells (0 = all cores)");

  auto* verify = app.add_subcommand("verify", "Run the invariant check suites");
  add_common(verify);

  try {
    app.parse(argc, argv);
    if (synth->parsed()) return cmd_synth(o);
    if (sim->parsed()) return cmd_simulate(o, controller_path, decimation);
    if (sw->parsed()) return cmd_sweep(o, xdotm_spec, sigma_spec, threads);
    if (verify->parsed()) return cmd_verify(o);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalBlowup& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
