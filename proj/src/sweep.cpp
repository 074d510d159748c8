#include "vharv/sweep.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "vharv/errors.hpp"

namespace vharv {

std::vector<double> log_spaced_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw ValidationError("log_spaced_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double step = (std::log(hi) - std::log(lo)) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = std::exp(std::log(lo) + step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

void SweepConfig::apply_default_grids() {
  if (xdot_m_grid.empty()) xdot_m_grid = log_spaced_grid(0.005, 0.12, 12);
  if (sigma_a_grid.empty())
    sigma_a_grid = {0.0625, 0.075, 0.0875, 0.1, 0.1125, 0.125};
}

SweepResult sweep(const PlantParams& params, const SweepConfig& cfg_in) {
  SweepConfig cfg = cfg_in;
  cfg.apply_default_grids();
  if (cfg.xdot_m_grid.empty() || cfg.sigma_a_grid.empty())
    throw ValidationError("sweep: empty grid");

  SweepResult res;
  res.sigma_a_grid = cfg.sigma_a_grid;
  res.xdot_m_grid = cfg.xdot_m_grid;
  const std::size_t n_cells = cfg.sigma_a_grid.size() * cfg.xdot_m_grid.size();
  res.cells.resize(n_cells);

  auto run_cell = [&](std::size_t idx) {
    const std::size_t is = idx / cfg.xdot_m_grid.size();
    const std::size_t iv = idx % cfg.xdot_m_grid.size();
    SweepCell& cell = res.cells[idx];
    cell.sigma_a = cfg.sigma_a_grid[is];
    cell.xdot_m = cfg.xdot_m_grid[iv];
    try {
      PlantParams p = params;
      p.disturbance.sigma_a = cell.sigma_a;
      SynthesisConfig synth = cfg.synth;
      synth.xdot_m = cell.xdot_m;
      const SynthesisResult design = iterate_design(p, synth);
      cell.gamma = design.gamma;
      cell.synth_iterations = design.iterations;
      cell.synth_converged = design.converged;

      SimConfig sim_cfg = cfg.sim;
      // Independent, order-insensitive noise stream per cell.
      sim_cfg.seed = cfg.sim.seed + 0x9E3779B97F4A7C15ULL * (idx + 1);
      const SimulationResult sim_res = simulate(p, design.controller, sim_cfg);
      cell.p_gen_bar = sim_res.p_gen_bar;
      cell.sat_fraction = sim_res.sat_fraction;
      cell.weaken_fraction = sim_res.weaken_fraction;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  };

  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_cells));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= n_cells) return;
      run_cell(idx);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  res.ridge_index.assign(cfg.sigma_a_grid.size(), -1);
  for (std::size_t is = 0; is < cfg.sigma_a_grid.size(); ++is) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t iv = 0; iv < cfg.xdot_m_grid.size(); ++iv) {
      const SweepCell& c = res.at(is, iv);
      if (c.ok && c.p_gen_bar > best) {
        best = c.p_gen_bar;
        res.ridge_index[is] = static_cast<int>(iv);
      }
    }
  }
  return res;
}

}  // namespace vharv
