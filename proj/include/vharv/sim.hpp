#pragma once

#include <cstdint>
#include <vector>

#include "vharv/controller.hpp"
#include "vharv/params.hpp"

namespace vharv {

/// Deterministic Gaussian stream (Box-Muller over xoshiro256++); identical
/// seeds give bit-identical sequences on every platform.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);
  double uniform();  ///< open interval (0,1)
  double next();     ///< standard normal

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Piecewise-constant approximation of unit-intensity white noise: i.i.d.
/// zero-mean Gaussians with variance 1/dt.
std::vector<double> white_noise_sequence(double dt, std::size_t n_steps,
                                         std::uint64_t seed);

/// Running average of a uniformly sampled power series: cumulative
/// trapezoidal integral divided by elapsed time. First entry is the first
/// sample.
std::vector<double> running_average_power(const std::vector<double>& pgen,
                                          double dt);

struct SimConfig {
  double dt = 1.0 / 4096.0;
  double duration = 1200.0;
  std::uint64_t seed = 1;
  bool noise_on_measurement = false;
  int record_decimation = 64;
  double warmup = 30.0;      ///< discarded from peak/fraction statistics
  double f_lp_hz = 100.0;    ///< velocity low-pass cutoff
  double blowup_limit = 1e9;
  double batch_seconds = 40.0;  ///< batch length for Monte Carlo error bars
};

struct SimulationResult {
  // Decimated trajectories, all the same length.
  std::vector<double> t, x, xdot, a, iq_star, iq, id, vd, vq, pgen, pbar;

  double p_gen_bar = 0.0;  ///< running-average power at the final time [W]
  double id_loss_mean = 0.0;  ///< (3/2) R mean(i_d^2) over the full run [W]

  // Statistics over the post-warmup window.
  double sat_fraction = 0.0;
  double weaken_fraction = 0.0;
  double stuck_fraction = 0.0;
  double backdrive_fraction = 0.0;  ///< fraction of steps with nut power < 0
  double min_margin_at_xhat = 0.0;  ///< worst feasibility slack at xhat [A^2]
  double feasible_fraction_at_xdot = 0.0;  ///< feasibility rate at the true speed
  std::size_t peak_count = 0;
  double peak_fraction_below_icont = 0.0;
  double mean_iq2 = 0.0, mean_id2 = 0.0, mean_xdot2 = 0.0, mean_pgen = 0.0;
  std::vector<double> pgen_batch_means;

  std::uint64_t steps = 0;
};

/// Fixed-step stochastic simulation of the full nonlinear loop: RK4 on the
/// drift with the noise sample held across each step, Coulomb sticking
/// handled by pinning the velocity, currents from the vector-control runtime
/// under the instantaneous-tracking abstraction.
SimulationResult simulate(const PlantParams& params, const ControllerQ& K,
                          const SimConfig& cfg);

/// Same, but driven by a caller-supplied white-noise sequence (one sample per
/// step, variance 1/dt); used for path-refinement and oracle comparisons.
SimulationResult simulate(const PlantParams& params, const ControllerQ& K,
                          const SimConfig& cfg,
                          const std::vector<double>& process_noise);

}  // namespace vharv
