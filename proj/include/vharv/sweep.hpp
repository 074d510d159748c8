#pragma once

#include <string>
#include <vector>

#include "vharv/sim.hpp"
#include "vharv/synthesis.hpp"

namespace vharv {

struct SweepConfig {
  std::vector<double> xdot_m_grid;   ///< defaults to 12 log-spaced in [0.005, 0.12]
  std::vector<double> sigma_a_grid;  ///< defaults to 6 values bracketing 0.1
  SimConfig sim;
  SynthesisConfig synth;  ///< xdot_m/sigma_a fields are overwritten per cell
  int threads = 0;        ///< 0 = hardware concurrency

  void apply_default_grids();
};

struct SweepCell {
  double sigma_a = 0.0;
  double xdot_m = 0.0;
  bool ok = false;
  std::string error;
  double gamma = 0.0;
  double p_gen_bar = 0.0;
  double sat_fraction = 0.0;
  double weaken_fraction = 0.0;
  int synth_iterations = 0;
  bool synth_converged = false;
};

struct SweepResult {
  std::vector<double> sigma_a_grid, xdot_m_grid;
  std::vector<SweepCell> cells;  ///< row-major: sigma index * n_xdot + xdot index
  /// Index of the power-maximizing xdot_m per sigma_a row (-1 if the row failed).
  std::vector<int> ridge_index;

  const SweepCell& at(std::size_t is, std::size_t iv) const {
    return cells[is * xdot_m_grid.size() + iv];
  }
};

/// Designs a controller and simulates it for every grid pair. Cells run in
/// parallel with independent noise streams derived from (seed, cell index);
/// per-cell failures are recorded and the sweep continues.
SweepResult sweep(const PlantParams& params, const SweepConfig& cfg);

std::vector<double> log_spaced_grid(double lo, double hi, int n);

}  // namespace vharv
