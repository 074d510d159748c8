#pragma once

#include <string>

#include "vharv/sim.hpp"
#include "vharv/sweep.hpp"

namespace vharv {

/// Trajectory CSV, columns:
///   t,x,xdot,a,iq_star,iq,id,vd,vq,pgen,pbar
/// All floating-point fields carry 17 significant digits.
void write_trajectory_csv(const std::string& path, const SimulationResult& result);

/// Sweep summary CSV, columns:
///   sigma_a,xdot_m,gamma,pgen_bar,sat_frac,weaken_frac
/// Failed cells are emitted with nan metrics; errors go to a sidecar column.
void write_sweep_csv(const std::string& path, const SweepResult& result);

}  // namespace vharv
