#pragma once

#include "vharv/params.hpp"

// Oscillator, disturbance, and transducer constants of the bench system used
// throughout the tests.
inline vharv::PlantParams table_params() {
  vharv::PlantParams p;
  p.mech = {3000.0, 942.47, 1.1844e5};
  p.transducer.R = 10.7;
  p.transducer.L = 0.0219;
  p.transducer.lambda_pm = 0.1603;
  p.transducer.n_p = 6;
  p.transducer.J = 3.54e-5;
  p.transducer.B_visc = 3.25e-4;
  p.transducer.f_c = 35.0;
  p.transducer.lead = 2.55e-3;
  p.transducer.eta = 0.91;
  p.transducer.i_cont = 2.0;
  p.bus = {20.0, 0.95};
  p.disturbance = {2.0 * 3.14159265358979323846, 0.1, 0.1};
  p.measurement.phi_n = 1e-6;
  return p;
}
