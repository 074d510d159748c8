#include "vharv/params.hpp"

#include "vharv/errors.hpp"

namespace vharv {

namespace {

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ValidationError(std::string(key) + ": " + what);
}

void require_finite_positive(double v, const char* key) {
  require(std::isfinite(v) && v > 0.0, key, "must be finite and > 0");
}

}  // namespace

void PlantParams::validate() const {
  require_finite_positive(mech.m, "mech.m");
  require_finite_positive(mech.c, "mech.c");
  require_finite_positive(mech.k, "mech.k");

  require_finite_positive(transducer.R, "transducer.R");
  require_finite_positive(transducer.L, "transducer.L");
  require_finite_positive(transducer.lambda_pm, "transducer.lambda_pm");
  require(transducer.n_p >= 2, "transducer.n_p", "must be >= 2");
  require(transducer.n_p % 2 == 0, "transducer.n_p", "must be even");
  require(std::isfinite(transducer.J) && transducer.J >= 0.0, "transducer.J",
          "must be finite and >= 0");
  require(std::isfinite(transducer.B_visc) && transducer.B_visc >= 0.0, "transducer.B",
          "must be finite and >= 0");
  require(std::isfinite(transducer.f_c) && transducer.f_c >= 0.0, "transducer.f_c",
          "must be finite and >= 0");
  require_finite_positive(transducer.lead, "transducer.lead");
  require(transducer.eta > 0.0 && transducer.eta < 1.0, "transducer.eta",
          "must lie in (0,1)");
  require_finite_positive(transducer.i_cont, "transducer.i_cont");

  require(bus.v_s > 0.0, "bus.v_s", "must be > 0 (may be inf)");
  require(bus.delta > 0.0 && bus.delta <= 1.0, "bus.delta", "must lie in (0,1]");

  require_finite_positive(disturbance.omega_a, "disturbance.omega_a");
  require_finite_positive(disturbance.zeta_a, "disturbance.zeta_a");
  // sigma_a == 0 is the quiescent diagnostic case; the filter stays valid.
  require(std::isfinite(disturbance.sigma_a) && disturbance.sigma_a >= 0.0,
          "disturbance.sigma_a", "must be finite and >= 0");

  require_finite_positive(measurement.phi_n, "measurement.phi_n");
}

std::pair<double, double> effective_inertia(const MechParams& mech,
                                            const TransducerParams& t,
                                            DriveMode mode) {
  const double l2 = t.lead * t.lead;
  const double scale = (mode == DriveMode::backdriven) ? 1.0 / (t.eta * l2) : 1.0 / l2;
  return {mech.m + t.J * scale, mech.c + t.B_visc * scale};
}

}  // namespace vharv
