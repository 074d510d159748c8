#pragma once

#include <cmath>
#include <utility>

namespace vharv {

/// Single-degree-of-freedom oscillator constants.
struct MechParams {
  double m = 0.0;  ///< mass [kg]
  double c = 0.0;  ///< viscous damping [N·s/m]
  double k = 0.0;  ///< stiffness [N/m]
};

/// Three-phase PMSM transducer plus ballscrew drivetrain constants.
struct TransducerParams {
  double R = 0.0;          ///< line-to-neutral winding resistance [Ohm]
  double L = 0.0;          ///< line-to-neutral winding inductance [H]
  double lambda_pm = 0.0;  ///< permanent-magnet flux linkage [V·s]
  int n_p = 0;             ///< pole count (even)
  double J = 0.0;          ///< rotor inertia [kg·m^2]
  double B_visc = 0.0;     ///< rotary viscous damping [N·m·s]
  double f_c = 0.0;        ///< Coulomb friction at the nut [N]
  double lead = 0.0;       ///< effective screw lead [m/rad]
  double eta = 0.0;        ///< screw efficiency in (0,1)
  double i_cont = 0.0;     ///< continuous current rating [A]
};

/// DC bus voltage and the quasi-static tightening factor.
struct BusParams {
  double v_s = 0.0;    ///< bus voltage [V]; +inf disables the voltage limit
  double delta = 1.0;  ///< safety factor in (0,1]
};

/// Second-order bandpass disturbance filter parameters.
struct DisturbanceParams {
  double omega_a = 0.0;  ///< passband frequency [rad/s]
  double zeta_a = 0.0;   ///< damping ratio
  double sigma_a = 0.0;  ///< stationary acceleration intensity [m/s^2]
};

struct MeasurementParams {
  double phi_n = 1e-6;  ///< velocity measurement noise intensity
};

/// All plant physics in SI units, loaded verbatim from config.
struct PlantParams {
  MechParams mech;
  TransducerParams transducer;
  BusParams bus;
  DisturbanceParams disturbance;
  MeasurementParams measurement;

  /// Throws ValidationError naming the offending key.
  void validate() const;
};

enum class DriveMode {
  ideal,       ///< lossless screw: reflected inertia J/l^2
  backdriven,  ///< generating regime: h(p) ~ 1/eta, reflected inertia J/(eta l^2)
};

/// Apparent rectilinear mass and damping after folding in the rotor.
/// Returns {m_tilde, c_tilde}.
std::pair<double, double> effective_inertia(const MechParams& mech,
                                            const TransducerParams& t,
                                            DriveMode mode);

}  // namespace vharv
