#pragma once

#include <string>

#include "vharv/params.hpp"

namespace vharv {

/// Parses a JSON config document. Required sections/keys:
///   mech.{m,c,k}
///   transducer.{R,L,lambda_pm,n_p,J,B,f_c,lead,eta,i_cont}
///   bus.{v_s,delta}
///   disturbance.{omega_a,zeta_a,sigma_a}
///   measurement.{phi_n}
/// bus.v_s also accepts the string "inf". Throws ValidationError naming the
/// offending key.
PlantParams load_plant_params(const std::string& path);
PlantParams parse_plant_params(const std::string& json_text);

std::string plant_params_to_json(const PlantParams& p);

}  // namespace vharv
