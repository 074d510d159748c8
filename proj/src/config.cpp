#include "vharv/config.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "vharv/errors.hpp"

namespace vharv {

namespace {

using nlohmann::json;

const json& section(const json& root, const char* name) {
  auto it = root.find(name);
  if (it == root.end() || !it->is_object())
    throw ValidationError(std::string(name) + ": missing section");
  return *it;
}

double num(const json& sec, const char* sec_name, const char* key) {
  auto it = sec.find(key);
  if (it == sec.end())
    throw ValidationError(std::string(sec_name) + "." + key + ": missing key");
  if (!it->is_number())
    throw ValidationError(std::string(sec_name) + "." + key + ": expected a number");
  return it->get<double>();
}

int integer(const json& sec, const char* sec_name, const char* key) {
  auto it = sec.find(key);
  if (it == sec.end())
    throw ValidationError(std::string(sec_name) + "." + key + ": missing key");
  if (!it->is_number_integer())
    throw ValidationError(std::string(sec_name) + "." + key + ": expected an integer");
  return it->get<int>();
}

// v_s may be the string "inf" for an unbounded bus.
double bus_voltage(const json& sec) {
  auto it = sec.find("v_s");
  if (it == sec.end()) throw ValidationError("bus.v_s: missing key");
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    throw ValidationError("bus.v_s: expected a number or \"inf\"");
  }
  if (!it->is_number()) throw ValidationError("bus.v_s: expected a number or \"inf\"");
  return it->get<double>();
}

}  // namespace

PlantParams parse_plant_params(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: JSON parse error: ") + e.what());
  }

  PlantParams p;
  const auto& mech = section(root, "mech");
  p.mech.m = num(mech, "mech", "m");
  p.mech.c = num(mech, "mech", "c");
  p.mech.k = num(mech, "mech", "k");

  const auto& tr = section(root, "transducer");
  p.transducer.R = num(tr, "transducer", "R");
  p.transducer.L = num(tr, "transducer", "L");
  p.transducer.lambda_pm = num(tr, "transducer", "lambda_pm");
  p.transducer.n_p = integer(tr, "transducer", "n_p");
  p.transducer.J = num(tr, "transducer", "J");
  p.transducer.B_visc = num(tr, "transducer", "B");
  p.transducer.f_c = num(tr, "transducer", "f_c");
  p.transducer.lead = num(tr, "transducer", "lead");
  p.transducer.eta = num(tr, "transducer", "eta");
  p.transducer.i_cont = num(tr, "transducer", "i_cont");

  const auto& bus = section(root, "bus");
  p.bus.v_s = bus_voltage(bus);
  p.bus.delta = num(bus, "bus", "delta");

  const auto& dist = section(root, "disturbance");
  p.disturbance.omega_a = num(dist, "disturbance", "omega_a");
  p.disturbance.zeta_a = num(dist, "disturbance", "zeta_a");
  p.disturbance.sigma_a = num(dist, "disturbance", "sigma_a");

  const auto& meas = section(root, "measurement");
  p.measurement.phi_n = num(meas, "measurement", "phi_n");

  p.validate();
  return p;
}

PlantParams load_plant_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plant_params(ss.str());
}

std::string plant_params_to_json(const PlantParams& p) {
  json root;
  root["mech"] = {{"m", p.mech.m}, {"c", p.mech.c}, {"k", p.mech.k}};
  root["transducer"] = {{"R", p.transducer.R},
                        {"L", p.transducer.L},
                        {"lambda_pm", p.transducer.lambda_pm},
                        {"n_p", p.transducer.n_p},
                        {"J", p.transducer.J},
                        {"B", p.transducer.B_visc},
                        {"f_c", p.transducer.f_c},
                        {"lead", p.transducer.lead},
                        {"eta", p.transducer.eta},
                        {"i_cont", p.transducer.i_cont}};
  if (std::isinf(p.bus.v_s))
    root["bus"] = {{"v_s", "inf"}, {"delta", p.bus.delta}};
  else
    root["bus"] = {{"v_s", p.bus.v_s}, {"delta", p.bus.delta}};
  root["disturbance"] = {{"omega_a", p.disturbance.omega_a},
                         {"zeta_a", p.disturbance.zeta_a},
                         {"sigma_a", p.disturbance.sigma_a}};
  root["measurement"] = {{"phi_n", p.measurement.phi_n}};
  return root.dump(2);
}

}  // namespace vharv
