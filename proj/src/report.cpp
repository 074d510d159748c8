#include "vharv/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vharv/errors.hpp"

namespace vharv {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows,
                                 Eigen::Index cols, const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ValidationError(name + ": expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ValidationError(name + ": expected " + std::to_string(cols) +
                            " columns");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw ValidationError(name + ": non-numeric entry");
      m(i, c) = row[c].get<double>();
    }
  }
  return m;
}

json controller_json(const ControllerQ& K) {
  json j;
  j["A_K"] = matrix_to_json(K.A_K);
  j["B_K"] = matrix_to_json(K.B_K);
  j["C_K"] = matrix_to_json(K.C_K);
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

}  // namespace

std::string controller_to_json(const ControllerQ& K) {
  return controller_json(K).dump(2);
}

void save_controller(const std::string& path, const ControllerQ& K) {
  write_file(path, controller_to_json(K) + "\n");
}

ControllerQ parse_controller(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("controller: JSON parse error: ") + e.what());
  }
  const json* src = &root;
  if (root.contains("controller")) src = &root["controller"];
  if (!src->contains("A_K") || !src->contains("B_K") || !src->contains("C_K"))
    throw ValidationError("controller: missing A_K/B_K/C_K");
  ControllerQ k;
  k.A_K = matrix_from_json((*src)["A_K"], 4, 4, "A_K");
  k.B_K = matrix_from_json((*src)["B_K"], 4, 1, "B_K");
  k.C_K = matrix_from_json((*src)["C_K"], 1, 4, "C_K");
  return k;
}

ControllerQ load_controller(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("controller: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_controller(ss.str());
}

std::string synthesis_report_to_json(const SynthesisResult& result,
                                     const SynthesisConfig& cfg) {
  json j;
  j["gamma"] = result.gamma;
  j["gamma_trace"] = result.gamma_trace;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["controller"] = controller_json(result.controller);
  j["moments"] = {{"ex2", result.moments.ex2},
                  {"eiq2", result.moments.eiq2},
                  {"p_gen_lin", result.moments.p_gen_lin}};
  json margins = json::object();
  for (const auto& [name, value] : result.lmi_margins) margins[name] = value;
  j["lmi_margins"] = std::move(margins);
  j["vars"] = {{"X", matrix_to_json(result.vars.X)},
               {"Y", matrix_to_json(result.vars.Y)},
               {"A_tilde", matrix_to_json(result.vars.A_tilde)},
               {"B_tilde", matrix_to_json(result.vars.B_tilde)},
               {"C_tilde", matrix_to_json(result.vars.C_tilde)},
               {"beta", result.vars.beta},
               {"A_ctx", matrix_to_json(result.vars.A_ctx)},
               {"B_ctx", matrix_to_json(result.vars.B_ctx)},
               {"Cy_ctx", matrix_to_json(result.vars.Cy_ctx)}};
  j["state_scaling"] = {result.state_scaling[0], result.state_scaling[1],
                        result.state_scaling[2], result.state_scaling[3]};
  j["A_eq"] = matrix_to_json(result.A_eq);
  j["Sigma"] = matrix_to_json(result.Sigma);
  j["config"] = {{"xdot_m", cfg.xdot_m},     {"i_cont", cfg.i_cont},
                 {"delta", cfg.delta},       {"r_coef", cfg.r_coef},
                 {"eps_lmi", cfg.eps_lmi},   {"max_iters", cfg.max_iters},
                 {"tol_gamma", cfg.tol_gamma}};
  if (std::isfinite(cfg.v_s))
    j["config"]["v_s"] = cfg.v_s;
  else
    j["config"]["v_s"] = "inf";
  return j.dump(2);
}

void save_synthesis_report(const std::string& path, const SynthesisResult& result,
                           const SynthesisConfig& cfg) {
  write_file(path, synthesis_report_to_json(result, cfg) + "\n");
}

}  // namespace vharv
