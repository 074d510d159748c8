#pragma once

#include <string>

#include "vharv/controller.hpp"
#include "vharv/synthesis.hpp"

namespace vharv {

/// Full-precision JSON report of a synthesis run: gamma trace, controller and
/// LMI variables, margins, final moments.
std::string synthesis_report_to_json(const SynthesisResult& result,
                                     const SynthesisConfig& cfg);

void save_synthesis_report(const std::string& path, const SynthesisResult& result,
                           const SynthesisConfig& cfg);

std::string controller_to_json(const ControllerQ& K);
void save_controller(const std::string& path, const ControllerQ& K);

/// Reads a controller from either a bare controller document or a synthesis
/// report (which embeds one). Throws ValidationError on shape mismatches.
ControllerQ load_controller(const std::string& path);
ControllerQ parse_controller(const std::string& json_text);

}  // namespace vharv
