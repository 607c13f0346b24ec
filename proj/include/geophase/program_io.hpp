#pragma once

#include <json.hpp>

#include "geophase/pulse_schedule.hpp"

namespace geophase {

/// {"dt": ..., "segments": [{"kind": "ramp", ...}, ...]}; times in ns,
/// fields in rad/ns, angles in rad.
nlohmann::json program_to_json(const PulseProgram& program);
PulseProgram program_from_json(const nlohmann::json& doc);

}  // namespace geophase
