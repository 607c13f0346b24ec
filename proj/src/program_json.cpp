#include <variant>

#include "geophase/error.hpp"
#include "geophase/program_io.hpp"

namespace geophase {

using nlohmann::json;

namespace {

json segment_to_json(const Segment& seg) {
  json j;
  switch (seg.kind()) {
    case SegmentKind::ramp: {
      const auto& s = seg.as<RampSpec>();
      j = {{"kind", "ramp"},
           {"theta0", s.theta0},
           {"delta0", s.delta0},
           {"t_ramp", s.t_ramp},
           {"direction", s.direction == RampDirection::up ? "up" : "down"}};
      break;
    }
    case SegmentKind::rotation: {
      const auto& s = seg.as<RotationSpec>();
      j = {{"kind", "rotation"}, {"theta0", s.theta0}, {"delta0", s.delta0},
           {"omega0", s.omega0}, {"t_rot", s.t_rot},   {"duration", seg.duration()}};
      break;
    }
    case SegmentKind::ideal_pulse: {
      const auto& p = seg.as<IdealPulse>();
      j = {{"kind", "ideal_pulse"}, {"axis", to_string(p.axis)}, {"angle", p.angle}};
      break;
    }
    case SegmentKind::resonant_pulse: {
      const auto& p = seg.as<ResonantPulse>();
      j = {{"kind", "resonant_pulse"},
           {"axis", to_string(p.axis)},
           {"angle", p.angle},
           {"duration", p.duration}};
      break;
    }
    case SegmentKind::idle:
      j = {{"kind", "idle"}, {"duration", seg.duration()}};
      break;
  }
  j["sta"] = seg.sta_enabled();
  return j;
}

Segment segment_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const bool sta = j.value("sta", false);
  if (kind == "ramp") {
    const std::string dir = j.at("direction").get<std::string>();
    if (dir != "up" && dir != "down") throw ValidationError("ramp direction must be up or down");
    return Segment::ramp({j.at("theta0").get<double>(), j.at("delta0").get<double>(),
                          j.at("t_ramp").get<double>(),
                          dir == "up" ? RampDirection::up : RampDirection::down},
                         sta);
  }
  if (kind == "rotation") {
    RotationSpec s{j.at("theta0").get<double>(), j.at("delta0").get<double>(),
                   j.at("omega0").get<double>(), j.at("t_rot").get<double>()};
    return Segment::rotation(s, sta, j.value("duration", s.t_rot));
  }
  if (kind == "ideal_pulse") {
    return Segment::ideal_pulse(parse_axis(j.at("axis").get<std::string>()),
                                j.at("angle").get<double>());
  }
  if (kind == "resonant_pulse") {
    return Segment::resonant_pulse(parse_axis(j.at("axis").get<std::string>()),
                                   j.at("angle").get<double>(), j.at("duration").get<double>());
  }
  if (kind == "idle") return Segment::idle(j.at("duration").get<double>());
  throw ValidationError("unknown segment kind '" + kind + "'");
}

}  // namespace

json program_to_json(const PulseProgram& program) {
  json segs = json::array();
  for (const auto& s : program.segments()) segs.push_back(segment_to_json(s));
  return {{"dt", program.dt()}, {"segments", segs}};
}

PulseProgram program_from_json(const json& doc) {
  try {
    std::vector<Segment> segs;
    for (const auto& j : doc.at("segments")) segs.push_back(segment_from_json(j));
    return PulseProgram(std::move(segs), doc.at("dt").get<double>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed program document: ") + e.what());
  }
}

}  // namespace geophase
