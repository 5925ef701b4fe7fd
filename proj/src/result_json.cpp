#include "curvelane/result_json.hpp"

#include <cmath>

#include <json.hpp>

#include "curvelane/error.hpp"

namespace curvelane {

namespace {

using Json = nlohmann::ordered_json;

double round_to(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(x * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

Json points_json(const std::vector<Point2>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back({round_to(p.x, 2), round_to(p.y, 2)});
  return arr;
}

std::vector<Point2> points_from(const Json& arr) {
  std::vector<Point2> out;
  for (const auto& p : arr) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

Json optional_text(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

}  // namespace

std::string result_to_json(const DetectionResult& r, bool include_timing) {
  Json j;
  j["frame_index"] = r.frame_index;
  Json lanes = Json::array();
  for (const auto& l : r.lanes) {
    Json lane;
    lane["polyline_px"] = points_json(l.polyline);
    lane["polyline_cm"] = points_json(l.world);
    lane["band"] = optional_text(l.band);
    lane["angle"] = round_to(l.angle, 3);
    lane["curve_class"] = std::string(to_string(l.curve_class));
    lane["signature_score"] = round_to(l.signature_score, 3);
    lane["vote"] = l.vote;
    lane["mass"] = round_to(l.mass, 2);
    lane["carried"] = l.carried;
    lanes.push_back(std::move(lane));
  }
  j["lanes"] = std::move(lanes);
  j["flags"] = {{"tracker_reset", r.tracker_reset}, {"gaps_filled", r.gaps_filled}};
  j["error"] = optional_text(r.error);
  if (include_timing) {
    Json t;
    for (const auto& s : r.timing) t[s.stage] = round_to(s.ms, 3);
    t["total"] = round_to(r.total_ms, 3);
    j["timing_ms"] = std::move(t);
  }
  return j.dump();
}

DetectionResult result_from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    DetectionResult r;
    r.frame_index = j.at("frame_index").get<int>();
    for (const auto& l : j.at("lanes")) {
      LaneResult lane;
      lane.polyline = points_from(l.at("polyline_px"));
      lane.world = points_from(l.at("polyline_cm"));
      if (!l.at("band").is_null()) lane.band = l.at("band").get<std::string>();
      lane.angle = l.at("angle").get<double>();
      lane.curve_class = parse_curve_class(l.at("curve_class").get<std::string>()).value_or(CurveClass::Unknown);
      lane.signature_score = l.at("signature_score").get<double>();
      lane.vote = l.at("vote").get<int>();
      lane.mass = l.at("mass").get<double>();
      lane.carried = l.at("carried").get<bool>();
      r.lanes.push_back(std::move(lane));
    }
    r.tracker_reset = j.at("flags").at("tracker_reset").get<bool>();
    r.gaps_filled = j.at("flags").at("gaps_filled").get<int>();
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    if (j.contains("timing_ms")) {
      for (const auto& [stage, ms] : j.at("timing_ms").items()) {
        if (stage == "total") r.total_ms = ms.get<double>();
        else r.timing.push_back({stage, ms.get<double>()});
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed result record: ") + e.what());
  }
}

std::string classification_to_json(const ClassifyResult& r) {
  Json j;
  j["curve_class"] = std::string(to_string(r.classification.curve_class));
  j["score"] = round_to(r.classification.score, 3);
  j["band"] = optional_text(r.band);
  Json angles = Json::array();
  for (double a : r.signature.angles) angles.push_back(round_to(a, 3));
  j["signature"] = {{"arc_span", round_to(r.signature.arc_span, 2)}, {"angles", std::move(angles)}};
  return j.dump();
}

std::string truth_to_json(const GroundTruth& truth) {
  Json j;
  j["width"] = truth.width;
  j["height"] = truth.height;
  Json curves = Json::array();
  for (const auto& c : truth.curves) {
    Json curve;
    curve["class"] = std::string(to_string(c.label));
    curve["kind"] = c.kind;
    curve["arc_length"] = round_to(c.arc_length, 2);
    Json pts = Json::array();
    for (std::size_t i = 0; i < c.points.size(); ++i)
      pts.push_back({round_to(c.points[i].x, 2), round_to(c.points[i].y, 2), round_to(c.angles[i], 3),
                     c.visible[i] ? 1 : 0});
    curve["points"] = std::move(pts);  // x, y, tangent angle, visible
    curves.push_back(std::move(curve));
  }
  j["curves"] = std::move(curves);
  return j.dump();
}

}  // namespace curvelane
