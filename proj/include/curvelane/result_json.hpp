#pragma once

#include <string>
#include <string_view>

#include "curvelane/pipeline.hpp"
#include "curvelane/synth.hpp"

namespace curvelane {

// One JSON object on one line. Coordinates carry 2 decimals, angles 3.
// Timing is left out when include_timing is false, which makes the record a
// pure function of the inputs.
std::string result_to_json(const DetectionResult& r, bool include_timing = true);
DetectionResult result_from_json(std::string_view text);

std::string classification_to_json(const ClassifyResult& r);
std::string truth_to_json(const GroundTruth& truth);

}  // namespace curvelane
