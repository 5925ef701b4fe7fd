#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvelane/curvemath.hpp"
#include "curvelane/shapes.hpp"

namespace curvelane {

// Tangent angles resampled at evenly spaced x positions, left to right.
struct SlopeSignature {
  std::string label;
  std::vector<double> angles;  // degrees in [0, 180)
  double arc_span = 0.0;       // horizontal extent covered, pixels
};

struct AngleBand {
  std::string label;
  double low = 0.0;   // inclusive
  double high = 0.0;  // exclusive
};

struct MatchResult {
  double score = 0.0;
  bool matched = false;
  double mean_residual = 0.0;  // mean axial angle difference, degrees
};

struct Classification {
  CurveClass curve_class = CurveClass::Unknown;
  double score = 0.0;
};

using TemplateLibrary = std::map<CurveClass, std::vector<SlopeSignature>>;

inline constexpr int kDefaultSignatureLength = 32;
inline constexpr double kDefaultEnvelopeTolerance = 3.0;

// Sorts samples by x and resamples their angles at `length` evenly spaced x
// positions. Where the curve is multi-valued in x (closed curves), only the
// upper envelope (smallest y, within envelope_tolerance pixels) is kept, so the
// signature traces the curve from its leftmost point along the top.
SlopeSignature build_signature(std::span<const TangentSample> samples, int length = kDefaultSignatureLength,
                               double envelope_tolerance = kDefaultEnvelopeTolerance);

// Fraction of positions whose angles agree within angle_tol (mod 180).
MatchResult match_signature(const SlopeSignature& candidate, const SlopeSignature& reference, double angle_tol,
                            double threshold);

// Highest hit fraction wins; equal fractions go to the smaller mean residual.
Classification classify_curve(const SlopeSignature& sig, const TemplateLibrary& library, double angle_tol,
                              double threshold);

// Best-matching labelled reference; nullopt label when none reaches the threshold.
struct ReferenceMatch {
  std::optional<std::string> label;
  double score = 0.0;
};
ReferenceMatch match_references(const SlopeSignature& sig, std::span<const SlopeSignature> references,
                                double angle_tol, double threshold);

// Templates sampled from analytic curves: lines every 5 degrees, parabolas at
// five curvatures, circles at five radii, ellipses at five aspect ratios in two
// orientations, and hyperbola branches at five eccentricities.
TemplateLibrary standard_library(int length = kDefaultSignatureLength);

// Signature of an analytic curve (dense analytic tangents).
SlopeSignature analytic_signature(const Shape& shape, int length = kDefaultSignatureLength,
                                  double spacing = 0.5);

std::vector<AngleBand> default_bands();
void validate_bands(std::span<const AngleBand> bands);

// Label of the half-open band [low, high) containing the angle.
std::optional<std::string> assign_band(double angle_deg, std::span<const AngleBand> bands);

// One record per line: label,arc_span,angle,angle,... with 3 decimals.
std::string format_signature_record(const SlopeSignature& sig);
SlopeSignature parse_signature_record(const std::string& line);
std::vector<SlopeSignature> read_signature_file(const std::filesystem::path& path);
void write_signature_file(const std::filesystem::path& path, std::span<const SlopeSignature> sigs);

}  // namespace curvelane
