#include "curvelane/signature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "curvelane/error.hpp"

namespace curvelane {

SlopeSignature build_signature(std::span<const TangentSample> samples, int length, double envelope_tolerance) {
  if (length < 2) throw Error(ErrorCode::InvalidParameter, "signature length must be at least 2");
  if (samples.size() < 4) throw Error(ErrorCode::InsufficientSamples, "need at least 4 tangent samples");
  std::vector<TangentSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const TangentSample& a, const TangentSample& b) {
    return std::tie(a.x, a.y, a.angle, a.support) < std::tie(b.x, b.y, b.angle, b.support);
  });
  const double xmin = sorted.front().x;
  const double xmax = sorted.back().x;
  const double span = xmax - xmin;
  if (!(span > 1e-9)) throw Error(ErrorCode::DegenerateSpan, "samples share one x position");

  // Upper envelope per coarse bin -> knots (mean x, mean angle).
  const int bins = std::max(4, length / 2);
  std::vector<std::vector<const TangentSample*>> binned(bins);
  for (const auto& s : sorted) {
    const int b = std::min(bins - 1, static_cast<int>((s.x - xmin) / span * bins));
    binned[b].push_back(&s);
  }
  std::vector<double> knot_x;
  std::vector<double> knot_angle;
  for (const auto& bin : binned) {
    if (bin.empty()) continue;
    double ymin = bin.front()->y;
    for (const auto* s : bin) ymin = std::min(ymin, s->y);
    std::vector<double> angles;
    std::vector<double> weights;
    double wx = 0.0, wsum = 0.0;
    for (const auto* s : bin) {
      if (s->y > ymin + envelope_tolerance) continue;
      const double w = s->support > 0.0 ? s->support : 1.0;
      angles.push_back(s->angle);
      weights.push_back(w);
      wx += w * s->x;
      wsum += w;
    }
    knot_x.push_back(wx / wsum);
    knot_angle.push_back(axial_mean(angles, weights));
  }

  SlopeSignature sig;
  sig.arc_span = span;
  sig.angles.resize(length);
  std::size_t k = 0;
  for (int i = 0; i < length; ++i) {
    const double x = xmin + span * i / (length - 1);
    while (k + 1 < knot_x.size() && knot_x[k + 1] < x) ++k;
    double angle;
    if (x <= knot_x.front()) {
      angle = knot_angle.front();
    } else if (k + 1 >= knot_x.size()) {
      angle = knot_angle.back();
    } else {
      const double f = (x - knot_x[k]) / (knot_x[k + 1] - knot_x[k]);
      angle = knot_angle[k] + f * axial_delta(knot_angle[k], knot_angle[k + 1]);
    }
    sig.angles[i] = fold_degrees(angle);
  }
  return sig;
}

MatchResult match_signature(const SlopeSignature& candidate, const SlopeSignature& reference, double angle_tol,
                            double threshold) {
  if (candidate.angles.size() != reference.angles.size()) {
    throw Error(ErrorCode::LengthMismatch, "signatures differ in length");
  }
  if (candidate.angles.empty()) return {0.0, false, 0.0};
  std::size_t hits = 0;
  double residual = 0.0;
  for (std::size_t i = 0; i < candidate.angles.size(); ++i) {
    const double d = axial_difference(candidate.angles[i], reference.angles[i]);
    residual += d;
    if (d <= angle_tol) ++hits;
  }
  const double n = static_cast<double>(candidate.angles.size());
  const double score = static_cast<double>(hits) / n;
  return {score, score >= threshold, residual / n};
}

Classification classify_curve(const SlopeSignature& sig, const TemplateLibrary& library, double angle_tol,
                              double threshold) {
  if (library.empty()) throw Error(ErrorCode::EmptyLibrary, "template library is empty");
  Classification best{CurveClass::Unknown, -1.0};
  double best_residual = 0.0;
  for (const auto& [cls, templates] : library) {
    for (const auto& t : templates) {
      const MatchResult m = match_signature(sig, t, angle_tol, threshold);
      if (m.score > best.score || (m.score == best.score && m.mean_residual < best_residual)) {
        best = {cls, m.score};
        best_residual = m.mean_residual;
      }
    }
  }
  if (best.score < 0.0) throw Error(ErrorCode::EmptyLibrary, "template library has no signatures");
  if (best.score < threshold) best.curve_class = CurveClass::Unknown;
  return best;
}

ReferenceMatch match_references(const SlopeSignature& sig, std::span<const SlopeSignature> references,
                                double angle_tol, double threshold) {
  ReferenceMatch best;
  double best_score = -1.0;
  for (const auto& ref : references) {
    const MatchResult m = match_signature(sig, ref, angle_tol, threshold);
    if (m.score > best_score) {
      best_score = m.score;
      best.score = m.score;
      best.label = m.matched ? std::optional<std::string>(ref.label) : std::nullopt;
    }
  }
  return best;
}

SlopeSignature analytic_signature(const Shape& shape, int length, double spacing) {
  const auto points = sample_by_arc_length(shape, spacing);
  std::vector<TangentSample> samples;
  samples.reserve(points.size());
  for (const auto& p : points) samples.push_back({p.p.x, p.p.y, p.angle, 1.0});
  auto sig = build_signature(samples, length);
  sig.label = std::string(shape_kind_name(shape));
  return sig;
}

TemplateLibrary standard_library(int length) {
  TemplateLibrary lib;
  constexpr double kHalfWidth = 200.0;
  const Point2 c{320.0, 240.0};

  for (int deg = 0; deg < 180; deg += 5) {
    if (deg == 90) continue;  // no horizontal extent
    const double r = deg_to_rad(deg);
    const Point2 d{kHalfWidth * std::cos(r), kHalfWidth * std::sin(r)};
    lib[CurveClass::Line].push_back(analytic_signature(LineShape{c - d, c + d}, length));
  }
  // Parabolas y = c2 x^2 over [-w, w]; k = 2 c2 w is the end slope.
  for (const double k : {1.0, std::sqrt(2.0), 2.0, 2.0 * std::sqrt(2.0), 4.0}) {
    for (const int sign : {1, -1}) {
      const double c2 = sign * k / (2.0 * kHalfWidth);
      lib[CurveClass::Parabola].push_back(
          analytic_signature(ParabolaShape{FreeAxis::X, 0.0, 0.0, c2, -kHalfWidth, kHalfWidth}, length));
    }
  }
  for (const double radius : {50.0, 80.0, 120.0, 160.0, 200.0}) {
    lib[CurveClass::Circle].push_back(analytic_signature(CircleShape{c, radius}, length));
  }
  for (const double ratio : {1.5, 1.9, 2.4, 3.0, 3.8}) {
    lib[CurveClass::Ellipse].push_back(analytic_signature(EllipseShape{c, 60.0 * ratio, 60.0}, length));
    lib[CurveClass::Ellipse].push_back(analytic_signature(EllipseShape{c, 60.0, 60.0 * ratio}, length));
  }
  // Branches drawn over three times the vertex distance on each side.
  for (const double ecc : {1.4, 1.8, 2.2, 2.6, 3.0}) {
    const double a = kHalfWidth / 3.0;
    const double b = a * std::sqrt(ecc * ecc - 1.0);
    for (const int sign : {1, -1}) {
      lib[CurveClass::Hyperbola].push_back(analytic_signature(
          HyperbolaShape{FreeAxis::X, 0.0, 0.0, a, b, sign, -kHalfWidth, kHalfWidth}, length));
    }
  }
  return lib;
}

std::vector<AngleBand> default_bands() { return {{"blue", 90.0, 120.0}, {"green", 60.0, 90.0}}; }

void validate_bands(std::span<const AngleBand> bands) {
  for (const auto& b : bands) {
    if (b.label.empty() || !(b.low >= 0.0 && b.low < b.high && b.high <= 180.0)) {
      throw Error(ErrorCode::InvalidParameter, "band '" + b.label + "' needs 0 <= low < high <= 180");
    }
  }
  for (std::size_t i = 0; i < bands.size(); ++i) {
    for (std::size_t j = i + 1; j < bands.size(); ++j) {
      if (bands[i].low < bands[j].high && bands[j].low < bands[i].high) {
        throw Error(ErrorCode::InvalidParameter, "bands '" + bands[i].label + "' and '" + bands[j].label + "' overlap");
      }
    }
  }
}

std::optional<std::string> assign_band(double angle_deg, std::span<const AngleBand> bands) {
  const double a = fold_degrees(angle_deg);
  for (const auto& b : bands) {
    if (a >= b.low && a < b.high) return b.label;
  }
  return std::nullopt;
}

std::string format_signature_record(const SlopeSignature& sig) {
  if (sig.label.find_first_of(",\n") != std::string::npos) {
    throw Error(ErrorCode::InvalidParameter, "signature label may not contain commas or newlines");
  }
  std::string out = sig.label;
  char buf[64];
  std::snprintf(buf, sizeof buf, ",%.3f", sig.arc_span);
  out += buf;
  for (const double a : sig.angles) {
    std::snprintf(buf, sizeof buf, ",%.3f", a);
    out += buf;
  }
  return out;
}

SlopeSignature parse_signature_record(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() < 4) throw Error(ErrorCode::IoError, "signature record needs a label, span and angles");
  SlopeSignature sig;
  sig.label = fields[0];
  try {
    sig.arc_span = std::stod(fields[1]);
    for (std::size_t i = 2; i < fields.size(); ++i) sig.angles.push_back(fold_degrees(std::stod(fields[i])));
  } catch (const std::exception&) {
    throw Error(ErrorCode::IoError, "non-numeric field in signature record");
  }
  return sig;
}

std::vector<SlopeSignature> read_signature_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<SlopeSignature> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_signature_record(line));
  }
  return out;
}

void write_signature_file(const std::filesystem::path& path, std::span<const SlopeSignature> sigs) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& s : sigs) out << format_signature_record(s) << '\n';
}

}  // namespace curvelane
