#include "curvelane/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "curvelane/error.hpp"

namespace curvelane {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw Error(ErrorCode::ConfigError,
              "key '" + std::string(key) + "': cannot read '" + std::string(value) + "' as " + expected);
}

double to_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "a number");
  return out;
}

long long to_integer(std::string_view key, std::string_view v) {
  v = trim(v);
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "an integer");
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  const long long x = to_integer(key, v);
  if (x < -2147483647LL || x > 2147483647LL) bad_value(key, v, "a 32-bit integer");
  return static_cast<int>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> to_numbers(std::string_view key, std::string_view v) {
  std::vector<double> out;
  std::string text(v);
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(to_double(key, tok));
  return out;
}

std::optional<std::array<Point2, 4>> to_quad(std::string_view key, std::string_view v) {
  if (trim(v).empty() || trim(v) == "none") return std::nullopt;
  const auto nums = to_numbers(key, v);
  if (nums.size() != 8) bad_value(key, v, "eight numbers");
  std::array<Point2, 4> q;
  for (int i = 0; i < 4; ++i) q[i] = {nums[2 * i], nums[2 * i + 1]};
  return q;
}

std::string fmt(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string fmt_quad(const std::optional<std::array<Point2, 4>>& q) {
  if (!q) return "none";
  std::string out;
  for (const auto& p : *q) {
    if (!out.empty()) out += ' ';
    out += fmt(p.x) + ' ' + fmt(p.y);
  }
  return out;
}

// bands = blue:90:120, green:60:90
std::vector<AngleBand> to_bands(std::string_view key, std::string_view v) {
  std::vector<AngleBand> out;
  std::string text(v);
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto t = trim(item);
    if (t.empty()) continue;
    const auto c1 = t.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : t.find(':', c1 + 1);
    if (c2 == std::string_view::npos) bad_value(key, t, "label:low:high");
    AngleBand b;
    b.label = std::string(trim(t.substr(0, c1)));
    b.low = to_double(key, t.substr(c1 + 1, c2 - c1 - 1));
    b.high = to_double(key, t.substr(c2 + 1));
    out.push_back(b);
  }
  return out;
}

std::string fmt_bands(const std::vector<AngleBand>& bands) {
  std::string out;
  for (const auto& b : bands) {
    if (!out.empty()) out += ", ";
    out += b.label + ':' + fmt(b.low) + ':' + fmt(b.high);
  }
  return out;
}

struct Entry {
  const char* key;
  std::function<void(PipelineConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename Member>
Entry real(const char* key, Member member) {
  return {key, [member](PipelineConfig& c, std::string_view k, std::string_view v) { member(c) = to_double(k, v); },
          [member](const PipelineConfig& c) { return fmt(member(c)); }};
}

template <typename Member>
Entry integer(const char* key, Member member) {
  return {key, [member](PipelineConfig& c, std::string_view k, std::string_view v) { member(c) = to_int(k, v); },
          [member](const PipelineConfig& c) { return std::to_string(member(c)); }};
}

template <typename Member>
Entry boolean(const char* key, Member member) {
  return {key, [member](PipelineConfig& c, std::string_view k, std::string_view v) { member(c) = to_bool(k, v); },
          [member](const PipelineConfig& c) {
            return std::string(member(c) ? "true" : "false");
          }};
}

template <typename Member>
Entry text(const char* key, Member member) {
  return {key, [member](PipelineConfig& c, std::string_view, std::string_view v) { member(c) = std::string(trim(v)); },
          [member](const PipelineConfig& c) { return member(c); }};
}

const std::vector<Entry>& registry() {
  using C = PipelineConfig;
  static const std::vector<Entry> entries = {
      {"seed",
       [](C& c, std::string_view k, std::string_view v) {
         const long long s = to_integer(k, v);
         if (s < 0) bad_value(k, v, "a non-negative integer");
         c.seed = static_cast<std::uint64_t>(s);
       },
       [](const C& c) { return std::to_string(c.seed); }},
      boolean("illumination.enabled", [](auto& c) -> auto& { return c.illumination_enabled; }),
      integer("illumination.tile", [](auto& c) -> auto& { return c.illumination.tile; }),
      real("illumination.target", [](auto& c) -> auto& { return c.illumination.target; }),
      real("illumination.flatness", [](auto& c) -> auto& { return c.illumination.flatness; }),
      real("blur.sigma", [](auto& c) -> auto& { return c.blur_sigma; }),
      {"calibration.src", [](C& c, std::string_view k, std::string_view v) { c.calibration_src = to_quad(k, v); },
       [](const C& c) { return fmt_quad(c.calibration_src); }},
      {"calibration.dst", [](C& c, std::string_view k, std::string_view v) { c.calibration_dst = to_quad(k, v); },
       [](const C& c) { return fmt_quad(c.calibration_dst); }},
      integer("birdseye.width", [](auto& c) -> auto& { return c.birdseye_width; }),
      integer("birdseye.height", [](auto& c) -> auto& { return c.birdseye_height; }),
      real("world.pixels_per_cm", [](auto& c) -> auto& { return c.world.pixels_per_cm; }),
      real("edges.low", [](auto& c) -> auto& { return c.edge_low; }),
      real("edges.high", [](auto& c) -> auto& { return c.edge_high; }),
      integer("hough.theta_bins", [](auto& c) -> auto& { return c.hough.theta_bins; }),
      real("hough.r_resolution", [](auto& c) -> auto& { return c.hough.r_resolution; }),
      integer("hough.votes_min", [](auto& c) -> auto& { return c.hough.votes_min; }),
      real("hough.min_length", [](auto& c) -> auto& { return c.hough.min_length; }),
      real("hough.max_gap", [](auto& c) -> auto& { return c.hough.max_gap; }),
      real("hough.piece_length", [](auto& c) -> auto& { return c.piece_length; }),
      {"centroid.weights",
       [](C& c, std::string_view k, std::string_view v) {
         const auto t = trim(v);
         if (t == "edges") c.centroid_weights = CentroidWeights::Edges;
         else if (t == "intensity") c.centroid_weights = CentroidWeights::Intensity;
         else bad_value(k, v, "'edges' or 'intensity'");
       },
       [](const C& c) { return std::string(c.centroid_weights == CentroidWeights::Edges ? "edges" : "intensity"); }},
      real("centroid.band", [](auto& c) -> auto& { return c.centroid_band; }),
      boolean("centroid.background", [](auto& c) -> auto& { return c.centroid_background; }),
      real("mvt.max_pair_gap", [](auto& c) -> auto& { return c.mvt.max_pair_gap; }),
      real("mvt.min_pair_gap", [](auto& c) -> auto& { return c.mvt.min_pair_gap; }),
      real("mvt.max_angle_spread", [](auto& c) -> auto& { return c.mvt.max_angle_spread; }),
      real("cluster.centroid_radius", [](auto& c) -> auto& { return c.cluster.centroid_radius; }),
      real("cluster.angle_tolerance", [](auto& c) -> auto& { return c.cluster.angle_tolerance; }),
      integer("cluster.votes_min", [](auto& c) -> auto& { return c.cluster.votes_min; }),
      integer("signature.length", [](auto& c) -> auto& { return c.signature_length; }),
      real("signature.envelope_tolerance", [](auto& c) -> auto& { return c.envelope_tolerance; }),
      real("signature.match_tolerance", [](auto& c) -> auto& { return c.match_tolerance; }),
      real("signature.match_threshold", [](auto& c) -> auto& { return c.match_threshold; }),
      {"bands", [](C& c, std::string_view k, std::string_view v) { c.bands = to_bands(k, v); },
       [](const C& c) { return fmt_bands(c.bands); }},
      real("lane.bin", [](auto& c) -> auto& { return c.lane_bin; }),
      boolean("tracker.enabled", [](auto& c) -> auto& { return c.tracker_enabled; }),
      real("tracker.max_gap_fraction", [](auto& c) -> auto& { return c.fill.max_gap_fraction; }),
      integer("tracker.persistence_limit", [](auto& c) -> auto& { return c.fill.persistence_limit; }),
      real("tracker.match_distance", [](auto& c) -> auto& { return c.fill.match_distance; }),
      real("tracker.smooth_alpha", [](auto& c) -> auto& { return c.smooth_alpha; }),
      real("tracker.texture_gate", [](auto& c) -> auto& { return c.texture_gate; }),
      integer("tracker.texture_tile", [](auto& c) -> auto& { return c.texture_tile; }),
      text("output.json", [](auto& c) -> auto& { return c.json_path; }),
      text("output.overlay", [](auto& c) -> auto& { return c.overlay_path; }),
  };
  return entries;
}

const Entry& find_entry(std::string_view key) {
  for (const auto& e : registry())
    if (key == e.key) return e;
  throw Error(ErrorCode::ConfigError, "unknown key '" + std::string(key) + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  try {
    hough.validate();
    mvt.validate();
    cluster.validate();
    validate_bands(bands);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!(blur_sigma > 0.0)) fail("blur.sigma must be positive");
  if (illumination.tile < 2) fail("illumination.tile must be at least 2");
  if (!(illumination.target > 0.0 && illumination.target <= 1.0)) fail("illumination.target outside (0, 1]");
  if (!(illumination.flatness >= 0.0)) fail("illumination.flatness must be non-negative");
  if (calibration_src.has_value() != calibration_dst.has_value())
    fail("calibration.src and calibration.dst must be given together");
  if (birdseye_width < 0 || birdseye_height < 0) fail("bird's-eye size must be non-negative");
  if (!(world.pixels_per_cm > 0.0)) fail("world.pixels_per_cm must be positive");
  if (!(edge_low >= 0.0 && edge_low <= edge_high && edge_high <= 1.0)) fail("need 0 <= edges.low <= edges.high <= 1");
  if (!(piece_length >= 0.0)) fail("hough.piece_length must be non-negative");
  if (!(centroid_band >= 0.0)) fail("centroid.band must be non-negative");
  if (signature_length < 2) fail("signature.length must be at least 2");
  if (!(envelope_tolerance >= 0.0)) fail("signature.envelope_tolerance must be non-negative");
  if (!(match_tolerance >= 0.0 && match_tolerance <= 90.0)) fail("signature.match_tolerance outside [0, 90]");
  if (!(match_threshold >= 0.0 && match_threshold <= 1.0)) fail("signature.match_threshold outside [0, 1]");
  if (!(lane_bin > 0.0)) fail("lane.bin must be positive");
  if (!(fill.max_gap_fraction >= 0.0 && fill.max_gap_fraction <= 1.0)) fail("tracker.max_gap_fraction outside [0, 1]");
  if (fill.persistence_limit < 0) fail("tracker.persistence_limit must be non-negative");
  if (!(fill.match_distance >= 0.0)) fail("tracker.match_distance must be non-negative");
  if (!(smooth_alpha >= 0.0 && smooth_alpha <= 1.0)) fail("tracker.smooth_alpha outside [0, 1]");
  if (!(texture_gate >= 0.0)) fail("tracker.texture_gate must be non-negative");
  if (texture_tile < 4) fail("tracker.texture_tile must be at least 4");
  if (calibration_src) {
    try {
      (void)homography();
    } catch (const Error& e) {
      fail(std::string("calibration: ") + e.what());
    }
  }
}

Homography PipelineConfig::homography() const {
  if (!calibration_src || !calibration_dst) return Homography::identity();
  return estimate_homography(*calibration_src, *calibration_dst);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : registry()) keys.emplace_back(e.key);
  return keys;
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  find_entry(trim(key)).set(cfg, trim(key), value);
}

std::string get_setting(const PipelineConfig& cfg, std::string_view key) { return find_entry(key).get(cfg); }

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(base, s.substr(0, eq), s.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& e : registry()) out += std::string(e.key) + " = " + e.get(cfg) + "\n";
  return out;
}

void apply_override(PipelineConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorCode::ConfigError, "override '" + std::string(assignment) + "' is not key=value");
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

}  // namespace curvelane
