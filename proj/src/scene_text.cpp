#include <charconv>
#include <map>
#include <sstream>

#include "curvelane/error.hpp"
#include "curvelane/synth.hpp"

namespace curvelane {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::SpecInvalid, what); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> tokens(std::string_view v) {
  std::string text(v);
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double number(const std::string& key, const std::string& tok) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc() || p != tok.data() + tok.size()) invalid(key + ": '" + tok + "' is not a number");
  return x;
}

std::vector<double> numbers(const std::string& key, const std::vector<std::string>& toks, std::size_t from = 0) {
  std::vector<double> out;
  for (std::size_t i = from; i < toks.size(); ++i) out.push_back(number(key, toks[i]));
  return out;
}

FreeAxis axis_of(const std::string& key, const std::string& tok) {
  if (tok == "x") return FreeAxis::X;
  if (tok == "y") return FreeAxis::Y;
  invalid(key + ": axis must be x or y");
}

void expect(const std::string& key, const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (v.size() < lo || v.size() > hi) invalid(key + ": wrong number of shape parameters");
}

Shape parse_shape(const std::string& key, std::string_view value) {
  const auto t = tokens(value);
  if (t.empty()) invalid(key + ": empty shape");
  const std::string& kind = t[0];
  if (kind == "line") {
    const auto v = numbers(key, t, 1);
    expect(key, v, 4, 4);
    return LineShape{{v[0], v[1]}, {v[2], v[3]}};
  }
  if (kind == "circle" || kind == "ellipse") {
    const auto v = numbers(key, t, 1);
    if (kind == "circle") {
      expect(key, v, 3, 5);
      CircleShape c{{v[0], v[1]}, v[2]};
      if (v.size() == 5) {
        c.phi0 = deg_to_rad(v[3]);
        c.phi1 = deg_to_rad(v[4]);
      }
      return c;
    }
    expect(key, v, 5, 7);
    EllipseShape e{{v[0], v[1]}, v[2], v[3], deg_to_rad(v[4])};
    if (v.size() == 7) {
      e.phi0 = deg_to_rad(v[5]);
      e.phi1 = deg_to_rad(v[6]);
    }
    return e;
  }
  if (t.size() < 2) invalid(key + ": missing axis");
  const FreeAxis axis = axis_of(key, t[1]);
  const auto v = numbers(key, t, 2);
  if (kind == "parabola") {
    expect(key, v, 5, 5);
    return ParabolaShape{axis, v[0], v[1], v[2], v[3], v[4]};
  }
  if (kind == "hyperbola") {
    expect(key, v, 7, 7);
    return HyperbolaShape{axis, v[0], v[1], v[2], v[3], static_cast<int>(v[4]), v[5], v[6]};
  }
  if (kind == "sine") {
    expect(key, v, 7, 7);
    return SineShape{axis, v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }
  invalid(key + ": unknown shape '" + kind + "'");
}

std::string num(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string axis_name(FreeAxis a) { return a == FreeAxis::X ? "x" : "y"; }

std::string format_shape(const Shape& s) {
  struct Visitor {
    std::string operator()(const LineShape& l) const {
      return "line " + num(l.from.x) + " " + num(l.from.y) + " " + num(l.to.x) + " " + num(l.to.y);
    }
    std::string operator()(const ParabolaShape& p) const {
      return "parabola " + axis_name(p.axis) + " " + num(p.c0) + " " + num(p.c1) + " " + num(p.c2) + " " +
             num(p.t0) + " " + num(p.t1);
    }
    std::string operator()(const HyperbolaShape& h) const {
      return "hyperbola " + axis_name(h.axis) + " " + num(h.centre_free) + " " + num(h.centre_dep) + " " + num(h.a) +
             " " + num(h.b) + " " + std::to_string(h.sign) + " " + num(h.t0) + " " + num(h.t1);
    }
    std::string operator()(const SineShape& s) const {
      return "sine " + axis_name(s.axis) + " " + num(s.c0) + " " + num(s.c1) + " " + num(s.amplitude) + " " +
             num(s.period) + " " + num(s.phase) + " " + num(s.t0) + " " + num(s.t1);
    }
    std::string operator()(const CircleShape& c) const {
      return "circle " + num(c.centre.x) + " " + num(c.centre.y) + " " + num(c.radius) + " " +
             num(rad_to_deg(c.phi0)) + " " + num(rad_to_deg(c.phi1));
    }
    std::string operator()(const EllipseShape& e) const {
      return "ellipse " + num(e.centre.x) + " " + num(e.centre.y) + " " + num(e.a) + " " + num(e.b) + " " +
             num(rad_to_deg(e.rotation)) + " " + num(rad_to_deg(e.phi0)) + " " + num(rad_to_deg(e.phi1));
    }
  };
  return std::visit(Visitor{}, s);
}

}  // namespace

SceneSpec parse_scene_spec(std::string_view text) {
  SceneSpec spec;
  std::map<int, CurveSpec> curves;
  std::map<int, bool> has_shape;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) invalid("expected key = value in '" + std::string(s) + "'");
    const std::string key(trim(s.substr(0, eq)));
    const std::string_view value = trim(s.substr(eq + 1));
    const auto t = tokens(value);
    auto single = [&] {
      if (t.size() != 1) invalid(key + ": expected one value");
      return number(key, t[0]);
    };
    if (key == "size") {
      const auto v = numbers(key, t);
      expect(key, v, 2, 2);
      spec.width = static_cast<int>(v[0]);
      spec.height = static_cast<int>(v[1]);
    } else if (key == "seed") {
      const double v = single();
      if (v < 0 || v != std::floor(v)) invalid("seed must be a non-negative integer");
      spec.seed = static_cast<std::uint64_t>(v);
    } else if (key == "road_level") {
      spec.road_level = single();
    } else if (key == "paint_level") {
      spec.paint_level = single();
    } else if (key == "grain") {
      spec.grain = single();
    } else if (key == "noise.count") {
      spec.noise.count = static_cast<int>(single());
    } else if (key == "noise.length") {
      const auto v = numbers(key, t);
      expect(key, v, 2, 2);
      spec.noise.min_length = v[0];
      spec.noise.max_length = v[1];
    } else if (key == "noise.width") {
      spec.noise.width = single();
    } else if (key == "shadow") {
      if (t.size() == 1 && t[0] == "none") {
        spec.shadow.reset();
      } else {
        const auto v = numbers(key, t);
        expect(key, v, 2, 4);
        ShadowSpec sh{v[0], v[1]};
        if (v.size() == 4) {
          sh.start = v[2];
          sh.ramp = v[3];
        }
        spec.shadow = sh;
      }
    } else if (key.rfind("curve.", 0) == 0) {
      const auto dot = key.find('.', 6);
      if (dot == std::string::npos) invalid("unknown key '" + key + "'");
      int idx = 0;
      const auto [p, ec] = std::from_chars(key.data() + 6, key.data() + dot, idx);
      if (ec != std::errc() || p != key.data() + dot || idx < 0) invalid("bad curve index in '" + key + "'");
      const std::string field = key.substr(dot + 1);
      CurveSpec& c = curves[idx];
      if (field == "shape") {
        c.shape = parse_shape(key, value);
        has_shape[idx] = true;
      } else if (field == "width") {
        c.width = single();
      } else if (field == "gaps") {
        const auto v = numbers(key, t);
        if (v.size() % 2) invalid(key + ": gaps come in begin/end pairs");
        c.gaps.clear();
        for (std::size_t i = 0; i < v.size(); i += 2) c.gaps.push_back({v[i], v[i + 1]});
      } else {
        invalid("unknown key '" + key + "'");
      }
    } else {
      invalid("unknown key '" + key + "'");
    }
  }
  int expected = 0;
  for (auto& [idx, c] : curves) {
    if (idx != expected++) invalid("curve indices must run 0, 1, 2, ...");
    if (!has_shape[idx]) invalid("curve." + std::to_string(idx) + " has no shape");
    spec.curves.push_back(std::move(c));
  }
  validate_scene(spec);
  return spec;
}

std::string format_scene_spec(const SceneSpec& spec) {
  std::string out;
  out += "size = " + std::to_string(spec.width) + " " + std::to_string(spec.height) + "\n";
  out += "seed = " + std::to_string(spec.seed) + "\n";
  out += "road_level = " + num(spec.road_level) + "\n";
  out += "paint_level = " + num(spec.paint_level) + "\n";
  out += "grain = " + num(spec.grain) + "\n";
  out += "noise.count = " + std::to_string(spec.noise.count) + "\n";
  out += "noise.length = " + num(spec.noise.min_length) + " " + num(spec.noise.max_length) + "\n";
  out += "noise.width = " + num(spec.noise.width) + "\n";
  if (spec.shadow) {
    const auto& s = *spec.shadow;
    out += "shadow = " + num(s.direction_deg) + " " + num(s.strength) + " " + num(s.start) + " " + num(s.ramp) + "\n";
  } else {
    out += "shadow = none\n";
  }
  for (std::size_t i = 0; i < spec.curves.size(); ++i) {
    const auto& c = spec.curves[i];
    const std::string prefix = "curve." + std::to_string(i) + ".";
    out += prefix + "shape = " + format_shape(c.shape) + "\n";
    out += prefix + "width = " + num(c.width) + "\n";
    if (!c.gaps.empty()) {
      out += prefix + "gaps =";
      for (const auto& g : c.gaps) out += " " + num(g.begin) + " " + num(g.end);
      out += "\n";
    }
  }
  return out;
}

}  // namespace curvelane
