#include "curvelane/shapes.hpp"

#include <algorithm>
#include <cmath>

#include "curvelane/error.hpp"

namespace curvelane {

namespace {

constexpr std::string_view kClassNames[] = {"line", "parabola", "circle", "ellipse", "hyperbola", "unknown"};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Point2 graph_point(FreeAxis axis, double t, double dep) {
  return axis == FreeAxis::X ? Point2{t, dep} : Point2{dep, t};
}

}  // namespace

std::string_view to_string(CurveClass c) { return kClassNames[static_cast<int>(c)]; }

std::optional<CurveClass> parse_curve_class(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kClassNames[i] == name) return static_cast<CurveClass>(i);
  }
  return std::nullopt;
}

CurveClass curve_class_of(const Shape& s) {
  return std::visit(overloaded{
                        [](const LineShape&) { return CurveClass::Line; },
                        [](const ParabolaShape&) { return CurveClass::Parabola; },
                        [](const HyperbolaShape&) { return CurveClass::Hyperbola; },
                        [](const SineShape&) { return CurveClass::Unknown; },
                        [](const CircleShape&) { return CurveClass::Circle; },
                        [](const EllipseShape&) { return CurveClass::Ellipse; },
                    },
                    s);
}

std::string_view shape_kind_name(const Shape& s) {
  if (std::holds_alternative<SineShape>(s)) return "sine";
  return to_string(curve_class_of(s));
}

Point2 shape_point(const Shape& s, double t) {
  return std::visit(
      overloaded{
          [t](const LineShape& l) { return l.from + t * (l.to - l.from); },
          [t](const ParabolaShape& p) { return graph_point(p.axis, t, p.c0 + p.c1 * t + p.c2 * t * t); },
          [t](const HyperbolaShape& h) {
            const double u = (t - h.centre_free) / h.a;
            return graph_point(h.axis, t, h.centre_dep + h.sign * h.b * std::sqrt(1.0 + u * u));
          },
          [t](const SineShape& w) {
            return graph_point(w.axis, t,
                               w.c0 + w.c1 * t +
                                   w.amplitude * std::sin(2.0 * std::numbers::pi * t / w.period + w.phase));
          },
          [t](const CircleShape& c) {
            return Point2{c.centre.x + c.radius * std::cos(t), c.centre.y + c.radius * std::sin(t)};
          },
          [t](const EllipseShape& e) {
            const double u = e.a * std::cos(t);
            const double v = e.b * std::sin(t);
            const double cr = std::cos(e.rotation), sr = std::sin(e.rotation);
            return Point2{e.centre.x + cr * u - sr * v, e.centre.y + sr * u + cr * v};
          },
      },
      s);
}

Point2 shape_velocity(const Shape& s, double t) {
  return std::visit(
      overloaded{
          [](const LineShape& l) { return l.to - l.from; },
          [t](const ParabolaShape& p) { return graph_point(p.axis, 1.0, p.c1 + 2.0 * p.c2 * t); },
          [t](const HyperbolaShape& h) {
            const double u = (t - h.centre_free) / h.a;
            return graph_point(h.axis, 1.0, h.sign * h.b * u / (h.a * std::sqrt(1.0 + u * u)));
          },
          [t](const SineShape& w) {
            const double k = 2.0 * std::numbers::pi / w.period;
            return graph_point(w.axis, 1.0, w.c1 + w.amplitude * k * std::cos(k * t + w.phase));
          },
          [t](const CircleShape& c) { return Point2{-c.radius * std::sin(t), c.radius * std::cos(t)}; },
          [t](const EllipseShape& e) {
            const double du = -e.a * std::sin(t);
            const double dv = e.b * std::cos(t);
            const double cr = std::cos(e.rotation), sr = std::sin(e.rotation);
            return Point2{cr * du - sr * dv, sr * du + cr * dv};
          },
      },
      s);
}

std::pair<double, double> shape_range(const Shape& s) {
  return std::visit(overloaded{
                        [](const LineShape&) { return std::pair{0.0, 1.0}; },
                        [](const ParabolaShape& p) { return std::pair{p.t0, p.t1}; },
                        [](const HyperbolaShape& h) { return std::pair{h.t0, h.t1}; },
                        [](const SineShape& w) { return std::pair{w.t0, w.t1}; },
                        [](const CircleShape& c) { return std::pair{c.phi0, c.phi1}; },
                        [](const EllipseShape& e) { return std::pair{e.phi0, e.phi1}; },
                    },
                    s);
}

void validate_shape(const Shape& s) {
  const auto [t0, t1] = shape_range(s);
  if (!(t1 > t0)) throw Error(ErrorCode::SpecInvalid, "curve parameter range must be increasing");
  std::visit(overloaded{
                 [](const LineShape& l) {
                   if (distance(l.from, l.to) <= 0.0) throw Error(ErrorCode::SpecInvalid, "line has zero length");
                 },
                 [](const ParabolaShape&) {},
                 [](const HyperbolaShape& h) {
                   if (!(h.a > 0.0) || !(h.b > 0.0) || (h.sign != 1 && h.sign != -1)) {
                     throw Error(ErrorCode::SpecInvalid, "hyperbola needs a, b > 0 and sign +-1");
                   }
                 },
                 [](const SineShape& w) {
                   if (!(w.period > 0.0)) throw Error(ErrorCode::SpecInvalid, "sine period must be positive");
                 },
                 [](const CircleShape& c) {
                   if (!(c.radius > 0.0)) throw Error(ErrorCode::SpecInvalid, "circle radius must be positive");
                 },
                 [](const EllipseShape& e) {
                   if (!(e.a > 0.0) || !(e.b > 0.0)) throw Error(ErrorCode::SpecInvalid, "ellipse axes must be positive");
                 },
             },
             s);
}

namespace {

struct FineTable {
  std::vector<double> t;
  std::vector<double> arc;
};

FineTable fine_table(const Shape& s) {
  const auto [t0, t1] = shape_range(s);
  constexpr int kSteps = 8192;
  FineTable table;
  table.t.resize(kSteps + 1);
  table.arc.resize(kSteps + 1);
  Point2 prev = shape_point(s, t0);
  table.t[0] = t0;
  table.arc[0] = 0.0;
  for (int i = 1; i <= kSteps; ++i) {
    const double t = t0 + (t1 - t0) * i / kSteps;
    const Point2 p = shape_point(s, t);
    table.t[i] = t;
    table.arc[i] = table.arc[i - 1] + distance(prev, p);
    prev = p;
  }
  return table;
}

}  // namespace

double shape_arc_length(const Shape& s) { return fine_table(s).arc.back(); }

std::vector<CurvePoint> sample_by_arc_length(const Shape& s, double spacing) {
  validate_shape(s);
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidParameter, "spacing must be positive");
  const FineTable table = fine_table(s);
  const double total = table.arc.back();
  const int count = static_cast<int>(std::floor(total / spacing)) + 1;
  std::vector<CurvePoint> out;
  out.reserve(count);
  std::size_t seg = 0;
  for (int k = 0; k < count; ++k) {
    const double target = std::min(k * spacing, total);
    while (seg + 2 < table.arc.size() && table.arc[seg + 1] < target) ++seg;
    const double a0 = table.arc[seg];
    const double a1 = table.arc[seg + 1];
    const double f = a1 > a0 ? (target - a0) / (a1 - a0) : 0.0;
    const double t = table.t[seg] + f * (table.t[seg + 1] - table.t[seg]);
    const Point2 v = shape_velocity(s, t);
    out.push_back({shape_point(s, t), fold_degrees(rad_to_deg(std::atan2(v.y, v.x))), target, t});
  }
  return out;
}

}  // namespace curvelane
