#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "curvelane/error.hpp"
#include "curvelane/pipeline.hpp"
#include "curvelane/signature.hpp"
#include "curvelane/synth.hpp"
#include "support.hpp"

using namespace curvelane;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

SlopeSignature random_signature(testing::Gen& g, int n = 32) {
  SlopeSignature s;
  for (int i = 0; i < n; ++i) s.angles.push_back(g.real(0, 180));
  return s;
}

// y = x^2 / 100 sampled every half pixel.
std::vector<TangentSample> parabola_samples() {
  std::vector<TangentSample> out;
  for (double x = -100; x <= 100; x += 0.5) {
    out.push_back({x, x * x / 100, fold_degrees(rad_to_deg(std::atan(x / 50))), 1.0});
  }
  return out;
}

}  // namespace

TEST_CASE("straight 45 degree samples give a flat signature") {
  std::vector<TangentSample> s;
  for (int i = 0; i < 50; ++i) s.push_back({double(i), double(i), 45.0, 1.0});
  const SlopeSignature sig = build_signature(s, 32);
  REQUIRE(sig.angles.size() == 32);
  for (double a : sig.angles) CHECK(a == doctest::Approx(45.0));
  CHECK(sig.arc_span == doctest::Approx(49.0));
}

TEST_CASE("parabola signature follows the analytic derivative") {
  const SlopeSignature sig = build_signature(parabola_samples(), 32);
  // Resampled positions are evenly spaced across the sample span.
  for (int i = 0; i < 32; ++i) {
    const double x = -100 + 200.0 * i / 31;
    const double truth = fold_degrees(rad_to_deg(std::atan(x / 50)));
    CHECK(axial_difference(sig.angles[i], truth) <= 3.0);
  }
  // Unwrapped, the angle climbs from about 117 through 180 (the vertex) to about 243.
  // The end entries clamp to the outermost knot, so only the interior must rise strictly.
  double prev = sig.angles[0];
  double unwrapped = prev;
  for (int i = 1; i < 32; ++i) {
    const double step = axial_delta(prev, sig.angles[i]);
    CHECK(step >= 0.0);
    if (i > 1 && i < 31) CHECK(step > 0.0);
    unwrapped += step;
    prev = sig.angles[i];
  }
  CHECK(std::abs(unwrapped - sig.angles[0] - 2 * rad_to_deg(std::atan(2.0))) <= 6.0);
}

TEST_CASE("signature input errors") {
  const std::vector<TangentSample> three{{0, 0, 10, 1}, {1, 0, 10, 1}, {2, 0, 10, 1}};
  CHECK(code_of([&] { build_signature(three, 32); }) == ErrorCode::InsufficientSamples);
  const std::vector<TangentSample> column{{5, 0, 90, 1}, {5, 1, 90, 1}, {5, 2, 90, 1}, {5, 3, 90, 1}};
  CHECK(code_of([&] { build_signature(column, 32); }) == ErrorCode::DegenerateSpan);
}

TEST_CASE("sample order does not matter") {
  testing::Gen g(51);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TangentSample> s;
    for (int i = 0; i < g.integer(4, 80); ++i) s.push_back({g.real(0, 300), g.real(0, 300), g.real(0, 180), g.real(0.1, 5)});
    const SlopeSignature a = build_signature(s, 24);
    std::shuffle(s.begin(), s.end(), g.engine());
    const SlopeSignature b = build_signature(s, 24);
    CHECK(a.angles == b.angles);
    CHECK(a.arc_span == b.arc_span);
  }
}

TEST_CASE("signature entries are folded") {
  testing::Gen g(52);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TangentSample> s;
    for (int i = 0; i < 30; ++i) s.push_back({g.real(0, 100), g.real(0, 100), g.real(0, 180), 1.0});
    for (double a : build_signature(s, 32).angles) {
      CHECK(a >= 0.0);
      CHECK(a < 180.0);
    }
  }
}

TEST_CASE("match boundary at ninety percent") {
  SlopeSignature ref;
  ref.angles.assign(32, 40.0);
  SlopeSignature cand = ref;
  for (int i = 0; i < 3; ++i) cand.angles[i] = 130.0;
  MatchResult m = match_signature(cand, ref, 10, 0.9);
  CHECK(m.score == 29.0 / 32.0);
  CHECK(m.matched);
  cand.angles[3] = 130.0;
  m = match_signature(cand, ref, 10, 0.9);
  CHECK(m.score == 28.0 / 32.0);
  CHECK_FALSE(m.matched);
}

TEST_CASE("identity, quarter turn and length mismatch") {
  testing::Gen g(53);
  const SlopeSignature s = random_signature(g);
  const MatchResult self = match_signature(s, s, 10, 0.9);
  CHECK(self.score == 1.0);
  CHECK(self.matched);
  CHECK(self.mean_residual == 0.0);
  SlopeSignature turned = s;
  for (double& a : turned.angles) a = fold_degrees(a + 90);
  const MatchResult off = match_signature(turned, s, 5, 0.9);
  CHECK(off.score == 0.0);
  CHECK_FALSE(off.matched);
  CHECK(code_of([&] { match_signature(random_signature(g, 31), s, 10, 0.9); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("match is symmetric and rotation invariant") {
  testing::Gen g(54);
  for (int trial = 0; trial < 500; ++trial) {
    const SlopeSignature a = random_signature(g);
    SlopeSignature b = a;
    // Half the entries nudged a little, the rest anywhere.
    for (double& x : b.angles) x = fold_degrees(g.coin() ? x + g.real(-15, 15) : g.real(0, 180));
    const double tol = g.real(1, 20);
    const MatchResult ab = match_signature(a, b, tol, 0.9);
    const MatchResult ba = match_signature(b, a, tol, 0.9);
    CHECK(ab.score == ba.score);
    CHECK(ab.mean_residual == doctest::Approx(ba.mean_residual));
    const double r = g.real(0, 360);
    SlopeSignature ar = a, br = b;
    for (double& x : ar.angles) x = fold_degrees(x + r);
    for (double& x : br.angles) x = fold_degrees(x + r);
    // Rounding can move a difference sitting exactly on the tolerance; allow one entry.
    CHECK(std::abs(match_signature(ar, br, tol, 0.9).score - ab.score) <= 1.0 / 32 + 1e-12);
  }
}

TEST_CASE("random pairs hit at about 2 tol / 180 per entry") {
  testing::Gen g(55);
  double total = 0;
  for (int trial = 0; trial < 1000; ++trial) total += match_signature(random_signature(g), random_signature(g), 10, 0.9).score;
  CHECK(total / 1000 == doctest::Approx(20.0 / 180.0).epsilon(0.1));
}

TEST_CASE("every template classifies as its own class") {
  const TemplateLibrary lib = standard_library(32);
  for (const CurveClass c : {CurveClass::Line, CurveClass::Parabola, CurveClass::Circle, CurveClass::Ellipse, CurveClass::Hyperbola}) {
    REQUIRE(lib.count(c) == 1);
    CHECK(!lib.at(c).empty());
  }
  for (const auto& [cls, templates] : lib) {
    for (const auto& t : templates) {
      CHECK(t.angles.size() == 32);
      const Classification r = classify_curve(t, lib, 10, 0.9);
      CHECK(r.curve_class == cls);
      CHECK(r.score == 1.0);
    }
  }
}

TEST_CASE("random signatures come back unknown") {
  const TemplateLibrary lib = standard_library(32);
  testing::Gen g(56);
  int unknown = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Classification r = classify_curve(random_signature(g), lib, 10, 0.9);
    if (r.curve_class == CurveClass::Unknown) {
      CHECK(r.score < 0.9);
      ++unknown;
    }
  }
  CHECK(unknown == 1000);
}

TEST_CASE("classification of analytic and rendered curves") {
  const TemplateLibrary lib = standard_library(32);
  const SlopeSignature line = analytic_signature(LineShape{{100, 300}, {500, 120}}, 32);
  CHECK(classify_curve(line, lib, 10, 0.9).curve_class == CurveClass::Line);

  SceneSpec s;
  s.curves.push_back({CircleShape{{320, 240}, 130}, 3.0, {}});
  const ClassifyResult r = classify_image(render(s).image, PipelineConfig{});
  CHECK(r.classification.curve_class == CurveClass::Circle);
  CHECK(r.classification.score >= 0.9);
}

TEST_CASE("rendered standard curves mostly classify correctly") {
  testing::Gen g(57);
  int ok = 0, total = 0;
  for (const CurveClass c : {CurveClass::Line, CurveClass::Parabola, CurveClass::Circle, CurveClass::Ellipse, CurveClass::Hyperbola}) {
    for (int i = 0; i < 4; ++i) {
      SceneSpec s;
      s.curves.push_back({testing::random_standard_shape(g, c), 3.0, {}});
      s.grain = 0.02;
      s.seed = i;
      ok += classify_image(render(s).image, PipelineConfig{}).classification.curve_class == c;
      ++total;
    }
  }
  CHECK(ok >= 17);
}

TEST_CASE("classification needs a library") {
  testing::Gen g(58);
  CHECK(code_of([&] { classify_curve(random_signature(g), {}, 10, 0.9); }) == ErrorCode::EmptyLibrary);
  TemplateLibrary hollow;
  hollow[CurveClass::Line] = {};
  CHECK(code_of([&] { classify_curve(random_signature(g), hollow, 10, 0.9); }) == ErrorCode::EmptyLibrary);
}

TEST_CASE("single best reference wins") {
  SlopeSignature a, b;
  a.label = "a";
  b.label = "b";
  a.angles.assign(32, 10.0);
  b.angles.assign(32, 100.0);
  SlopeSignature probe = b;
  probe.angles[0] = 10.0;
  const std::vector<SlopeSignature> refs{a, b};
  const ReferenceMatch m = match_references(probe, refs, 5, 0.9);
  REQUIRE(m.label);
  CHECK(*m.label == "b");
  CHECK(m.score == 31.0 / 32.0);
  SlopeSignature far;
  far.angles.assign(32, 55.0);
  const ReferenceMatch none = match_references(far, refs, 5, 0.9);
  CHECK_FALSE(none.label);
  CHECK(none.score == 0.0);
}

TEST_CASE("default bands") {
  const auto bands = default_bands();
  CHECK(assign_band(100, bands) == "blue");
  CHECK(assign_band(75, bands) == "green");
  CHECK(assign_band(90, bands) == "blue");
  CHECK(assign_band(60, bands) == "green");
  CHECK_FALSE(assign_band(120, bands));
  CHECK_FALSE(assign_band(30, bands));
  CHECK(assign_band(280, bands) == "blue");  // folds to 100
}

TEST_CASE("band assignment is total over the union") {
  testing::Gen g(59);
  for (int trial = 0; trial < 200; ++trial) {
    // Random contiguous partition of [lo, hi).
    std::vector<double> cuts{g.real(0, 60)};
    for (int k = 0; k < g.integer(1, 4); ++k) cuts.push_back(cuts.back() + g.real(1, 30));
    std::vector<AngleBand> bands;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) bands.push_back({"b" + std::to_string(k), cuts[k], cuts[k + 1]});
    validate_bands(bands);
    for (int i = 0; i < 20; ++i) {
      const double a = g.real(cuts.front(), cuts.back());
      const auto label = assign_band(a, bands);
      REQUIRE(label);
      CHECK(assign_band(a, bands) == label);
    }
    for (std::size_t k = 1; k + 1 < cuts.size(); ++k) CHECK(assign_band(cuts[k], bands) == "b" + std::to_string(k));
  }
}

TEST_CASE("band validation") {
  CHECK_THROWS_AS(validate_bands(std::vector<AngleBand>{{"a", 10, 50}, {"b", 40, 60}}), Error);
  CHECK_THROWS_AS(validate_bands(std::vector<AngleBand>{{"a", 50, 50}}), Error);
  CHECK_THROWS_AS(validate_bands(std::vector<AngleBand>{{"a", 10, 190}}), Error);
  CHECK_THROWS_AS(validate_bands(std::vector<AngleBand>{{"", 10, 20}}), Error);
  CHECK_NOTHROW(validate_bands(default_bands()));
}

TEST_CASE("signature records") {
  SlopeSignature s;
  s.label = "left";
  s.arc_span = 123.4567;
  s.angles = {0.0, 45.12345, 179.9996};
  const std::string line = format_signature_record(s);
  CHECK(line == "left,123.457,0.000,45.123,180.000");
  const SlopeSignature back = parse_signature_record(line);
  CHECK(back.label == "left");
  CHECK(back.arc_span == doctest::Approx(123.457));
  REQUIRE(back.angles.size() == 3);
  CHECK(back.angles[1] == doctest::Approx(45.123));
  CHECK(back.angles[2] == 0.0);  // 180 folds back to 0
  CHECK_THROWS_AS(parse_signature_record("x,1"), Error);
  CHECK_THROWS_AS(parse_signature_record("x,1,2,abc"), Error);
  s.label = "a,b";
  CHECK_THROWS_AS(format_signature_record(s), Error);
}

TEST_CASE("signature file round trip") {
  testing::Gen g(60);
  std::vector<SlopeSignature> sigs;
  for (int i = 0; i < 5; ++i) {
    SlopeSignature s = random_signature(g);
    s.label = "ref" + std::to_string(i);
    s.arc_span = g.real(10, 500);
    sigs.push_back(s);
  }
  const auto path = std::filesystem::temp_directory_path() / "curvelane_sig_test.txt";
  write_signature_file(path, sigs);
  const auto back = read_signature_file(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == sigs.size());
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    CHECK(back[i].label == sigs[i].label);
    CHECK(std::abs(back[i].arc_span - sigs[i].arc_span) <= 0.0005 + 1e-9);
    for (std::size_t k = 0; k < 32; ++k) CHECK(axial_difference(back[i].angles[k], sigs[i].angles[k]) <= 0.0005 + 1e-9);
  }
  CHECK_THROWS_AS(read_signature_file("/nonexistent/dir/sigs.txt"), Error);
}
