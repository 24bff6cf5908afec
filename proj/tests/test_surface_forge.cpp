#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "lagsol/curve_lab.hpp"
#include "lagsol/error.hpp"
#include "lagsol/io.hpp"
#include "lagsol/surface_forge.hpp"

using namespace lagsol;
using namespace lagsol::forge;
using curves::CurveKind;
using curves::CurveTrace;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

CurveTrace curve(CurveKind kind, double phi, double s_min, double s_max, double h, double xi0 = kPi / 2) {
  auto p = curves::default_preset_params(kind);
  p.s_min = s_min;
  p.s_max = s_max;
  p.h = h;
  if (kind != CurveKind::kLine && kind != CurveKind::kCircle) p.xi0 = xi0;
  return curves::preset_curve(kind, phi, p);
}

// Max over the grid of |f(i,j) - f(0,0)|.
template <typename F>
double spread(const SurfaceGrid& g, F f) {
  const auto ref = f(0, 0);
  double m = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) m = std::max(m, std::abs(f(i, j) - ref));
  }
  return m;
}

double stddev_z1_gap(const SurfaceGrid& a, const SurfaceGrid& b) {
  std::complex<double> mean = 0.0;
  for (std::size_t k = 0; k < a.points.size(); ++k) mean += a.points[k].z1 - b.points[k].z1;
  mean /= static_cast<double>(a.points.size());
  double var = 0.0;
  for (std::size_t k = 0; k < a.points.size(); ++k) var += std::norm(a.points[k].z1 - b.points[k].z1 - mean);
  return std::sqrt(var / static_cast<double>(a.points.size()));
}

SurfaceGrid single_point_grid(C2Point p) {
  SurfaceGrid g;
  g.t_samples = {0.0, 1.0};
  g.s_samples = {0.0, 1.0};
  g.h_t = g.h_s = 1.0;
  g.points.assign(4, p);
  return g;
}

}  // namespace

TEST_CASE("soliton angle range") {
  CHECK(SolitonAngle(0.0).value() == 0.0);
  CHECK_NOTHROW(SolitonAngle(std::nextafter(kPi, 0.0)));
  CHECK(code_of([] { SolitonAngle a(kPi); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { SolitonAngle a(-1e-12); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { SolitonAngle a(NAN); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("closed-form preset values") {
  const auto hsl = *preset_function(SurfaceKind::kHsl);
  const C2Point a = hsl(0.0, 1.0);
  CHECK(a.z1 == std::complex<double>(0.5, 0.0));
  CHECK(a.z2 == std::complex<double>(1.0, 0.0));
  const C2Point b = hsl(kPi / 2, 2.0);
  CHECK(std::abs(b.z1 - std::complex<double>(2.0, -kPi / 2)) < 1e-15);
  CHECK(std::abs(b.z2 - std::complex<double>(0.0, 2.0)) < 1e-15);

  const auto geo = *preset_function(SurfaceKind::kGeodesicPlane);
  CHECK(geo(1.0, 1.0).z1 == std::complex<double>(0.0, 0.0));
  CHECK(geo(1.0, 1.0).z2 == std::complex<double>(1.0, 0.0));
  CHECK(geo(0.0, 2.0).z1 == std::complex<double>(2.0, 0.0));

  const auto gp = *preset_function(SurfaceKind::kGrimProduct);
  CHECK(norm(gp(0.0, 0.0)) == 0.0);
  // Grim reaper of unit speed: |d/ds gamma| = 1.
  const double h = 1e-5;
  const auto d = (1.0 / (2 * h)) * (gp(0.0, 0.7 + h) - gp(0.0, 0.7 - h));
  CHECK(std::abs(d.z2) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(d.z1 == std::complex<double>(0.0, 0.0));

  const auto rot = *preset_function(SurfaceKind::kGrimProductRotated);
  const auto p = rot(0.3, -0.4);
  CHECK(std::abs(p.z1 - (gp(0.3, -0.4).z1 + gp(0.3, -0.4).z2)) < 1e-15);
  CHECK(std::abs(p.z2 - (gp(0.3, -0.4).z1 - gp(0.3, -0.4).z2)) < 1e-15);

  CHECK_FALSE(preset_function(SurfaceKind::kJlt).has_value());
  CHECK(preset_translating_vector(SurfaceKind::kGrimProduct) == C2Point{1.0, 1.0});
  CHECK(preset_translating_vector(SurfaceKind::kHsl) == C2Point{1.0, 0.0});
}

TEST_CASE("preset kinds and sources") {
  for (auto k : {SurfaceKind::kGrimCylinder, SurfaceKind::kGrimProduct, SurfaceKind::kGrimProductRotated,
                 SurfaceKind::kJlt, SurfaceKind::kKilling, SurfaceKind::kShrinkerLine, SurfaceKind::kHsl,
                 SurfaceKind::kGeodesicPlane}) {
    CHECK(parse_surface_kind(to_string(k)) == k);
    CHECK(preset_requires_trace(k) == !preset_function(k).has_value());
  }
  CHECK_FALSE(parse_surface_kind("torus").has_value());
  CHECK(code_of([] { preset_surface(SurfaceKind::kJlt, GridSpec{}); }) == ErrorCode::kMissingTrace);
  CHECK(code_of([] { preset_expectations(SurfaceKind::kKilling, GridSpec{}); }) == ErrorCode::kMissingTrace);
}

TEST_CASE("grid axes and sampling") {
  const auto axis = grid_axis(-1.0, 1.0, 1e-2);
  CHECK(axis.size() == 201);
  CHECK(axis.front() == -1.0);
  CHECK(axis.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(code_of([] { grid_axis(0.0, 1.0, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { grid_axis(1.0, 1.0, 0.1); }) == ErrorCode::kInvalidArgument);

  GridSpec spec;
  spec.t_min = 0.0;
  spec.h_t = 0.05;
  const auto g = preset_surface(SurfaceKind::kHsl, spec);
  CHECK(g.rows() == 21);
  CHECK(g.cols() == 201);
  CHECK(g.h_t == 0.05);
  CHECK_FALSE(g.phi.has_value());
  CHECK_NOTHROW(validate_grid(g));
  const auto f = *preset_function(SurfaceKind::kHsl);
  CHECK(g.at(7, 13) == f(g.t_samples[7], g.s_samples[13]));

  auto broken = g;
  broken.at(2, 2).z1 = NAN;
  CHECK(code_of([&] { validate_grid(broken); }) == ErrorCode::kNonFinite);
  broken = g;
  broken.t_samples[3] += 1e-4;
  CHECK(code_of([&] { validate_grid(broken); }) == ErrorCode::kSpacingMismatch);
  broken = g;
  broken.points.pop_back();
  CHECK(code_of([&] { validate_grid(broken); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("preset expectations match hand-derived metrics") {
  GridSpec spec;
  spec.h_t = spec.h_s = 0.1;
  const auto hsl = preset_expectations(SurfaceKind::kHsl, spec);
  const auto axis = grid_axis(-1.0, 1.0, 0.1);
  for (std::size_t i = 0; i < axis.size(); i += 3) {
    for (std::size_t j = 0; j < axis.size(); j += 5) {
      // Phi_t = (-i, i s e^{it}), Phi_s = (s, e^{it}): |Phi_t|^2 = |Phi_s|^2 = 1 + s^2.
      CHECK((*hsl.metric_factor)(i, j) == doctest::Approx(1 + axis[j] * axis[j]));
      CHECK((*hsl.angle)(i, j) == doctest::Approx(3 * kPi / 2 + axis[i]));
    }
  }
  const auto geo = preset_expectations(SurfaceKind::kGeodesicPlane, spec);
  CHECK((*geo.metric_factor)(0, 0) == doctest::Approx(2.0));
  CHECK((*geo.angle)(4, 9) == doctest::Approx(kPi));
  const auto rot = preset_expectations(SurfaceKind::kGrimProductRotated, spec);
  CHECK((*rot.metric_factor)(3, 3) == 2.0);
  const auto prod = preset_expectations(SurfaceKind::kGrimProduct, spec);
  CHECK((*prod.metric_factor)(3, 3) == 1.0);
}

TEST_CASE("circle times line reproduces the hsl preset") {
  const auto alpha = curve(CurveKind::kCircle, 0.0, -1.0, 1.0, 1e-2);
  const auto omega = curve(CurveKind::kLine, 0.0, -1.0, 1.0, 1e-2);
  REQUIRE(alpha.size() == 201);
  const auto star = build_star_product(alpha, omega, SolitonAngle(0.0));
  const auto expl = build_star_product_explicit(alpha, omega, SolitonAngle(0.0));
  REQUIRE(star.phi.has_value());
  CHECK(*star.phi == 0.0);
  CHECK(star.h_t == doctest::Approx(1e-2));
  const auto f = *preset_function(SurfaceKind::kHsl);
  const auto gap = [&](const SurfaceGrid& g) {
    return spread(g, [&](std::size_t i, std::size_t j) {
      return g.at(i, j).z1 - f(alpha[i].s, omega[j].s).z1;
    });
  };
  CHECK(gap(star) < 1e-8);
  CHECK(gap(expl) < 1e-8);
  for (std::size_t i = 0; i < star.rows(); i += 10) {
    for (std::size_t j = 0; j < star.cols(); j += 10) {
      CHECK(std::abs(star.at(i, j).z2 - f(alpha[i].s, omega[j].s).z2) < 1e-14);
    }
  }
  CHECK(spread(star, [&](std::size_t i, std::size_t j) { return star.at(i, j).z1 - expl.at(i, j).z1; }) < 1e-12);
  // Quadrature starts at the first samples.
  CHECK(std::abs(star.at(0, 0).z1) == 0.0);
}

TEST_CASE("rotation spirals at a right soliton angle") {
  const double phi = kPi / 2;
  const auto alpha = curve(CurveKind::kSpiralPos, phi, 0.0, 2.0, 1e-2, 0.0);
  const auto omega = curve(CurveKind::kSpiralNeg, phi, 0.0, 2.0, 1e-2, 0.0);
  const auto star = build_star_product(alpha, omega, SolitonAngle(phi));
  const auto expl = build_star_product_explicit(alpha, omega, SolitonAngle(phi));
  for (std::size_t k = 0; k < star.points.size(); ++k) CHECK(star.points[k].z2 == expl.points[k].z2);
  CHECK(stddev_z1_gap(star, expl) < 1e-5);
  // xi' = b <p, p'> integrates to xi = b |p|^2 / 2 + const on both sides.
  const auto angle = expected_angle(alpha, omega, SolitonAngle(phi));
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) {
      const double v = angle(i, j) - (std::norm(alpha[i].p) - std::norm(omega[j].p)) / 2;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  CHECK(hi - lo < 1e-8);
}

TEST_CASE("builders agree at a generic angle and converge") {
  const double phi = kPi / 4;
  const auto pair = [&](double h) {
    const auto a = curve(CurveKind::kShrinkerSeed, phi, -1.0, 1.0, h, kPi / 4);
    const auto w = curve(CurveKind::kExpanderSeed, phi, -1.0, 1.0, h, kPi / 4);
    return stddev_z1_gap(build_star_product(a, w, SolitonAngle(phi)), build_star_product_explicit(a, w, SolitonAngle(phi)));
  };
  CHECK(pair(1e-3) <= 1e-6);
  const double r0 = pair(2e-2);
  const double r1 = pair(1e-2);
  CHECK(std::log2(r0 / r1) >= 1.9);

  const auto a = curve(CurveKind::kShrinkerSeed, phi, -1.0, 1.0, 1e-2, kPi / 4);
  const auto w = curve(CurveKind::kExpanderSeed, phi, -1.0, 1.0, 1e-2, kPi / 4);
  const auto [ra, rw] = star_law_residuals(a, w, SolitonAngle(phi));
  CHECK(ra < 1e-12);
  CHECK(rw < 1e-12);
  const auto m = expected_metric_factor(a, w);
  CHECK(m(5, 7) == doctest::Approx(std::norm(a[5].p) + std::norm(w[7].p)));
}

TEST_CASE("star product input errors") {
  const auto circle = curve(CurveKind::kCircle, 0.0, -1.0, 1.0, 1e-2);
  const auto line = curve(CurveKind::kLine, 0.0, -1.0, 1.0, 1e-2);
  // Swapped sides break both laws.
  CHECK(code_of([&] { build_star_product(line, circle, SolitonAngle(0.0)); }) == ErrorCode::kLawMismatch);
  // Circle law is wrong for phi = pi/2.
  CHECK(code_of([&] { build_star_product(circle, line, SolitonAngle(kPi / 2)); }) == ErrorCode::kLawMismatch);
  const auto coarse = curve(CurveKind::kLine, 0.0, -1.0, 1.0, 2e-2);
  // Different spacings per axis are fine; each axis keeps its own.
  const auto mixed = build_star_product(circle, coarse, SolitonAngle(0.0));
  CHECK(mixed.h_t == doctest::Approx(1e-2));
  CHECK(mixed.h_s == doctest::Approx(2e-2));
  CHECK_NOTHROW(validate_grid(mixed));
  auto uneven = line;
  uneven.samples[4].s += 1e-3;
  CHECK(code_of([&] { build_star_product_explicit(circle, uneven, SolitonAngle(0.0)); }) ==
        ErrorCode::kSpacingMismatch);
}

TEST_CASE("points where both curves meet the origin are flagged") {
  const auto line = curve(CurveKind::kLine, 0.0, -1.0, 1.0, 0.25);
  const auto g = build_star_product(line, line, SolitonAngle(0.0));
  REQUIRE(g.degenerate.size() == 1);
  const auto [i, j] = g.degenerate.front();
  CHECK(line[i].s == 0.0);
  CHECK(line[j].s == 0.0);
  // line * line at phi = 0 is the geodesic plane.
  const auto geo = *preset_function(SurfaceKind::kGeodesicPlane);
  CHECK(spread(g, [&](std::size_t a, std::size_t b) { return g.at(a, b).z1 - geo(line[a].s, line[b].s).z1; }) <
        1e-14);
}

TEST_CASE("membership of M") {
  GridSpec spec;
  spec.t_min = -3.0;
  spec.t_max = 3.0;
  spec.s_min = -2.0;
  spec.s_max = 2.0;
  spec.h_t = spec.h_s = 2e-2;
  const auto hsl = preset_surface(SurfaceKind::kHsl, spec);
  const auto r = membership_residual_M(hsl);
  CHECK(r.max_eq_residual < 1e-12);
  CHECK(r.min_re_z >= 0.0);

  CHECK(membership_residual_M(single_point_grid({{0.0, 0.0}, {1.0, 0.0}})).max_eq_residual == doctest::Approx(1.0));
  CHECK(membership_residual_M(single_point_grid({{0.5, 0.0}, {1.0, 0.0}})).max_eq_residual < 1e-15);
  // Translation is subtracted first.
  const C2Point shift{{1.0, 2.0}, {0.0, -1.0}};
  const auto moved = transform_grid(hsl, {1.0, 0.0, 0.0, 1.0}, shift);
  CHECK(membership_residual_M(moved, shift).max_eq_residual < 1e-11);
  CHECK(membership_residual_M(moved).max_eq_residual > 1e-2);
}

TEST_CASE("transform_grid applies U p + shift") {
  const auto g = preset_surface(SurfaceKind::kGeodesicPlane, GridSpec{});
  const std::complex<double> i1{0.0, 1.0};
  const auto out = transform_grid(g, {0.0, i1, 1.0, 0.0}, C2Point{{1.0, 0.0}, {0.0, 0.0}});
  CHECK(out.h_t == g.h_t);
  for (std::size_t k = 0; k < g.points.size(); k += 37) {
    CHECK(out.points[k].z1 == i1 * g.points[k].z2 + 1.0);
    CHECK(out.points[k].z2 == g.points[k].z1);
  }
}

TEST_CASE("surface CSV round trip") {
  GridSpec spec;
  spec.h_t = spec.h_s = 0.25;
  auto g = preset_surface(SurfaceKind::kHsl, spec);
  std::stringstream ss;
  io::write_surface_csv(ss, g);
  const auto back = io::read_surface_csv(ss, "roundtrip");
  REQUIRE(back.points.size() == g.points.size());
  for (std::size_t k = 0; k < g.points.size(); ++k) CHECK(back.points[k] == g.points[k]);
  CHECK(back.t_samples == g.t_samples);
  CHECK(back.h_s == doctest::Approx(0.25));
}
