#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "lagsol/error.hpp"
#include "lagsol/geo_verify.hpp"
#include "lagsol/runner.hpp"
#include "lagsol/surface_forge.hpp"

using namespace lagsol;
using namespace lagsol::verify;
using forge::GridSpec;
using forge::SurfaceKind;

namespace {

using cplx = std::complex<double>;
const cplx kI{0.0, 1.0};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

GridSpec unit_grid(double h) {
  GridSpec g;
  g.h_t = g.h_s = h;
  return g;
}

SurfaceGrid preset(SurfaceKind kind, double h) { return forge::preset_surface(kind, unit_grid(h)); }

// Largest value of f over the interior block [2, n - 2).
template <typename F>
double interior_max(const SurfaceGrid& g, F f) {
  double m = 0.0;
  for (std::size_t i = 2; i + 2 < g.rows(); ++i) {
    for (std::size_t j = 2; j + 2 < g.cols(); ++j) m = std::max(m, f(i, j));
  }
  return m;
}

double dist(const C2Point& a, const C2Point& b) { return norm(a - b); }

}  // namespace

TEST_CASE("finite-difference partials") {
  SUBCASE("hsl first derivatives to second order") {
    const double h = 1e-2;
    const auto g = preset(SurfaceKind::kHsl, h);
    const auto d = partials(g);
    const double err = interior_max(g, [&](std::size_t i, std::size_t j) {
      const double t = g.t_samples[i], s = g.s_samples[j];
      const C2Point pt{-kI, kI * s * std::polar(1.0, t)};
      const C2Point ps{s, std::polar(1.0, t)};
      return std::max(dist(d.phi_t(i, j), pt), dist(d.phi_s(i, j), ps));
    });
    CHECK(err < h * h);
    CHECK(err > 0.0);
  }
  SUBCASE("quadratic surface is exact") {
    const auto g = preset(SurfaceKind::kGeodesicPlane, 0.1);
    const auto d = partials(g);
    const double err = interior_max(g, [&](std::size_t i, std::size_t j) {
      const double t = g.t_samples[i], s = g.s_samples[j];
      return dist(d.phi_t(i, j), {-t, s}) + dist(d.phi_s(i, j), {s, t}) + dist(d.phi_tt(i, j), {-1.0, 0.0}) +
             dist(d.phi_ss(i, j), {1.0, 0.0});
    });
    CHECK(err < 1e-12);
  }
  SUBCASE("constant surface") {
    const auto g = forge::sample_surface([](double, double) { return C2Point{{2.0, 1.0}, {-3.0, 0.5}}; },
                                         unit_grid(0.1), "constant");
    const auto d = partials(g);
    for (const auto* f : {&d.phi_t, &d.phi_s, &d.phi_tt, &d.phi_ss}) {
      for (const auto& v : f->values) CHECK(norm(v) == 0.0);
    }
  }
  SUBCASE("grids below 5x5 are rejected") {
    GridSpec spec;
    spec.t_min = 0.0;
    spec.t_max = 0.3;
    spec.h_t = 0.1;
    const auto g = forge::preset_surface(SurfaceKind::kHsl, spec);
    REQUIRE(g.rows() == 4);
    CHECK(code_of([&] { partials(g); }) == ErrorCode::kGridTooSmall);
    CHECK(code_of([&] { verify_surface(g); }) == ErrorCode::kGridTooSmall);
  }
}

TEST_CASE("induced metric") {
  const double h = 1e-2;
  const auto g = preset(SurfaceKind::kHsl, h);
  const auto m = induced_metric(g);
  const double err = interior_max(g, [&](std::size_t i, std::size_t j) {
    const double e = 1 + g.s_samples[j] * g.s_samples[j];
    return std::max({std::abs(m.e(i, j) - e), std::abs(m.g(i, j) - e), std::abs(m.f(i, j))});
  });
  CHECK(err < h * h);
  const auto c = conformality_check(g);
  CHECK_FALSE(c.metric_factor.has_value());
  CHECK(interior_max(g, [&](std::size_t i, std::size_t j) { return c.conformal(i, j); }) < h * h);
}

TEST_CASE("graph control fails the Lagrangian gate") {
  // z1 = t + i s, z2 = t^2: (Phi_t, Phi_s) = (1)(-i) + 0, so |Im| = 1 everywhere.
  const auto g = cli::graph_control(unit_grid(1e-2));
  const auto lag = lagrangian_check(g);
  CHECK(interior_max(g, [&](std::size_t i, std::size_t j) { return std::abs(lag(i, j) - 1.0); }) < 1e-12);
  CHECK(code_of([&] { lagrangian_angle(g); }) == ErrorCode::kGateFailure);
  CHECK(code_of([&] { mean_curvature(g); }) == ErrorCode::kGateFailure);
  const auto rep = verify_surface(g);
  CHECK_FALSE(rep.gate_passed);
  CHECK(rep.summary("h_cross") == nullptr);
  CHECK(rep.summary("lagrangian")->max == doctest::Approx(1.0));
  const auto out = evaluate(rep, 10.0, default_gated_identities({}));
  bool any_fail = false;
  for (const auto& o : out) any_fail = any_fail || !o.pass;
  CHECK(any_fail);
  for (const auto& o : out) {
    if (o.identity == "h_cross") {
      CHECK(std::isinf(o.value));
      CHECK_FALSE(o.pass);
    }
  }
}

TEST_CASE("mean curvature of hsl") {
  const double h = 1e-2;
  const auto g = preset(SurfaceKind::kHsl, h);
  const auto mc = mean_curvature(g);
  // Phi_tt + Phi_ss = (1, -s e^{it}) and e^{2u} = 1 + s^2.
  const double err = interior_max(g, [&](std::size_t i, std::size_t j) {
    const double t = g.t_samples[i], s = g.s_samples[j];
    const C2Point expected = (1.0 / (1 + s * s)) * C2Point{1.0, -s * std::polar(1.0, t)};
    return std::max(dist(mc.laplace(i, j), expected), dist(mc.angle(i, j), expected));
  });
  CHECK(err < 10 * h * h);
  CHECK(interior_max(g, [&](std::size_t i, std::size_t j) { return mc.cross(i, j); }) < 10 * h * h);
}

TEST_CASE("lagrangian angle of closed-form presets") {
  const double h = 2e-2;
  SUBCASE("hsl: beta = 3 pi / 2 + t up to a multiple of 2 pi") {
    const auto g = preset(SurfaceKind::kHsl, h);
    const auto beta = lagrangian_angle(g);
    const double shift = beta(1, 1) - (3 * kPi / 2 + g.t_samples[1]);
    CHECK(std::abs(std::remainder(shift, 2 * kPi)) < 10 * h * h);
    CHECK(interior_max(g, [&](std::size_t i, std::size_t j) {
            return std::abs(beta(i, j) - (3 * kPi / 2 + g.t_samples[i]) - shift);
          }) < 10 * h * h);
  }
  SUBCASE("geodesic plane has constant angle") {
    const auto g = preset(SurfaceKind::kGeodesicPlane, h);
    const auto beta = lagrangian_angle(g);
    // The origin is a branch point of the metric; skip its neighbourhood.
    double spread = 0.0;
    for (std::size_t i = 1; i + 1 < g.rows(); ++i) {
      for (std::size_t j = 1; j + 1 < g.cols(); ++j) {
        const double r = std::hypot(g.t_samples[i], g.s_samples[j]);
        if (r > 0.1) spread = std::max(spread, std::abs(std::remainder(beta(i, j) - kPi, 2 * kPi)));
      }
    }
    CHECK(spread < 1e-10);
  }
}

TEST_CASE("soliton residual") {
  const double h = 1e-2;
  for (auto kind : {SurfaceKind::kHsl, SurfaceKind::kGrimCylinder, SurfaceKind::kGrimProduct,
                    SurfaceKind::kGrimProductRotated, SurfaceKind::kGeodesicPlane}) {
    const auto g = preset(kind, h);
    const auto r = soliton_residual(g, g.translating_vector);
    CHECK(interior_max(g, [&](std::size_t i, std::size_t j) { return r(i, j); }) <= 10 * h * h);
  }
  // The wrong translating vector is detected.
  const auto g = preset(SurfaceKind::kHsl, h);
  const auto r = soliton_residual(g, C2Point{0.0, 1.0});
  CHECK(interior_max(g, [&](std::size_t i, std::size_t j) { return r(i, j); }) > 0.1);
}

TEST_CASE("constant angle offset, drift and energy identities") {
  const double h = 1e-2;
  for (auto kind : {SurfaceKind::kHsl, SurfaceKind::kGrimProduct, SurfaceKind::kKilling, SurfaceKind::kJlt}) {
    CAPTURE(forge::to_string(kind));
    const auto built = cli::build_preset(kind, unit_grid(h));
    const auto p = prop1_checks(built.grid, built.grid.translating_vector);
    CHECK(p.std_dev <= 10 * h * h);
    CHECK(p.max_drift <= 10 * h * h);
    CHECK(p.max_energy <= 10 * h * h);
  }
  // hsl: beta + <Phi, J e> = 3 pi / 2 + t + Im z1 = 3 pi / 2 (mod 2 pi).
  const auto g = preset(SurfaceKind::kHsl, h);
  const auto p = prop1_checks(g, g.translating_vector);
  CHECK(std::abs(std::remainder(p.beta0 - 3 * kPi / 2, 2 * kPi)) < 10 * h * h);
}

TEST_CASE("harmonic angle") {
  const double h = 1e-2;
  CHECK(harmonic_check(preset(SurfaceKind::kHsl, h)) <= 10 * h * h);
  CHECK(harmonic_check(preset(SurfaceKind::kGrimCylinder, h)) > 0.1);
  const auto jlt = cli::build_preset(SurfaceKind::kJlt, unit_grid(h));
  CHECK(harmonic_check(jlt.grid) > 0.1);
}

TEST_CASE("verify_surface report") {
  const double h = 2e-2;
  const auto kind = SurfaceKind::kHsl;
  const auto g = forge::preset_surface(kind, unit_grid(h));
  const auto ex = forge::preset_expectations(kind, unit_grid(h));
  VerifyOptions opts;
  opts.expectations = &ex;
  opts.expect_harmonic = true;
  const auto rep = verify_surface(g, opts);
  CHECK(rep.gate_passed);
  CHECK(rep.h() == h);
  CHECK(rep.degenerate_count == 0);
  for (const char* name : {"conformality", "lagrangian", "soliton", "h_cross", "prop1_const", "prop1_drift",
                           "prop1_energy", "harmonic", "angle", "metric_factor"}) {
    CAPTURE(name);
    REQUIRE(rep.summary(name) != nullptr);
    CHECK(rep.summary(name)->count == (g.rows() - 4) * (g.cols() - 4));
    CHECK(rep.identities.at(name).field.rows == g.rows() - 4);
  }
  REQUIRE(rep.beta0.has_value());
  REQUIRE(rep.angle_constant.has_value());
  const auto out = evaluate(rep, 10.0, default_gated_identities(opts));
  CHECK(out.size() == 10);
  for (const auto& o : out) {
    CAPTURE(o.identity);
    CHECK(o.pass);
    CHECK(o.tolerance == doctest::Approx(10 * h * h));
  }

  SUBCASE("wider margin") {
    opts.interior_margin = 4;
    const auto wide = verify_surface(g, opts);
    CHECK(wide.interior_margin == 4);
    CHECK(wide.summary("soliton")->count == (g.rows() - 8) * (g.cols() - 8));
    opts.interior_margin = 1;
    CHECK(code_of([&] { verify_surface(g, opts); }) == ErrorCode::kInvalidArgument);
  }
  SUBCASE("degenerate points are excluded") {
    const auto geo = preset(SurfaceKind::kGeodesicPlane, h);
    auto flagged = geo;
    flagged.degenerate.emplace_back(10, 10);
    const auto a = verify_surface(geo);
    const auto b = verify_surface(flagged);
    CHECK(b.degenerate_count == a.degenerate_count + 1);
    CHECK(b.summary("soliton")->count + 1 == a.summary("soliton")->count);
    CHECK(std::isnan(b.identities.at("soliton").field(8, 8)));
  }
}

TEST_CASE("convergence study") {
  const std::vector<double> hs{1e-2, 5e-3, 2.5e-3};
  SUBCASE("hsl is second order") {
    const auto st = convergence_study(
        [](double h) {
          return SurfaceCase{preset(SurfaceKind::kHsl, h), forge::preset_expectations(SurfaceKind::kHsl, unit_grid(h))};
        },
        hs);
    CHECK(st.hs == hs);
    for (const char* name : {"soliton", "conformality", "h_cross"}) {
      CAPTURE(name);
      const auto* row = st.row(name);
      REQUIRE(row != nullptr);
      REQUIRE(row->orders.size() == 2);
      for (const auto& o : row->orders) {
        REQUIRE(o.has_value());
        CHECK(*o >= 1.7);
        CHECK(*o <= 2.3);
      }
    }
  }
  SUBCASE("exact identities report no order") {
    // Central differences are exact on quadratics, so the soliton residual is
    // round-off. It grows like eps / h^2 near the branch point at the origin,
    // so only the two coarse levels stay under the floor.
    const std::vector<double> coarse{1e-2, 5e-3};
    const auto st = convergence_study([](double h) { return SurfaceCase{preset(SurfaceKind::kGeodesicPlane, h), {}}; },
                                      coarse);
    REQUIRE(st.row("soliton")->orders.size() == 1);
    for (const auto& o : st.row("soliton")->orders) CHECK_FALSE(o.has_value());
  }
  SUBCASE("sheared control does not converge") {
    const auto st = convergence_study(
        [](double h) { return SurfaceCase{cli::sheared_preset(SurfaceKind::kHsl, unit_grid(h), 0.3), {}}; }, hs);
    for (const auto& o : st.row("conformality")->orders) {
      REQUIRE(o.has_value());
      CHECK(std::abs(*o) < 0.2);
    }
  }
}

TEST_CASE("unitary covariance") {
  const double h = 2e-2;
  const auto g = preset(SurfaceKind::kHsl, h);
  const auto compare = [&](const std::array<cplx, 4>& u, C2Point shift) {
    const auto moved = forge::transform_grid(g, u, shift);
    const C2Point e = g.translating_vector;
    const C2Point ue{u[0] * e.z1 + u[1] * e.z2, u[2] * e.z1 + u[3] * e.z2};
    VerifyOptions a;
    VerifyOptions b;
    b.translating_vector = ue;
    const auto ra = verify_surface(g, a);
    const auto rb = verify_surface(moved, b);
    REQUIRE(rb.gate_passed);
    for (const auto& [name, field] : ra.identities) {
      CAPTURE(name);
      const auto& other = rb.identities.at(name).field;
      double gap = 0.0;
      for (std::size_t k = 0; k < field.field.values.size(); ++k) {
        gap = std::max(gap, std::abs(field.field.values[k] - other.values[k]));
      }
      // beta comes from first differences (rounding eps / h) and is then
      // differenced twice, so identities built on its Laplacian carry eps / h^3.
      const double eps = std::numeric_limits<double>::epsilon();
      CHECK(gap <= 1e-10 * std::max(1.0, field.summary.max) + 16 * eps / (h * h * h));
    }
    // The angle shifts by arg det U and <Phi, J e> by <shift, J U e>.
    const double shift_angle = std::arg(u[0] * u[3] - u[1] * u[2]) + dot(shift, rotate_j(ue));
    CHECK(std::abs(std::remainder(*rb.beta0 - *ra.beta0 - shift_angle, 2 * kPi)) < 1e-10);
  };
  SUBCASE("phase on the second factor") { compare({1.0, 0.0, 0.0, kI}, {}); }
  SUBCASE("translation") { compare({1.0, 0.0, 0.0, 1.0}, C2Point{{3.0, -1.0}, {0.5, 2.0}}); }
  SUBCASE("general unitary moving the translating vector") {
    const double c = std::cos(0.7), s = std::sin(0.7);
    const cplx ph = std::polar(1.0, 0.3);
    compare({ph * c, -ph * s, std::conj(ph) * s, std::conj(ph) * c}, C2Point{{0.0, 1.0}, {1.0, 0.0}});
  }
}
