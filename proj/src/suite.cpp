#include "lagsol/suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagsol/csf_sim.hpp"
#include "lagsol/error.hpp"
#include "lagsol/geo_verify.hpp"
#include "lagsol/runner.hpp"

namespace lagsol::cli {

namespace {

using Json = nlohmann::ordered_json;
using curves::CurveKind;
using forge::SurfaceKind;

constexpr double kCoarseH = 1e-2;
constexpr double kFineH = 1e-3;
constexpr double kBuilderTolerance = 1e-6;
constexpr double kMembershipTolerance = 1e-12;
constexpr double kKabTolerance = 1e-8;
constexpr double kFirstIntegralTolerance = 1e-6;
constexpr double kRadiusTolerance = 1e-3;
constexpr double kCircleHausdorff = 5e-3;
constexpr double kSpiralHausdorff = 1e-2;
constexpr double kNegativeFactor = 10.0;

const SurfaceKind kPresets[] = {SurfaceKind::kHsl,          SurfaceKind::kGeodesicPlane,
                                SurfaceKind::kGrimCylinder, SurfaceKind::kGrimProduct,
                                SurfaceKind::kGrimProductRotated, SurfaceKind::kKilling,
                                SurfaceKind::kShrinkerLine, SurfaceKind::kJlt};

forge::GridSpec square(double h, double lo = -1.0, double hi = 1.0) { return {lo, hi, lo, hi, h, h}; }

struct StarCase {
  std::string name;
  SurfaceSpec spec;
};

CurveSpec seed(CurveKind kind, double phi, double lo, double hi, double h) {
  CurveSpec c;
  c.kind = kind;
  const auto d = curves::default_preset_params(kind);
  c.p0 = d.p0;
  c.xi0 = d.xi0;
  c.s_min = lo;
  c.s_max = hi;
  c.h = h;
  c.phi = phi;
  return c;
}

std::string phi_label(double phi) {
  if (phi == 0.0) return "0";
  if (std::abs(phi - kPi / 4) < 1e-12) return "pi/4";
  if (std::abs(phi - kPi / 2) < 1e-12) return "pi/2";
  if (std::abs(phi - 3 * kPi / 4) < 1e-12) return "3pi/4";
  return io::format_real(phi);
}

// The alpha * omega pairs: circle with the line through the origin, the
// shrinker and expander seeds at each sampled angle, and the two spirals.
std::vector<StarCase> star_cases(double h) {
  std::vector<StarCase> out;
  auto add = [&](std::string name, double phi, CurveSpec a, CurveSpec w) {
    out.push_back({std::move(name), SurfaceSpec{phi, std::move(a), std::move(w), false}});
  };
  add("circle*line@0", 0.0, seed(CurveKind::kCircle, 0.0, -1, 1, h), seed(CurveKind::kLine, 0.0, -1, 1, h));
  for (double phi : {0.0, kPi / 4, kPi / 2, 3 * kPi / 4}) {
    add("shrinker*expander@" + phi_label(phi), phi, seed(CurveKind::kShrinkerSeed, phi, -1, 1, h),
        seed(CurveKind::kExpanderSeed, phi, -1, 1, h));
  }
  // Radial start: the arc [0, 2] keeps both spirals away from the origin.
  add("spiral_pos*spiral_neg@pi/2", kPi / 2, seed(CurveKind::kSpiralPos, kPi / 2, 0, 2, h),
      seed(CurveKind::kSpiralNeg, kPi / 2, 0, 2, h));
  return out;
}

verify::GeometryReport verify_case(const BuiltSurface& b, double c) {
  verify::VerifyOptions o;
  o.tolerance_c = c;
  o.expectations = &b.expectations;
  return verify::verify_surface(b.grid, o);
}

double summary_value(const verify::GeometryReport& r, const std::string& id) {
  const verify::Summary* s = r.summary(id);
  if (s == nullptr) return std::numeric_limits<double>::infinity();
  return id == "prop1_const" ? s->rms : s->max;
}

double tol(double c, double h) { return c * h * h; }

CriterionResult soliton_presets(double c) {
  CriterionResult out{1, "soliton identity on the closed-form presets", {}};
  const double h = kCoarseH;
  for (SurfaceKind kind : kPresets) {
    const std::string name(forge::to_string(kind));
    const auto coarse = verify_case(build_preset(kind, square(h)), c);
    const auto fine = verify_case(build_preset(kind, square(h / 2)), c);
    const double r0 = summary_value(coarse, "soliton");
    const double r1 = summary_value(fine, "soliton");
    out.checks.push_back(at_most(name + ".soliton", r0, tol(c, h)));
    const double f0 = verify::kFloorFraction * tol(c, h);
    const double f1 = verify::kFloorFraction * tol(c, h / 2);
    if (r0 < f0 && r1 < f1) {
      out.checks.push_back(at_most(name + ".soliton_refined", r1, f1, "round-off level at both spacings"));
    } else {
      out.checks.push_back(at_least(name + ".soliton_ratio", r0 / r1, 3.0));
      out.checks.push_back(at_most(name + ".soliton_ratio", r0 / r1, 5.0));
    }
  }
  return out;
}

double builder_difference(const SurfaceSpec& spec) {
  SurfaceSpec q = spec;
  q.explicit_builder = false;
  const auto a = build_star(q).grid;
  q.explicit_builder = true;
  const auto b = build_star(q).grid;
  std::complex<double> mean{};
  for (std::size_t k = 0; k < a.points.size(); ++k) mean += a.points[k].z1 - b.points[k].z1;
  mean /= static_cast<double>(a.points.size());
  double var = 0.0;
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    var += std::norm(a.points[k].z1 - b.points[k].z1 - mean) + std::norm(a.points[k].z2 - b.points[k].z2);
  }
  return std::sqrt(var / static_cast<double>(a.points.size()));
}

CriterionResult star_suite(double c) {
  CriterionResult out{2, "alpha*omega construction oracle suite", {}};
  const double h = kCoarseH;
  for (const auto& sc : star_cases(h)) {
    const auto r = verify_case(build_star(sc.spec), c);
    for (const char* id : {"conformality", "lagrangian", "metric_factor", "angle", "soliton"}) {
      out.checks.push_back(at_most(sc.name + "." + id, summary_value(r, id), tol(c, h)));
    }
  }
  for (const auto& sc : star_cases(kFineH)) {
    out.checks.push_back(at_most(sc.name + ".builder_difference", builder_difference(sc.spec), kBuilderTolerance,
                                 "spread of the quadrature minus closed-form builder at h = 1e-3"));
  }
  return out;
}

CriterionResult angle_suite(double c) {
  CriterionResult out{3, "angle identities on every preset and alpha*omega surface", {}};
  const double h = kCoarseH;
  auto add = [&](const std::string& name, const verify::GeometryReport& r) {
    for (const char* id : {"prop1_const", "prop1_drift", "prop1_energy"}) {
      out.checks.push_back(at_most(name + "." + id, summary_value(r, id), tol(c, h)));
    }
  };
  for (SurfaceKind kind : kPresets) add(std::string(forge::to_string(kind)), verify_case(build_preset(kind, square(h)), c));
  for (const auto& sc : star_cases(h)) add(sc.name, verify_case(build_star(sc.spec), c));
  return out;
}

CriterionResult hsl_algebra(double c) {
  CriterionResult out{4, "hsl lies in the embedded plane and is Hamiltonian stationary", {}};
  const forge::GridSpec grids[] = {square(1e-2), square(5e-3), {-3.0, 3.0, -2.0, 2.0, 2e-2, 2e-2}};
  const char* labels[] = {"unit@1e-2", "unit@5e-3", "wide@2e-2"};
  for (std::size_t g = 0; g < 3; ++g) {
    const auto b = build_preset(SurfaceKind::kHsl, grids[g]);
    const std::string name = std::string("hsl.") + labels[g];
    const double h = std::max(grids[g].h_t, grids[g].h_s);
    const auto m = forge::membership_residual_M(b.grid);
    out.checks.push_back(at_most(name + ".membership", m.max_eq_residual, kMembershipTolerance));
    out.checks.push_back(at_least(name + ".min_re_z", m.min_re_z, 0.0));
    out.checks.push_back(at_most(name + ".harmonic", verify::harmonic_check(b.grid, c), tol(c, h)));

    const auto metric = verify::induced_metric(b.grid);
    const auto mask = verify::interior_mask(b.grid, metric);
    double worst = 0.0;
    for (std::size_t i = 0; i < b.grid.rows(); ++i) {
      for (std::size_t j = 0; j < b.grid.cols(); ++j) {
        if (!mask[i * b.grid.cols() + j]) continue;
        const double s = b.grid.s_samples[j];
        const double expected = 1.0 + s * s;
        worst = std::max({worst, std::abs(metric.e(i, j) - expected), std::abs(metric.g(i, j) - expected),
                          std::abs(metric.f(i, j))});
      }
    }
    out.checks.push_back(at_most(name + ".metric", worst, tol(c, h)));
  }
  return out;
}

CriterionResult curve_suite(double c) {
  CriterionResult out{5, "curvature law integrator, first integral and flux equation", {}};
  const double h = 1e-3;
  struct LawCase {
    const char* name;
    CurveLaw law;
  };
  const LawCase laws[] = {{"(-1,0)", {-1.0, 0.0}},
                          {"(1,0)", {1.0, 0.0}},
                          {"(0,1)", {0.0, 1.0}},
                          {"(0,-1)", {0.0, -1.0}},
                          {"alpha_side(pi/4)", CurveLaw::alpha_side(kPi / 4)}};
  for (const auto& lc : laws) {
    // Starting at 45 degrees keeps kappa away from zero for every law listed.
    const auto trace = curves::integrate_curve_law(lc.law, {1.0, 0.0}, kPi / 4, 1.0, h);
    const std::string name = std::string("law") + lc.name;
    out.checks.push_back(at_most(name + ".kab", curves::kab_residual(trace, lc.law).max_abs(), kKabTolerance));
    const auto fi = curves::first_integral_residual(trace, lc.law);
    double drift = 0.0;
    for (double v : fi.value) drift = std::max(drift, std::abs(v - fi.value.front()));
    out.checks.push_back(at_most(name + ".first_integral_drift", drift, kFirstIntegralTolerance));
    out.checks.push_back(at_most(name + ".first_integral_skipped", static_cast<double>(fi.skipped), 0.0));
    out.checks.push_back(
        at_most(name + ".odeflux", curves::odeflux_residual(trace, lc.law).max_abs(), tol(c, h)));
  }
  return out;
}

CriterionResult csf_suite() {
  CriterionResult out{6, "curve shortening flow against the closed-form evolution", {}};
  {
    curves::CurvePresetParams p = curves::default_preset_params(CurveKind::kCircle);
    p.h = 2 * kPi / 512;
    const auto circle = curves::preset_curve(CurveKind::kCircle, 0.0, p);
    const auto poly = csf::from_trace(circle, 512);
    // Snapshots every 0.025 up to 0.4; index 15 is t = 0.375.
    const auto flow = csf::evolve(poly, 0.4, 1e-5, {10, 16});
    const double r = csf::mean_radius(flow.curves[15]);
    out.checks.push_back(at_most("circle.radius_error@0.375", std::abs(r - 0.5), kRadiusTolerance));
    const auto d = csf::compare_to_exact(flow, CurveLaw{-1.0, 0.0}, circle);
    out.checks.push_back(at_most("circle.hausdorff", *std::max_element(d.begin(), d.end()), kCircleHausdorff,
                                 "max over t in [0, 0.4]"));
  }
  {
    // 2048 vertices on the arc [-12, 12]; the trace step makes every 12th
    // sample a vertex.
    const std::size_t vertices = 2048;
    const double span = 12.0;
    const double h = 2 * span / static_cast<double>((vertices - 1) * 12);
    const auto spiral = curves::integrate_curve_law_span(CurveLaw{0.0, 1.0}, {1.0, 0.0}, 0.0, -span, span, h);
    const auto poly = csf::from_trace(spiral, vertices);
    const auto flow = csf::evolve(poly, 0.5, 1e-5, {10, 5});
    const auto d = csf::compare_to_exact(flow, CurveLaw{0.0, 1.0}, spiral);
    out.checks.push_back(at_most("spiral.hausdorff", *std::max_element(d.begin(), d.end()), kSpiralHausdorff,
                                 "interior window, max over t in [0, 0.5]"));
  }
  return out;
}

CriterionResult negative_controls(double c) {
  CriterionResult out{7, "negative controls", {}};
  const double h = kCoarseH;
  const double bound = kNegativeFactor * tol(c, h);
  verify::VerifyOptions opts;
  opts.tolerance_c = c;
  {
    const auto r = verify::verify_surface(sheared_preset(SurfaceKind::kHsl, square(h), 0.3), opts);
    out.checks.push_back(at_least("sheared_hsl.conformality", summary_value(r, "conformality"), bound));
  }
  {
    const auto r = verify::verify_surface(graph_control(square(h)), opts);
    out.checks.push_back(at_least("graph.lagrangian", summary_value(r, "lagrangian"), bound));
  }
  {
    const auto b = build_preset(SurfaceKind::kJlt, square(h));
    out.checks.push_back(at_least("jlt.harmonic", verify::harmonic_check(b.grid, c), bound));
  }
  return out;
}

Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Check at_most(std::string name, double value, double bound, std::string note) {
  return {std::move(name), value, bound, true, value <= bound, std::move(note)};
}

Check at_least(std::string name, double value, double bound, std::string note) {
  return {std::move(name), value, bound, false, value >= bound, std::move(note)};
}

bool CriterionResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool SuiteResult::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass(); });
}

CriterionResult run_criterion(int id, double c) {
  switch (id) {
    case 1: return soliton_presets(c);
    case 2: return star_suite(c);
    case 3: return angle_suite(c);
    case 4: return hsl_algebra(c);
    case 5: return curve_suite(c);
    case 6: return csf_suite();
    case 7: return negative_controls(c);
    default: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "no suite criterion " + std::to_string(id));
}

SuiteResult run_suite(const SuiteSpec& spec, double c) {
  SuiteResult out;
  for (int id : spec.criteria) out.criteria.push_back(run_criterion(id, c));
  return out;
}

Json checks_to_json(const std::vector<Check>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json j;
    j["name"] = c.name;
    j["value"] = real_or_null(c.value);
    j["relation"] = c.upper ? "<=" : ">=";
    j["bound"] = c.bound;
    j["pass"] = c.pass;
    if (!c.note.empty()) j["note"] = c.note;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json suite_to_json(const SuiteResult& result) {
  Json arr = Json::array();
  for (const auto& c : result.criteria) {
    Json j;
    j["criterion"] = c.id;
    j["title"] = c.title;
    j["pass"] = c.pass();
    j["checks"] = checks_to_json(c.checks);
    arr.push_back(std::move(j));
  }
  return {{"criteria", std::move(arr)}};
}

}  // namespace lagsol::cli
