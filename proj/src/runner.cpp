#include "lagsol/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>

#include "lagsol/csf_sim.hpp"
#include "lagsol/error.hpp"
#include "lagsol/io.hpp"
#include "lagsol/suite.hpp"

namespace lagsol::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Curve gates used by curve mode.
constexpr double kKabTolerance = 1e-8;
constexpr double kFirstIntegralTolerance = 1e-6;

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  ~ArtifactWriter() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : files_) fs::remove(p, ec);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    fs::create_directories(dir_);
    const fs::path path = dir_ / name;
    files_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }

  std::vector<fs::path> commit() {
    committed_ = true;
    return files_;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool committed_ = false;
};

Json law_json(const CurveLaw& law) { return {{"a", law.a}, {"b", law.b}}; }

std::optional<CurveLaw> spec_law(const CurveSpec& spec) {
  if (spec.source == CurveSource::kLaw) return spec.law;
  if (spec.source != CurveSource::kPreset) return std::nullopt;
  using curves::CurveKind;
  const double phi = spec.phi.value_or(0.0);
  switch (spec.kind) {
    case CurveKind::kCircle: return CurveLaw{-1.0, 0.0};
    case CurveKind::kShrinkerSeed: return CurveLaw::alpha_side(phi);
    case CurveKind::kExpanderSeed: return CurveLaw::omega_side(phi);
    case CurveKind::kSpiralPos: return CurveLaw{0.0, 1.0};
    case CurveKind::kSpiralNeg: return CurveLaw{0.0, -1.0};
    case CurveKind::kLine: return std::nullopt;
  }
  return std::nullopt;
}

double drift(const curves::SampleResiduals& r) {
  if (r.empty()) return 0.0;
  double d = 0.0;
  for (double v : r.value) d = std::max(d, std::abs(v - r.value.front()));
  return d;
}

Json gated_checks(const verify::GeometryReport& report, const VerifySpec& spec,
                  const verify::VerifyOptions& options, bool& pass) {
  const auto ids = spec.identities.empty() ? verify::default_gated_identities(options) : spec.identities;
  std::vector<Check> checks;
  for (const auto& c : verify::evaluate(report, spec.tolerance_c, ids)) {
    checks.push_back(at_most(c.identity, c.value, c.tolerance));
  }
  if (!report.gate_passed) {
    checks.push_back(at_most("angle_gate", 1.0, 0.0, "conformality or Lagrangian residual above tolerance"));
  }
  for (const auto& c : checks) pass = pass && c.pass;
  return checks_to_json(checks);
}

struct SurfaceRun {
  Json summaries;
  bool pass = true;
};

SurfaceRun verify_grid(const forge::SurfaceGrid& grid, const forge::SurfaceExpectations* expectations,
                       const RunConfig& cfg) {
  verify::VerifyOptions opts;
  opts.tolerance_c = cfg.verify.tolerance_c;
  opts.translating_vector = cfg.verify.e;
  opts.expectations = expectations;
  opts.expect_harmonic = cfg.verify.expect_harmonic;
  opts.interior_margin = cfg.verify.interior_margin;
  const auto report = verify::verify_surface(grid, opts);
  SurfaceRun out;
  out.summaries["provenance"] = grid.provenance;
  out.summaries["rows"] = grid.rows();
  out.summaries["cols"] = grid.cols();
  out.summaries["report"] = io::report_to_json(report, cfg.output.fields);
  out.summaries["checks"] = gated_checks(report, cfg.verify, opts, out.pass);
  return out;
}

void emit_surface(ArtifactWriter& w, const forge::SurfaceGrid& grid, const RunConfig& cfg) {
  w.write("surface.csv", [&](std::ostream& o) { io::write_surface_csv(o, grid); });
  if (cfg.output.obj) {
    w.write("surface.obj", [&](std::ostream& o) { io::write_obj(o, grid, cfg.output.obj_projection); });
  }
}

SurfaceRun run_curve(const RunConfig& cfg, ArtifactWriter& w) {
  const CurveSpec& spec = *cfg.curve;
  const auto trace = build_curve(spec);
  w.write("curve.csv", [&](std::ostream& o) { io::write_curve_csv(o, trace); });
  SurfaceRun out;
  out.summaries["samples"] = trace.size();
  out.summaries["closed"] = trace.closed;
  out.summaries["step"] = trace.step;
  const auto law = trace.law ? trace.law : spec_law(spec);
  std::vector<Check> checks;
  if (law) {
    out.summaries["law"] = law_json(*law);
    const auto kab = curves::kab_residual(trace, *law);
    checks.push_back(at_most("kab", kab.max_abs(), kKabTolerance));
    if (!law->is_zero()) {
      const auto fi = curves::first_integral_residual(trace, *law);
      checks.push_back(at_most("first_integral_drift", drift(fi), kFirstIntegralTolerance));
      out.summaries["first_integral_skipped"] = fi.skipped;
    }
    const auto flux = curves::odeflux_residual(trace, *law);
    checks.push_back(at_most("odeflux", flux.max_abs(), cfg.verify.tolerance_c * trace.step * trace.step));
  }
  for (const auto& c : checks) out.pass = out.pass && c.pass;
  out.summaries["checks"] = checks_to_json(checks);
  return out;
}

forge::SurfaceGrid load_surface_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return io::read_surface_csv(in, path);
}

SurfaceRun run_verify(const RunConfig& cfg) {
  forge::SurfaceGrid grid;
  std::optional<forge::SurfaceExpectations> ex;
  if (cfg.verify.shear != 0.0 && cfg.verify.source != VerifySource::kPreset) {
    throw Error(ErrorCode::kConfig, "$.verify.shear: only valid with source 'preset'");
  }
  switch (cfg.verify.source) {
    case VerifySource::kPreset: {
      if (cfg.verify.shear != 0.0) {
        grid = sheared_preset(*cfg.kind, *cfg.grid, cfg.verify.shear);
        break;
      }
      auto b = build_preset(*cfg.kind, *cfg.grid, cfg.trace);
      grid = std::move(b.grid);
      ex = std::move(b.expectations);
      break;
    }
    case VerifySource::kStar: {
      auto b = build_star(*cfg.surface);
      grid = std::move(b.grid);
      ex = std::move(b.expectations);
      break;
    }
    case VerifySource::kCsv: grid = load_surface_csv(cfg.verify.csv); break;
    case VerifySource::kGraph: grid = graph_control(*cfg.grid); break;
  }
  return verify_grid(grid, ex ? &*ex : nullptr, cfg);
}

SurfaceRun run_flow(const RunConfig& cfg, ArtifactWriter& w) {
  const FlowSpec& f = *cfg.flow;
  const auto initial = build_curve(f.initial);
  const auto poly = csf::from_trace(initial, f.vertices);
  csf::EvolveOptions opts;
  opts.resample_every = f.resample_every;
  opts.snapshots = f.snapshots;
  const auto flow = csf::evolve(poly, f.T, f.dt, opts);
  w.write("flow.csv", [&](std::ostream& o) { io::write_flow_csv(o, flow); });

  SurfaceRun out;
  out.summaries["vertices"] = poly.size();
  out.summaries["closed"] = poly.closed;
  out.summaries["times"] = flow.times;
  const auto law = f.law ? f.law : (initial.law ? initial.law : spec_law(f.initial));
  std::vector<Check> checks;
  if (poly.closed) {
    std::vector<double> radius;
    std::vector<double> area;
    for (const auto& c : flow.curves) {
      radius.push_back(csf::mean_radius(c));
      area.push_back(csf::enclosed_area(c));
    }
    out.summaries["radius"] = radius;
    out.summaries["area"] = area;
    if (law && f.radius_tolerance) {
      const double expected = std::abs(curves::csf_flow_factor(*law, f.T)) * radius.front();
      out.summaries["expected_final_radius"] = expected;
      checks.push_back(at_most("final_radius_error", std::abs(radius.back() - expected), *f.radius_tolerance));
    }
  }
  if (law) {
    out.summaries["law"] = law_json(*law);
    const auto d = csf::compare_to_exact(flow, *law, initial);
    out.summaries["hausdorff"] = d;
    if (f.hausdorff_tolerance) {
      checks.push_back(at_most("hausdorff", *std::max_element(d.begin(), d.end()), *f.hausdorff_tolerance));
    }
  }
  for (const auto& c : checks) out.pass = out.pass && c.pass;
  out.summaries["checks"] = checks_to_json(checks);
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

curves::CurveTrace build_curve(const CurveSpec& spec) {
  switch (spec.source) {
    case CurveSource::kPreset: {
      curves::CurvePresetParams p;
      p.p0 = spec.p0;
      p.xi0 = spec.xi0;
      p.s_min = spec.s_min;
      p.s_max = spec.s_max;
      p.h = spec.h;
      return curves::preset_curve(spec.kind, spec.phi.value_or(0.0), p);
    }
    case CurveSource::kLaw: {
      auto trace = curves::integrate_curve_law_span(*spec.law, spec.p0, spec.xi0, std::min(spec.s_min, 0.0),
                                                    std::max(spec.s_max, 0.0), spec.h);
      const double lo = spec.s_min - 1e-9 * spec.h;
      const double hi = spec.s_max + 1e-9 * spec.h;
      std::erase_if(trace.samples, [&](const curves::CurveSample& c) { return c.s < lo || c.s > hi; });
      return trace;
    }
    case CurveSource::kGrimReaper: return curves::grim_reaper_curve(spec.s_min, spec.s_max, spec.h);
    case CurveSource::kCsv: {
      std::ifstream in(spec.csv, std::ios::binary);
      if (!in) throw Error(ErrorCode::kIo, "cannot open " + spec.csv);
      return io::read_curve_csv(in);
    }
  }
  throw Error(ErrorCode::kUnknownKind, "unknown curve source");
}

BuiltSurface build_star(const SurfaceSpec& spec) {
  const auto alpha = build_curve(spec.alpha);
  const auto omega = build_curve(spec.omega);
  const forge::SolitonAngle phi(spec.phi);
  BuiltSurface out;
  out.grid = spec.explicit_builder ? forge::build_star_product_explicit(alpha, omega, phi)
                                   : forge::build_star_product(alpha, omega, phi);
  out.expectations.metric_factor = forge::expected_metric_factor(alpha, omega);
  out.expectations.angle = forge::expected_angle(alpha, omega, phi);
  return out;
}

BuiltSurface build_preset(forge::SurfaceKind kind, const forge::GridSpec& grid,
                          const std::optional<CurveSpec>& trace) {
  std::optional<curves::CurveTrace> curve;
  if (forge::preset_requires_trace(kind)) {
    CurveSpec spec;
    if (trace) {
      spec = *trace;
    } else {
      const bool on_t = kind == forge::SurfaceKind::kShrinkerLine;
      spec.kind = on_t ? curves::CurveKind::kShrinkerSeed : curves::CurveKind::kExpanderSeed;
      const auto d = curves::default_preset_params(spec.kind);
      spec.p0 = d.p0;
      spec.xi0 = d.xi0;
      spec.s_min = on_t ? grid.t_min : grid.s_min;
      spec.s_max = on_t ? grid.t_max : grid.s_max;
      spec.h = on_t ? grid.h_t : grid.h_s;
      spec.phi = 0.0;
    }
    curve = build_curve(spec);
  }
  const curves::CurveTrace* tp = curve ? &*curve : nullptr;
  return {forge::preset_surface(kind, grid, tp), forge::preset_expectations(kind, grid, tp)};
}

forge::SurfaceGrid graph_control(const forge::GridSpec& grid) {
  return forge::sample_surface([](double t, double s) { return C2Point{{t, s}, t * t}; }, grid, "graph_control");
}

forge::SurfaceGrid sheared_preset(forge::SurfaceKind kind, const forge::GridSpec& grid, double k) {
  const auto f = forge::preset_function(kind);
  if (!f) {
    throw Error(ErrorCode::kInvalidArgument,
                "shear needs a closed-form preset, not " + std::string(forge::to_string(kind)));
  }
  auto out = forge::sample_surface([&](double t, double s) { return (*f)(t, s + k * t); }, grid,
                                   std::string(forge::to_string(kind)) + "+shear(" + io::format_real(k) + ")");
  out.translating_vector = forge::preset_translating_vector(kind);
  return out;
}

RunResult run(const RunConfig& cfg) {
  ArtifactWriter writer(cfg.output.dir);
  SurfaceRun body;
  switch (cfg.mode) {
    case Mode::kCurve: body = run_curve(cfg, writer); break;
    case Mode::kSurface: {
      const auto b = build_star(*cfg.surface);
      emit_surface(writer, b.grid, cfg);
      body = verify_grid(b.grid, &b.expectations, cfg);
      break;
    }
    case Mode::kPreset: {
      const auto b = build_preset(*cfg.kind, *cfg.grid, cfg.trace);
      emit_surface(writer, b.grid, cfg);
      body = verify_grid(b.grid, &b.expectations, cfg);
      break;
    }
    case Mode::kVerify: body = run_verify(cfg); break;
    case Mode::kFlow: body = run_flow(cfg, writer); break;
    case Mode::kSuite: {
      const auto result = run_suite(cfg.suite, cfg.verify.tolerance_c);
      body.summaries = suite_to_json(result);
      body.pass = result.pass();
      break;
    }
  }

  RunResult result;
  result.report["config_echo"] = cfg.echo;
  result.report["summaries"] = std::move(body.summaries);
  result.report["pass"] = body.pass;
  if (cfg.output.timestamp) result.report["metadata"] = {{"timestamp", utc_timestamp()}};
  writer.write("report.json", [&](std::ostream& o) { o << result.report.dump(2) << '\n'; });
  result.files = writer.commit();
  result.exit_code = body.pass ? 0 : 1;
  return result;
}

}  // namespace lagsol::cli
