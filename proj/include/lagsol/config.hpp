#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lagsol/curve_lab.hpp"
#include "lagsol/io.hpp"
#include "lagsol/planar.hpp"
#include "lagsol/surface_forge.hpp"

namespace lagsol::cli {

enum class Mode { kCurve, kSurface, kVerify, kFlow, kPreset, kSuite };

std::optional<Mode> parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

// Where a curve comes from: one of the preset kinds, an integrated law, the
// closed-form grim reaper, or a curve CSV.
enum class CurveSource { kPreset, kLaw, kGrimReaper, kCsv };

struct CurveSpec {
  CurveSource source = CurveSource::kPreset;
  curves::CurveKind kind = curves::CurveKind::kCircle;  // kPreset only
  std::optional<CurveLaw> law;                            // kLaw only
  std::optional<double> phi;                              // seed kinds
  PlanarPoint p0{1.0, 0.0};
  double xi0 = kPi / 2;
  double s_min = 0.0;
  double s_max = 1.0;
  double h = 1e-3;
  std::string csv;  // kCsv only
};

struct SurfaceSpec {
  double phi = 0.0;
  CurveSpec alpha;
  CurveSpec omega;
  bool explicit_builder = false;
};

enum class VerifySource { kPreset, kStar, kCsv, kGraph };

struct VerifySpec {
  VerifySource source = VerifySource::kPreset;
  std::string csv;
  double tolerance_c = 10.0;
  std::size_t interior_margin = 2;
  std::optional<C2Point> e;
  // Nonzero: sample the preset as (t, s) -> Phi(t, s + shear * t).
  double shear = 0.0;
  bool expect_harmonic = false;
  std::vector<std::string> identities;  // gated subset; empty means the defaults
};

struct FlowSpec {
  CurveSpec initial;
  std::size_t vertices = 512;
  double T = 0.0;
  double dt = 1e-5;
  std::size_t resample_every = 10;
  std::size_t snapshots = 10;
  std::optional<CurveLaw> law;  // closed-form comparison
  std::optional<double> hausdorff_tolerance;
  std::optional<double> radius_tolerance;
};

struct OutputSpec {
  std::string dir = "out";
  bool timestamp = false;
  bool fields = false;
  bool obj = true;
  io::ObjProjection obj_projection = io::ObjProjection::kZ1;
};

struct SuiteSpec {
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7};
};

struct RunConfig {
  Mode mode = Mode::kSuite;
  std::optional<forge::SurfaceKind> kind;
  std::optional<forge::GridSpec> grid;
  std::optional<CurveSpec> curve;
  std::optional<CurveSpec> trace;
  std::optional<SurfaceSpec> surface;
  VerifySpec verify;
  std::optional<FlowSpec> flow;
  OutputSpec output;
  SuiteSpec suite;
  nlohmann::ordered_json echo;  // effective document after overrides
};

// Command-line values that replace the corresponding config entries.
struct Overrides {
  std::optional<Mode> mode;
  std::optional<std::string> out;
  std::optional<double> h;
  std::optional<double> tolerance_c;
  std::optional<std::string> obj_projection;
};

// Strict parse: unknown keys, wrong types, non-finite numbers, phi outside
// [0, pi) and non-positive h or dt are rejected with kConfig and a message
// starting with the JSON path of the offending entry.
RunConfig parse_config(std::string_view text, const Overrides& overrides = {});

}  // namespace lagsol::cli
