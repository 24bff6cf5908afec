#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "lagsol/config.hpp"
#include "lagsol/curve_lab.hpp"
#include "lagsol/geo_verify.hpp"
#include "lagsol/surface_forge.hpp"

namespace lagsol::cli {

// Materializes a CurveSpec. Seed kinds use its phi (0 when unset).
curves::CurveTrace build_curve(const CurveSpec& spec);

struct BuiltSurface {
  forge::SurfaceGrid grid;
  forge::SurfaceExpectations expectations;
};

// alpha * omega from the surface spec, with the closed-form metric factor
// and angle as expectations.
BuiltSurface build_star(const SurfaceSpec& spec);

// Preset surface; trace-based presets use `trace` or, when absent, the
// default shrinker or expander seed at phi = 0 over the matching grid axis.
BuiltSurface build_preset(forge::SurfaceKind kind, const forge::GridSpec& grid,
                          const std::optional<CurveSpec>& trace = std::nullopt);

// Negative control: the graph (t, s, t^2, 0) of R^4 read as z1 = t + i s,
// z2 = t^2, which is not Lagrangian.
forge::SurfaceGrid graph_control(const forge::GridSpec& grid);

// Negative control: a closed-form preset sampled as (t, s) -> Phi(t, s + k t),
// which is no longer conformal. Throws kInvalidArgument for trace-based kinds.
forge::SurfaceGrid sheared_preset(forge::SurfaceKind kind, const forge::GridSpec& grid, double k);

struct RunResult {
  int exit_code = 0;  // 0 when every gated residual passes, 1 otherwise
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json report;
};

// Executes the configured mode and writes its artifacts plus report.json
// into the output directory. On an exception every file written by this run
// is removed before rethrowing.
RunResult run(const RunConfig& config);

}  // namespace lagsol::cli
