#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lagsol/planar.hpp"

namespace lagsol::curves {

struct CurveSample {
  double s = 0.0;      // arc length
  PlanarPoint p;       // position
  double xi = 0.0;     // unwrapped tangent angle, p'(s) = e^{i xi}
  double kappa = 0.0;  // signed curvature, xi'(s)
};

// Arc-length sampled planar curve, samples sorted by increasing s.
struct CurveTrace {
  std::vector<CurveSample> samples;
  bool closed = false;
  double step = 0.0;
  std::optional<CurveLaw> law;

  std::size_t size() const { return samples.size(); }
  const CurveSample& operator[](std::size_t k) const { return samples[k]; }
};

struct IntegrationOptions {
  double escape_bound = 1e6;
};

// Fixed-step RK4 integration of
//   p' = e^{i xi},  xi' = a <p, J e^{i xi}> + b <p, e^{i xi}>
// from s = 0 to s = arc_budget (negative budgets integrate backwards).
CurveTrace integrate_curve_law(CurveLaw law, PlanarPoint p0, double xi0, double arc_budget, double h,
                               const IntegrationOptions& options = {});

// Two-sided integration through (p0, xi0) at s = 0, covering [s_min, s_max].
// Requires s_min <= 0 <= s_max.
CurveTrace integrate_curve_law_span(CurveLaw law, PlanarPoint p0, double xi0, double s_min, double s_max,
                                    double h, const IntegrationOptions& options = {});

// gamma(s) = (log cosh s, 2 arctan(tanh(s/2))), kappa(s) = -1/cosh s.
CurveTrace grim_reaper_curve(double s_min, double s_max, double h);

enum class CurveKind { kCircle, kLine, kShrinkerSeed, kExpanderSeed, kSpiralPos, kSpiralNeg };

std::optional<CurveKind> parse_curve_kind(std::string_view name);
std::string_view to_string(CurveKind kind);

struct CurvePresetParams {
  PlanarPoint p0{1.0, 0.0};
  double xi0 = kPi / 2;
  double s_min = 0.0;
  double s_max = 1.0;
  double h = 1e-3;
  IntegrationOptions integration;
};

// Per-kind defaults: lines pass through the origin along the real axis, spirals
// start radially at (1, 0), seeds start at (1, 0) heading along +y, the circle
// covers one full turn.
CurvePresetParams default_preset_params(CurveKind kind);

// circle:        unit circle e^{is}, closed form.
// line:          p0 + s e^{i xi0}, closed form.
// shrinker_seed: integrated with the alpha-side law (-cos phi, sin phi).
// expander_seed: integrated with the omega-side law (cos phi, -sin phi).
// spiral_pos:    integrated with law (0, 1).
// spiral_neg:    integrated with law (0, -1).
CurveTrace preset_curve(CurveKind kind, double phi, const CurvePresetParams& params);

// Per-sample residual values; index[k] is the sample the value belongs to.
struct SampleResiduals {
  std::vector<std::size_t> index;
  std::vector<double> value;
  std::size_t skipped = 0;

  double max_abs() const;
  bool empty() const { return value.empty(); }
};

inline constexpr double kKappaFloor = 1e-6;

// (kappa' - b)^2 / kappa^2 + kappa^2 - (a^2 + b^2) |p|^2, kappa' by a five-point
// central difference of the stored curvature. Samples with |kappa| <= kappa_floor
// are skipped and counted.
SampleResiduals first_integral_residual(const CurveTrace& trace, CurveLaw law, double kappa_floor = kKappaFloor);

// kappa - a <p, J p'> - b <p, p'> with kappa = xi' and p' both taken from
// five-point central differences of the sampled xi and p; independent of the
// stored curvature.
SampleResiduals kab_residual(const CurveTrace& trace, CurveLaw law);

// kappa kappa'' - kappa'^2 + kappa^2 (a + kappa^2) + b kappa' from three-point
// differences of the stored curvature, where |kappa| > kappa_floor.
SampleResiduals odeflux_residual(const CurveTrace& trace, CurveLaw law, double kappa_floor = kKappaFloor);

// Discrete consistency of the stored trace (three-point stencils).
SampleResiduals unit_speed_defect(const CurveTrace& trace);
SampleResiduals tangent_defect(const CurveTrace& trace);
SampleResiduals curvature_defect(const CurveTrace& trace);

// Dilation-rotation factor sqrt(2at+1) e^{i (b/2a) log(2at+1)} (e^{ibt} if a = 0).
std::complex<double> csf_flow_factor(CurveLaw law, double t);

// Maps a law-(a, b) trace to its curve-shortening evolution at time t.
CurveTrace csf_exact_flow(const CurveTrace& trace, CurveLaw law, double t);

// True when consecutive arc-length gaps match the nominal step to the given
// relative tolerance.
bool is_uniform(const CurveTrace& trace, double rel_tol = 1e-12);

}  // namespace lagsol::curves
