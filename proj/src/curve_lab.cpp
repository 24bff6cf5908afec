#include "lagsol/curve_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lagsol/error.hpp"

namespace lagsol::curves {

namespace {

struct State {
  double x;
  double y;
  double xi;
};

State derivative(const CurveLaw& law, const State& st) {
  const PlanarPoint tangent = unit_from_angle(st.xi);
  return {tangent.real(), tangent.imag(), law.curvature({st.x, st.y}, tangent)};
}

State axpy(const State& base, double c, const State& d) {
  return {base.x + c * d.x, base.y + c * d.y, base.xi + c * d.xi};
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, std::string(what) + " must be finite");
}

CurveSample make_sample(const CurveLaw& law, double s, const State& st) {
  const PlanarPoint p{st.x, st.y};
  return {s, p, st.xi, law.curvature(p, unit_from_angle(st.xi))};
}

// Integrates `steps` RK4 steps of size h in direction sign, appending samples
// at s = sign * k * h (k = 1..steps).
void integrate_into(std::vector<CurveSample>& out, const CurveLaw& law, State st, double sign, std::size_t steps,
                    double h, const IntegrationOptions& options) {
  const double dh = sign * h;
  for (std::size_t k = 1; k <= steps; ++k) {
    const State k1 = derivative(law, st);
    const State k2 = derivative(law, axpy(st, 0.5 * dh, k1));
    const State k3 = derivative(law, axpy(st, 0.5 * dh, k2));
    const State k4 = derivative(law, axpy(st, dh, k3));
    st.x += dh / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    st.y += dh / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    st.xi += dh / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
    if (!std::isfinite(st.x) || !std::isfinite(st.y) || !std::isfinite(st.xi)) {
      throw Error(ErrorCode::kNonFinite, "integration produced a non-finite state");
    }
    if (std::hypot(st.x, st.y) > options.escape_bound) {
      throw Error(ErrorCode::kBoundedEscape,
                  "|p| exceeded " + std::to_string(options.escape_bound) + " at s = " +
                      std::to_string(sign * static_cast<double>(k) * h));
    }
    out.push_back(make_sample(law, sign * static_cast<double>(k) * h, st));
  }
}

std::size_t steps_for(double length, double h) {
  return static_cast<std::size_t>(std::ceil(length / h - 1e-9));
}

void check_step(double h) {
  require_finite(h, "h");
  if (h <= 0.0) throw Error(ErrorCode::kInvalidArgument, "h must be positive");
}

// Samples s_min + k h, k = 0..n-1, covering [s_min, s_max].
std::vector<double> uniform_parameters(double s_min, double s_max, double h) {
  require_finite(s_min, "s_min");
  require_finite(s_max, "s_max");
  check_step(h);
  if (!(s_min < s_max)) throw Error(ErrorCode::kInvalidArgument, "degenerate parameter range");
  const std::size_t n = static_cast<std::size_t>(std::floor((s_max - s_min) / h + 1e-9)) + 1;
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = s_min + static_cast<double>(k) * h;
  return s;
}

// Five-point first derivative; k must satisfy 2 <= k < n - 2.
template <typename F>
auto d1_five(F&& f, std::size_t k, double h) {
  return (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * h);
}

}  // namespace

double SampleResiduals::max_abs() const {
  double m = 0.0;
  for (double v : value) m = std::max(m, std::abs(v));
  return m;
}

CurveTrace integrate_curve_law(CurveLaw law, PlanarPoint p0, double xi0, double arc_budget, double h,
                               const IntegrationOptions& options) {
  check_step(h);
  require_finite(p0.real(), "p0.x");
  require_finite(p0.imag(), "p0.y");
  require_finite(xi0, "xi0");
  require_finite(arc_budget, "arc_budget");
  if (std::abs(arc_budget) < h) throw Error(ErrorCode::kInvalidArgument, "|arc_budget| must be at least h");

  CurveTrace trace;
  trace.step = h;
  trace.law = law;
  const State start{p0.real(), p0.imag(), xi0};
  trace.samples.push_back(make_sample(law, 0.0, start));
  const double sign = arc_budget > 0.0 ? 1.0 : -1.0;
  integrate_into(trace.samples, law, start, sign, steps_for(std::abs(arc_budget), h), h, options);
  if (sign < 0.0) std::reverse(trace.samples.begin(), trace.samples.end());
  return trace;
}

CurveTrace integrate_curve_law_span(CurveLaw law, PlanarPoint p0, double xi0, double s_min, double s_max, double h,
                                    const IntegrationOptions& options) {
  check_step(h);
  require_finite(s_min, "s_min");
  require_finite(s_max, "s_max");
  require_finite(p0.real(), "p0.x");
  require_finite(p0.imag(), "p0.y");
  require_finite(xi0, "xi0");
  if (s_min > 0.0 || s_max < 0.0 || !(s_min < s_max)) {
    throw Error(ErrorCode::kInvalidArgument, "span must satisfy s_min <= 0 <= s_max with s_min < s_max");
  }
  const State start{p0.real(), p0.imag(), xi0};
  std::vector<CurveSample> backward;
  integrate_into(backward, law, start, -1.0, steps_for(-s_min, h), h, options);

  CurveTrace trace;
  trace.step = h;
  trace.law = law;
  trace.samples.assign(backward.rbegin(), backward.rend());
  trace.samples.push_back(make_sample(law, 0.0, start));
  integrate_into(trace.samples, law, start, 1.0, steps_for(s_max, h), h, options);
  return trace;
}

CurveTrace grim_reaper_curve(double s_min, double s_max, double h) {
  CurveTrace trace;
  trace.step = h;
  for (double s : uniform_parameters(s_min, s_max, h)) {
    const double gd = 2.0 * std::atan(std::tanh(0.5 * s));
    // Tangent (tanh s, sech s) has angle pi/2 - gd(s).
    trace.samples.push_back({s, {std::log(std::cosh(s)), gd}, kPi / 2 - gd, -1.0 / std::cosh(s)});
  }
  return trace;
}

std::optional<CurveKind> parse_curve_kind(std::string_view name) {
  if (name == "circle") return CurveKind::kCircle;
  if (name == "line") return CurveKind::kLine;
  if (name == "shrinker_seed") return CurveKind::kShrinkerSeed;
  if (name == "expander_seed") return CurveKind::kExpanderSeed;
  if (name == "spiral_pos") return CurveKind::kSpiralPos;
  if (name == "spiral_neg") return CurveKind::kSpiralNeg;
  return std::nullopt;
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::kCircle: return "circle";
    case CurveKind::kLine: return "line";
    case CurveKind::kShrinkerSeed: return "shrinker_seed";
    case CurveKind::kExpanderSeed: return "expander_seed";
    case CurveKind::kSpiralPos: return "spiral_pos";
    case CurveKind::kSpiralNeg: return "spiral_neg";
  }
  return "unknown";
}

CurvePresetParams default_preset_params(CurveKind kind) {
  CurvePresetParams params;
  switch (kind) {
    case CurveKind::kCircle:
      params.s_max = 2 * kPi;
      break;
    case CurveKind::kLine:
      params.p0 = {0.0, 0.0};
      params.xi0 = 0.0;
      break;
    case CurveKind::kSpiralPos:
    case CurveKind::kSpiralNeg:
      params.xi0 = 0.0;
      break;
    case CurveKind::kShrinkerSeed:
    case CurveKind::kExpanderSeed:
      break;
  }
  return params;
}

CurveTrace preset_curve(CurveKind kind, double phi, const CurvePresetParams& params) {
  require_finite(phi, "phi");
  if (phi < 0.0 || phi >= kPi) throw Error(ErrorCode::kInvalidArgument, "phi must lie in [0, pi)");

  // (p0, xi0) is the state at s = 0; ranges not containing 0 are trimmed.
  const auto integrate = [&](CurveLaw law) {
    if (!(params.s_min < params.s_max)) throw Error(ErrorCode::kInvalidArgument, "degenerate parameter range");
    CurveTrace trace = integrate_curve_law_span(law, params.p0, params.xi0, std::min(params.s_min, 0.0),
                                                std::max(params.s_max, 0.0), params.h, params.integration);
    const double lo = params.s_min - 1e-9 * params.h;
    const double hi = params.s_max + 1e-9 * params.h;
    std::erase_if(trace.samples, [&](const CurveSample& c) { return c.s < lo || c.s > hi; });
    return trace;
  };

  switch (kind) {
    case CurveKind::kCircle: {
      CurveTrace trace;
      std::vector<double> ts;
      if (params.s_max - params.s_min >= 2 * kPi - 0.5 * params.h) {
        // Full turn: closed trace with the step adjusted to divide 2 pi.
        check_step(params.h);
        const auto n = static_cast<std::size_t>(std::llround(2 * kPi / params.h));
        trace.closed = true;
        trace.step = 2 * kPi / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) ts.push_back(params.s_min + static_cast<double>(k) * trace.step);
      } else {
        ts = uniform_parameters(params.s_min, params.s_max, params.h);
        trace.step = params.h;
      }
      for (double t : ts) trace.samples.push_back({t, std::polar(1.0, t), t + kPi / 2, 1.0});
      return trace;
    }
    case CurveKind::kLine: {
      CurveTrace trace;
      trace.step = params.h;
      const PlanarPoint dir = unit_from_angle(params.xi0);
      for (double s : uniform_parameters(params.s_min, params.s_max, params.h)) {
        trace.samples.push_back({s, params.p0 + s * dir, params.xi0, 0.0});
      }
      return trace;
    }
    case CurveKind::kShrinkerSeed: return integrate(CurveLaw::alpha_side(phi));
    case CurveKind::kExpanderSeed: return integrate(CurveLaw::omega_side(phi));
    case CurveKind::kSpiralPos: return integrate(CurveLaw{0.0, 1.0});
    case CurveKind::kSpiralNeg: return integrate(CurveLaw{0.0, -1.0});
  }
  throw Error(ErrorCode::kUnknownKind, "unknown curve kind");
}

SampleResiduals first_integral_residual(const CurveTrace& trace, CurveLaw law, double kappa_floor) {
  if (law.is_zero()) throw Error(ErrorCode::kInvalidArgument, "first integral requires a nonzero law");
  SampleResiduals out;
  const std::size_t n = trace.size();
  if (n < 5) return out;
  const auto kappa = [&](std::size_t k) { return trace[k].kappa; };
  const double c = law.a * law.a + law.b * law.b;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double kap = trace[k].kappa;
    if (std::abs(kap) <= kappa_floor) {
      ++out.skipped;
      continue;
    }
    const double dk = d1_five(kappa, k, trace.step);
    const double q = (dk - law.b) / kap;
    out.index.push_back(k);
    out.value.push_back(q * q + kap * kap - c * std::norm(trace[k].p));
  }
  return out;
}

SampleResiduals kab_residual(const CurveTrace& trace, CurveLaw law) {
  SampleResiduals out;
  const std::size_t n = trace.size();
  if (n < 5) return out;
  const auto xi = [&](std::size_t k) { return trace[k].xi; };
  const auto pos = [&](std::size_t k) { return trace[k].p; };
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double kap = d1_five(xi, k, trace.step);
    const PlanarPoint dp = d1_five(pos, k, trace.step);
    out.index.push_back(k);
    out.value.push_back(kap - law.curvature(trace[k].p, dp));
  }
  return out;
}

SampleResiduals odeflux_residual(const CurveTrace& trace, CurveLaw law, double kappa_floor) {
  SampleResiduals out;
  const std::size_t n = trace.size();
  const double h = trace.step;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double kap = trace[k].kappa;
    if (std::abs(kap) <= kappa_floor) {
      ++out.skipped;
      continue;
    }
    const double km = trace[k - 1].kappa;
    const double kp = trace[k + 1].kappa;
    const double d1 = (kp - km) / (2.0 * h);
    const double d2 = (kp - 2.0 * kap + km) / (h * h);
    out.index.push_back(k);
    out.value.push_back(kap * d2 - d1 * d1 + kap * kap * (law.a + kap * kap) + law.b * d1);
  }
  return out;
}

SampleResiduals unit_speed_defect(const CurveTrace& trace) {
  SampleResiduals out;
  for (std::size_t k = 1; k + 1 < trace.size(); ++k) {
    const double speed = std::abs(trace[k + 1].p - trace[k - 1].p) / (trace[k + 1].s - trace[k - 1].s);
    out.index.push_back(k);
    out.value.push_back(speed - 1.0);
  }
  return out;
}

SampleResiduals tangent_defect(const CurveTrace& trace) {
  SampleResiduals out;
  for (std::size_t k = 1; k + 1 < trace.size(); ++k) {
    const PlanarPoint chord = trace[k + 1].p - trace[k - 1].p;
    out.index.push_back(k);
    out.value.push_back(std::abs(chord / std::abs(chord) - unit_from_angle(trace[k].xi)));
  }
  return out;
}

SampleResiduals curvature_defect(const CurveTrace& trace) {
  SampleResiduals out;
  for (std::size_t k = 1; k + 1 < trace.size(); ++k) {
    const double dxi = (trace[k + 1].xi - trace[k - 1].xi) / (trace[k + 1].s - trace[k - 1].s);
    out.index.push_back(k);
    out.value.push_back(dxi - trace[k].kappa);
  }
  return out;
}

std::complex<double> csf_flow_factor(CurveLaw law, double t) {
  if (law.a == 0.0) return std::polar(1.0, law.b * t);
  const double q = 2.0 * law.a * t + 1.0;
  if (q <= 0.0) throw Error(ErrorCode::kDomain, "2at + 1 must be positive");
  return std::polar(std::sqrt(q), law.b / (2.0 * law.a) * std::log(q));
}

CurveTrace csf_exact_flow(const CurveTrace& trace, CurveLaw law, double t) {
  require_finite(t, "t");
  double scale = 1.0;
  double angle = law.b * t;
  if (law.a != 0.0) {
    const double q = 2.0 * law.a * t + 1.0;
    if (q <= 0.0) throw Error(ErrorCode::kDomain, "2at + 1 must be positive");
    scale = std::sqrt(q);
    angle = law.b / (2.0 * law.a) * std::log(q);
  }
  const std::complex<double> factor = std::polar(scale, angle);

  CurveTrace out;
  out.closed = trace.closed;
  out.step = trace.step * scale;
  if (trace.law) out.law = CurveLaw{trace.law->a / (scale * scale), trace.law->b / (scale * scale)};
  out.samples.reserve(trace.size());
  for (const auto& sample : trace.samples) {
    out.samples.push_back({sample.s * scale, factor * sample.p, sample.xi + angle, sample.kappa / scale});
  }
  return out;
}

bool is_uniform(const CurveTrace& trace, double rel_tol) {
  if (trace.size() < 2 || !(trace.step > 0.0)) return false;
  const double s0 = trace[0].s;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double expected = s0 + static_cast<double>(k) * trace.step;
    const double scale = std::abs(s0) + std::abs(trace[k].s) + trace.step;
    if (std::abs(trace[k].s - expected) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace lagsol::curves
