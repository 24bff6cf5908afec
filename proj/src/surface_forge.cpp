#include "lagsol/surface_forge.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lagsol/error.hpp"

namespace lagsol::forge {

using curves::CurveTrace;
using cplx = std::complex<double>;

namespace {

constexpr cplx kI{0.0, 1.0};

// Grim-reaper curve gamma(s) = log cosh s + i gd(s) and its tangent angle.
cplx grim(double s) {
  const double a = std::abs(s);
  const double log_cosh = a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  return {log_cosh, 2.0 * std::atan(std::tanh(0.5 * s))};
}
double grim_angle(double s) { return kPi / 2 - 2.0 * std::atan(std::tanh(0.5 * s)); }

std::vector<double> trace_axis(const CurveTrace& trace) {
  std::vector<double> axis;
  axis.reserve(trace.size());
  for (const auto& sample : trace.samples) axis.push_back(sample.s);
  return axis;
}

void require_uniform(const CurveTrace& trace, const char* name) {
  if (trace.size() < 2) throw Error(ErrorCode::kSpacingMismatch, std::string(name) + " has fewer than two samples");
  if (!curves::is_uniform(trace)) throw Error(ErrorCode::kSpacingMismatch, std::string(name) + " is not uniformly sampled");
}

// Cumulative trapezoid of f over the trace samples, starting from 0.
template <typename F>
std::vector<cplx> cumulative_trapezoid(const CurveTrace& trace, F&& f) {
  std::vector<cplx> out(trace.size());
  cplx prev = f(trace[0]);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const cplx cur = f(trace[k]);
    out[k] = out[k - 1] + 0.5 * (trace[k].s - trace[k - 1].s) * (prev + cur);
    prev = cur;
  }
  return out;
}

void check_star_inputs(const CurveTrace& alpha, const CurveTrace& omega, SolitonAngle phi) {
  require_uniform(alpha, "alpha");
  require_uniform(omega, "omega");
  const auto [ra, rw] = star_law_residuals(alpha, omega, phi);
  if (ra > kLawTolerance || rw > kLawTolerance) {
    throw Error(ErrorCode::kLawMismatch, "curve pair does not satisfy the soliton-angle laws (alpha residual " +
                                             std::to_string(ra) + ", omega residual " + std::to_string(rw) + ")");
  }
}

SurfaceGrid empty_star_grid(const CurveTrace& alpha, const CurveTrace& omega, SolitonAngle phi, std::string label) {
  SurfaceGrid grid;
  grid.t_samples = trace_axis(alpha);
  grid.s_samples = trace_axis(omega);
  grid.h_t = alpha.step;
  grid.h_s = omega.step;
  grid.phi = phi.value();
  grid.provenance = std::move(label);
  grid.points.resize(grid.rows() * grid.cols());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) {
      grid.at(i, j).z2 = alpha[i].p * omega[j].p;
      if (std::norm(alpha[i].p) + std::norm(omega[j].p) < kDegenerateThreshold) grid.degenerate.emplace_back(i, j);
    }
  }
  return grid;
}

std::string star_label(const char* builder, SolitonAngle phi) {
  return std::string(builder) + "(phi=" + std::to_string(phi.value()) + ")";
}

}  // namespace

SolitonAngle::SolitonAngle(double phi) : phi_(phi) {
  if (!std::isfinite(phi) || phi < 0.0 || phi >= kPi) {
    throw Error(ErrorCode::kInvalidArgument, "soliton angle must lie in [0, pi), got " + std::to_string(phi));
  }
}

void validate_grid(const SurfaceGrid& grid) {
  if (grid.points.size() != grid.rows() * grid.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "grid is not rectangular");
  }
  for (const auto& p : grid.points) {
    if (!is_finite(p)) throw Error(ErrorCode::kNonFinite, "grid contains a non-finite point");
  }
  const auto check_axis = [](const std::vector<double>& axis, double h, const char* name) {
    if (axis.size() < 2) return;
    if (!(h > 0.0)) throw Error(ErrorCode::kSpacingMismatch, std::string(name) + " spacing must be positive");
    for (std::size_t k = 1; k < axis.size(); ++k) {
      const double expected = axis[0] + static_cast<double>(k) * h;
      if (std::abs(axis[k] - expected) > 1e-12 * (std::abs(axis[0]) + std::abs(axis[k]) + h)) {
        throw Error(ErrorCode::kSpacingMismatch, std::string(name) + " axis is not uniform");
      }
    }
  };
  check_axis(grid.t_samples, grid.h_t, "t");
  check_axis(grid.s_samples, grid.h_s, "s");
}

std::pair<double, double> star_law_residuals(const CurveTrace& alpha, const CurveTrace& omega, SolitonAngle phi) {
  const cplx rot = std::polar(1.0, phi.value());
  double ra = 0.0;
  for (const auto& c : alpha.samples) {
    ra = std::max(ra, std::abs(c.kappa - (rot * unit_from_angle(c.xi) * std::conj(c.p)).imag()));
  }
  double rw = 0.0;
  for (const auto& c : omega.samples) {
    rw = std::max(rw, std::abs(c.kappa + (rot * unit_from_angle(c.xi) * std::conj(c.p)).imag()));
  }
  return {ra, rw};
}

SurfaceGrid build_star_product(const CurveTrace& alpha, const CurveTrace& omega, SolitonAngle phi) {
  check_star_inputs(alpha, omega, phi);
  const auto integrand = [](const curves::CurveSample& c) { return unit_from_angle(c.xi) * std::conj(c.p); };
  const std::vector<cplx> a_int = cumulative_trapezoid(alpha, integrand);
  const std::vector<cplx> w_int = cumulative_trapezoid(omega, integrand);
  const cplx rot = std::polar(1.0, phi.value());

  SurfaceGrid grid = empty_star_grid(alpha, omega, phi, star_label("star", phi));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) grid.at(i, j).z1 = rot * (w_int[j] - a_int[i]);
  }
  return grid;
}

SurfaceGrid build_star_product_explicit(const CurveTrace& alpha, const CurveTrace& omega, SolitonAngle phi) {
  check_star_inputs(alpha, omega, phi);
  SurfaceGrid grid = empty_star_grid(alpha, omega, phi, star_label("star_explicit", phi));
  const double cos_phi = std::cos(phi.value());

  if (std::abs(cos_phi) >= 1e-8) {
    const cplx slope{std::tan(phi.value()), -1.0};
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (std::size_t j = 0; j < omega.size(); ++j) {
        grid.at(i, j).z1 = (std::norm(omega[j].p) - std::norm(alpha[i].p)) / (2.0 * cos_phi) +
                           slope * (alpha[i].xi + omega[j].xi);
      }
    }
    return grid;
  }

  const auto jpair = [](const curves::CurveSample& c) {
    return cplx(dot(unit_from_angle(c.xi), rotate_j(c.p)), 0.0);
  };
  const std::vector<cplx> a_int = cumulative_trapezoid(alpha, jpair);
  const std::vector<cplx> w_int = cumulative_trapezoid(omega, jpair);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) {
      grid.at(i, j).z1 = a_int[i] - w_int[j] - kI * (alpha[i].xi + omega[j].xi);
    }
  }
  return grid;
}

RealField expected_metric_factor(const CurveTrace& alpha, const CurveTrace& omega) {
  RealField out(alpha.size(), omega.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) out(i, j) = std::norm(alpha[i].p) + std::norm(omega[j].p);
  }
  return out;
}

RealField expected_angle(const CurveTrace& alpha, const CurveTrace& omega, SolitonAngle phi) {
  RealField out(alpha.size(), omega.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < omega.size(); ++j) out(i, j) = alpha[i].xi + omega[j].xi + kPi + phi.value();
  }
  return out;
}

std::optional<SurfaceKind> parse_surface_kind(std::string_view name) {
  if (name == "grim_cylinder") return SurfaceKind::kGrimCylinder;
  if (name == "grim_product") return SurfaceKind::kGrimProduct;
  if (name == "grim_product_rotated") return SurfaceKind::kGrimProductRotated;
  if (name == "jlt") return SurfaceKind::kJlt;
  if (name == "killing") return SurfaceKind::kKilling;
  if (name == "shrinker_line") return SurfaceKind::kShrinkerLine;
  if (name == "hsl") return SurfaceKind::kHsl;
  if (name == "geodesic_plane") return SurfaceKind::kGeodesicPlane;
  return std::nullopt;
}

std::string_view to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::kGrimCylinder: return "grim_cylinder";
    case SurfaceKind::kGrimProduct: return "grim_product";
    case SurfaceKind::kGrimProductRotated: return "grim_product_rotated";
    case SurfaceKind::kJlt: return "jlt";
    case SurfaceKind::kKilling: return "killing";
    case SurfaceKind::kShrinkerLine: return "shrinker_line";
    case SurfaceKind::kHsl: return "hsl";
    case SurfaceKind::kGeodesicPlane: return "geodesic_plane";
  }
  return "unknown";
}

C2Point preset_translating_vector(SurfaceKind kind) {
  if (kind == SurfaceKind::kGrimProduct) return {1.0, 1.0};
  return {1.0, 0.0};
}

bool preset_requires_trace(SurfaceKind kind) {
  return kind == SurfaceKind::kJlt || kind == SurfaceKind::kKilling || kind == SurfaceKind::kShrinkerLine;
}

std::vector<double> grid_axis(double lo, double hi, double h) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(h)) {
    throw Error(ErrorCode::kNonFinite, "grid range must be finite");
  }
  if (!(h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid spacing must be positive");
  if (!(lo < hi)) throw Error(ErrorCode::kInvalidArgument, "grid range is degenerate");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9)) + 1;
  std::vector<double> axis(n);
  for (std::size_t k = 0; k < n; ++k) axis[k] = lo + static_cast<double>(k) * h;
  return axis;
}

std::optional<SurfaceFunction> preset_function(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::kHsl:
      return SurfaceFunction([](double t, double s) { return C2Point{s * s / 2 - kI * t, std::polar(s, t)}; });
    case SurfaceKind::kGeodesicPlane:
      return SurfaceFunction([](double t, double s) { return C2Point{(s * s - t * t) / 2, t * s}; });
    case SurfaceKind::kGrimCylinder:
      return SurfaceFunction([](double t, double s) { return C2Point{grim(s), t}; });
    case SurfaceKind::kGrimProduct:
      return SurfaceFunction([](double t, double s) { return C2Point{grim(t), grim(s)}; });
    case SurfaceKind::kGrimProductRotated:
      return SurfaceFunction([](double t, double s) { return C2Point{grim(t) + grim(s), grim(t) - grim(s)}; });
    case SurfaceKind::kJlt:
    case SurfaceKind::kKilling:
    case SurfaceKind::kShrinkerLine:
      return std::nullopt;
  }
  return std::nullopt;
}

SurfaceGrid sample_surface(const SurfaceFunction& f, const GridSpec& spec, std::string provenance) {
  SurfaceGrid grid;
  grid.t_samples = grid_axis(spec.t_min, spec.t_max, spec.h_t);
  grid.s_samples = grid_axis(spec.s_min, spec.s_max, spec.h_s);
  grid.h_t = spec.h_t;
  grid.h_s = spec.h_s;
  grid.provenance = std::move(provenance);
  grid.points.resize(grid.rows() * grid.cols());
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) grid.at(i, j) = f(grid.t_samples[i], grid.s_samples[j]);
  }
  return grid;
}

SurfaceGrid preset_surface(SurfaceKind kind, const GridSpec& spec, const CurveTrace* trace) {
  SurfaceGrid grid;
  if (auto f = preset_function(kind)) {
    grid = sample_surface(*f, spec, std::string(to_string(kind)));
  } else {
    if (trace == nullptr) {
      throw Error(ErrorCode::kMissingTrace, std::string(to_string(kind)) + " requires a source curve");
    }
    require_uniform(*trace, "source curve");
    const bool curve_on_t = kind == SurfaceKind::kShrinkerLine;
    grid.provenance = std::string(to_string(kind));
    if (curve_on_t) {
      grid.t_samples = trace_axis(*trace);
      grid.s_samples = grid_axis(spec.s_min, spec.s_max, spec.h_s);
      grid.h_t = trace->step;
      grid.h_s = spec.h_s;
    } else {
      grid.t_samples = grid_axis(spec.t_min, spec.t_max, spec.h_t);
      grid.s_samples = trace_axis(*trace);
      grid.h_t = spec.h_t;
      grid.h_s = trace->step;
    }
    grid.points.resize(grid.rows() * grid.cols());
    for (std::size_t i = 0; i < grid.rows(); ++i) {
      for (std::size_t j = 0; j < grid.cols(); ++j) {
        const double t = grid.t_samples[i];
        const double s = grid.s_samples[j];
        C2Point& out = grid.at(i, j);
        switch (kind) {
          case SurfaceKind::kJlt: {
            const auto& w = (*trace)[j];
            out = {(std::norm(w.p) - t * t) / 2 - kI * w.xi, t * w.p};
            break;
          }
          case SurfaceKind::kKilling: {
            const auto& w = (*trace)[j];
            out = {std::norm(w.p) / 2 - kI * w.xi - kI * t, std::polar(1.0, t) * w.p};
            break;
          }
          case SurfaceKind::kShrinkerLine: {
            const auto& a = (*trace)[i];
            out = {s * s / 2 - std::norm(a.p) / 2 - kI * a.xi, a.p * s};
            break;
          }
          default:
            throw Error(ErrorCode::kUnknownKind, "unexpected preset kind");
        }
      }
    }
  }
  grid.translating_vector = preset_translating_vector(kind);

  const auto expectations = preset_expectations(kind, spec, trace);
  const RealField& metric = *expectations.metric_factor;
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      if (metric(i, j) < kDegenerateThreshold) grid.degenerate.emplace_back(i, j);
    }
  }
  return grid;
}

SurfaceExpectations preset_expectations(SurfaceKind kind, const GridSpec& spec, const CurveTrace* trace) {
  std::vector<double> ts;
  std::vector<double> ss;
  if (preset_requires_trace(kind)) {
    if (trace == nullptr) {
      throw Error(ErrorCode::kMissingTrace, std::string(to_string(kind)) + " requires a source curve");
    }
    if (kind == SurfaceKind::kShrinkerLine) {
      ts = trace_axis(*trace);
      ss = grid_axis(spec.s_min, spec.s_max, spec.h_s);
    } else {
      ts = grid_axis(spec.t_min, spec.t_max, spec.h_t);
      ss = trace_axis(*trace);
    }
  } else {
    ts = grid_axis(spec.t_min, spec.t_max, spec.h_t);
    ss = grid_axis(spec.s_min, spec.s_max, spec.h_s);
  }

  RealField metric(ts.size(), ss.size());
  RealField angle(ts.size(), ss.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ss.size(); ++j) {
      const double t = ts[i];
      const double s = ss[j];
      switch (kind) {
        case SurfaceKind::kHsl:
          metric(i, j) = 1.0 + s * s;
          angle(i, j) = 3 * kPi / 2 + t;
          break;
        case SurfaceKind::kGeodesicPlane:
          metric(i, j) = t * t + s * s;
          angle(i, j) = kPi;
          break;
        case SurfaceKind::kGrimCylinder:
          metric(i, j) = 1.0;
          angle(i, j) = kPi + grim_angle(s);
          break;
        case SurfaceKind::kGrimProduct:
          metric(i, j) = 1.0;
          angle(i, j) = grim_angle(t) + grim_angle(s);
          break;
        case SurfaceKind::kGrimProductRotated:
          metric(i, j) = 2.0;
          angle(i, j) = kPi + grim_angle(t) + grim_angle(s);
          break;
        case SurfaceKind::kJlt:
          metric(i, j) = t * t + std::norm((*trace)[j].p);
          angle(i, j) = kPi + (*trace)[j].xi;
          break;
        case SurfaceKind::kKilling:
          metric(i, j) = 1.0 + std::norm((*trace)[j].p);
          angle(i, j) = 3 * kPi / 2 + t + (*trace)[j].xi;
          break;
        case SurfaceKind::kShrinkerLine:
          metric(i, j) = std::norm((*trace)[i].p) + s * s;
          angle(i, j) = kPi + (*trace)[i].xi;
          break;
      }
    }
  }
  return {std::move(metric), std::move(angle)};
}

MembershipResidual membership_residual_M(const SurfaceGrid& grid, C2Point translation) {
  MembershipResidual out;
  out.min_re_z = std::numeric_limits<double>::infinity();
  for (const auto& raw : grid.points) {
    const C2Point p = raw - translation;
    const double re = p.z1.real();
    const double im = p.z1.imag();
    const cplx rhs = 2.0 * re * std::polar(1.0, -2.0 * im);
    out.max_eq_residual = std::max(out.max_eq_residual, std::abs(p.z2 * p.z2 - rhs));
    out.min_re_z = std::min(out.min_re_z, re);
  }
  return out;
}

SurfaceGrid transform_grid(const SurfaceGrid& grid, const std::array<cplx, 4>& u, C2Point shift) {
  SurfaceGrid out = grid;
  const auto apply = [&](const C2Point& p) { return C2Point{u[0] * p.z1 + u[1] * p.z2, u[2] * p.z1 + u[3] * p.z2}; };
  for (auto& p : out.points) p = apply(p) + shift;
  out.translating_vector = apply(grid.translating_vector);
  out.provenance = grid.provenance + "+transformed";
  return out;
}

}  // namespace lagsol::forge
