#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lagsol/curve_lab.hpp"
#include "lagsol/planar.hpp"

namespace lagsol::forge {

// Dense row-major real field over a (t, s) grid.
struct RealField {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  RealField() = default;
  RealField(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// Soliton angle phi in [0, pi).
class SolitonAngle {
 public:
  explicit SolitonAngle(double phi);
  double value() const { return phi_; }

 private:
  double phi_;
};

// Rectangular grid of points of C^2 over the parameter samples (t_i, s_j),
// stored row-major in t then s.
struct SurfaceGrid {
  std::vector<double> t_samples;
  std::vector<double> s_samples;
  std::vector<C2Point> points;
  std::optional<double> phi;  // empty for presets
  std::string provenance;
  double h_t = 0.0;
  double h_s = 0.0;
  C2Point translating_vector{{1.0, 0.0}, {0.0, 0.0}};
  std::vector<std::pair<std::size_t, std::size_t>> degenerate;

  std::size_t rows() const { return t_samples.size(); }
  std::size_t cols() const { return s_samples.size(); }
  C2Point& at(std::size_t i, std::size_t j) { return points[i * cols() + j]; }
  const C2Point& at(std::size_t i, std::size_t j) const { return points[i * cols() + j]; }
};

// Checks rectangular completeness, finiteness and uniform spacing.
void validate_grid(const SurfaceGrid& grid);

inline constexpr double kLawTolerance = 1e-6;
inline constexpr double kDegenerateThreshold = 1e-10;

// Largest per-sample residuals of kappa_alpha - Im(e^{i phi} alpha' conj(alpha))
// and kappa_omega + Im(e^{i phi} omega' conj(omega)).
std::pair<double, double> star_law_residuals(const curves::CurveTrace& alpha, const curves::CurveTrace& omega,
                                             SolitonAngle phi);

// Production builder for every phi:
//   z1 = e^{i phi} (int_{s0}^{s} omega' conj(omega) - int_{t0}^{t} alpha' conj(alpha)),
//   z2 = alpha(t) omega(s),
// with cumulative trapezoid quadrature from the first sample of each trace.
SurfaceGrid build_star_product(const curves::CurveTrace& alpha, const curves::CurveTrace& omega, SolitonAngle phi);

// Cross-check builder: the separated closed form for phi != pi/2 and the
// quadrature form of <alpha', J alpha>, <omega', J omega> at phi = pi/2
// (selected when |cos phi| < 1e-8). Agrees with build_star_product up to a
// constant in z1.
SurfaceGrid build_star_product_explicit(const curves::CurveTrace& alpha, const curves::CurveTrace& omega,
                                        SolitonAngle phi);

// |alpha(t_i)|^2 + |omega(s_j)|^2.
RealField expected_metric_factor(const curves::CurveTrace& alpha, const curves::CurveTrace& omega);

// xi(t_i) + theta(s_j) + pi + phi, unwrapped.
RealField expected_angle(const curves::CurveTrace& alpha, const curves::CurveTrace& omega, SolitonAngle phi);

enum class SurfaceKind {
  kGrimCylinder,
  kGrimProduct,
  kGrimProductRotated,
  kJlt,
  kKilling,
  kShrinkerLine,
  kHsl,
  kGeodesicPlane,
};

std::optional<SurfaceKind> parse_surface_kind(std::string_view name);
std::string_view to_string(SurfaceKind kind);

// Translating vector of each preset.
C2Point preset_translating_vector(SurfaceKind kind);

// Whether the preset needs a source curve: jlt, killing (expander omega) and
// shrinker_line (shrinker alpha).
bool preset_requires_trace(SurfaceKind kind);

struct GridSpec {
  double t_min = -1.0;
  double t_max = 1.0;
  double s_min = -1.0;
  double s_max = 1.0;
  double h_t = 1e-2;
  double h_s = 1e-2;
};

std::vector<double> grid_axis(double lo, double hi, double h);

// Closed-form evaluation of the preset surfaces. For jlt and killing the trace
// supplies the s axis; for shrinker_line it supplies the t axis.
SurfaceGrid preset_surface(SurfaceKind kind, const GridSpec& spec, const curves::CurveTrace* trace = nullptr);

struct SurfaceExpectations {
  std::optional<RealField> metric_factor;
  std::optional<RealField> angle;
};

// Closed-form metric factor and Lagrangian angle of a preset, on the grid that
// preset_surface produces for the same inputs.
SurfaceExpectations preset_expectations(SurfaceKind kind, const GridSpec& spec,
                                        const curves::CurveTrace* trace = nullptr);

using SurfaceFunction = std::function<C2Point(double t, double s)>;

// Samples an arbitrary parameterization on the grid spec.
SurfaceGrid sample_surface(const SurfaceFunction& f, const GridSpec& spec, std::string provenance);

// Closed-form parameterization for presets that do not depend on a trace.
std::optional<SurfaceFunction> preset_function(SurfaceKind kind);

struct MembershipResidual {
  double max_eq_residual = 0.0;
  double min_re_z = 0.0;
};

// max |z2^2 - 2 Re z1 e^{-2i Im z1}| and min Re z1 over the grid, after
// subtracting `translation` from every point.
MembershipResidual membership_residual_M(const SurfaceGrid& grid, C2Point translation = {});

// Applies p -> U p + shift with U a 2x2 complex matrix (row-major).
SurfaceGrid transform_grid(const SurfaceGrid& grid, const std::array<std::complex<double>, 4>& unitary,
                           C2Point shift);

}  // namespace lagsol::forge
