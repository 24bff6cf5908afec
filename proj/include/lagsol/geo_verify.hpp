#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagsol/planar.hpp"
#include "lagsol/surface_forge.hpp"

namespace lagsol::verify {

using forge::RealField;
using forge::SurfaceExpectations;
using forge::SurfaceGrid;

struct C2Field {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<C2Point> values;

  C2Field() = default;
  C2Field(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c) {}

  C2Point& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  const C2Point& operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// Second-order central differences. Values are meaningful on the index range
// [1, n - 2] of each axis; the outer layer is left at zero.
struct Partials {
  C2Field phi_t;
  C2Field phi_s;
  C2Field phi_tt;
  C2Field phi_ss;
};

inline constexpr std::size_t kMinGridSize = 5;
// Boundary layers excluded from every statistic.
inline constexpr std::size_t kInteriorMargin = 2;

Partials partials(const SurfaceGrid& grid);

// E = |Phi_t|^2, G = |Phi_s|^2, F = <Phi_t, Phi_s>.
struct Metric {
  RealField e;
  RealField g;
  RealField f;
};

Metric induced_metric(const SurfaceGrid& grid);
Metric induced_metric(const Partials& d);

// Per point max(|E - G|, |F|) and, when supplied, |E - expected|.
struct ConformalityResidual {
  RealField conformal;
  std::optional<RealField> metric_factor;
};

ConformalityResidual conformality_check(const SurfaceGrid& grid, const RealField* expected_metric = nullptr);

// |Im (Phi_t, Phi_s)|, the pullback of the Kaehler form.
RealField lagrangian_check(const SurfaceGrid& grid);

// Lagrangian angle from e^{i beta} = e^{-2u} det_C(Phi_t, Phi_s), unwrapped from
// the corner (1, 1) along that row and then down each column. Defined on
// [1, n - 2]. Throws kGateFailure unless the conformality and Lagrangian
// residuals over the interior are at most gate_c * h^2.
RealField lagrangian_angle(const SurfaceGrid& grid, double gate_c = 10.0);

// H_laplace = e^{-2u} (Phi_tt + Phi_ss), H_angle = J e^{-2u} (beta_t Phi_t + beta_s Phi_s)
// with e^{2u} = (E + G) / 2.
struct MeanCurvature {
  C2Field laplace;
  C2Field angle;
  RealField cross;  // |H_laplace - H_angle|
};

MeanCurvature mean_curvature(const SurfaceGrid& grid, double gate_c = 10.0);

// |H_laplace - e^perp| with e^perp = e - <e,Phi_t>/E Phi_t - <e,Phi_s>/G Phi_s.
RealField soliton_residual(const SurfaceGrid& grid, const C2Point& e);

struct Prop1Result {
  RealField angle_offset;  // beta + <Phi, J e> minus its interior mean
  double beta0 = 0.0;      // the removed mean
  double std_dev = 0.0;
  RealField drift;   // Delta beta + <grad beta, e>
  RealField energy;  // Delta <Phi, e> - |H|^2
  double max_drift = 0.0;
  double max_energy = 0.0;
};

Prop1Result prop1_checks(const SurfaceGrid& grid, const C2Point& e, double gate_c = 10.0);

// max |Delta beta| over the interior.
double harmonic_check(const SurfaceGrid& grid, double gate_c = 10.0);

struct Summary {
  double max = 0.0;
  double mean = 0.0;
  double rms = 0.0;
  std::size_t count = 0;
};

// A residual restricted to the interior block [m, n - m) of each axis, m the
// interior margin;
// excluded (degenerate) points hold NaN.
struct ResidualField {
  RealField field;
  Summary summary;
};

struct GeometryReport {
  std::map<std::string, ResidualField> identities;
  std::size_t interior_margin = kInteriorMargin;
  std::size_t degenerate_count = 0;
  double h_t = 0.0;
  double h_s = 0.0;
  bool gate_passed = false;
  std::optional<double> beta0;
  std::optional<double> angle_constant;
  C2Point translating_vector;

  double h() const { return std::max(h_t, h_s); }
  const Summary* summary(const std::string& name) const;
};

struct VerifyOptions {
  double tolerance_c = 10.0;
  std::optional<C2Point> translating_vector;  // defaults to the grid's
  const SurfaceExpectations* expectations = nullptr;
  bool expect_harmonic = false;
  std::size_t interior_margin = kInteriorMargin;  // at least 2
};

// Every identity over the interior non-degenerate points. Angle-dependent
// identities are omitted when the gate fails.
GeometryReport verify_surface(const SurfaceGrid& grid, const VerifyOptions& options = {});

// Interior mask: true at points used by summaries.
std::vector<bool> interior_mask(const SurfaceGrid& grid, const Metric& metric, std::size_t margin = kInteriorMargin);

struct CheckOutcome {
  std::string identity;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Gated comparison of summaries against C h^2. prop1_const uses its rms (the
// standard deviation); every other identity uses its max. Identities absent
// from the report fail.
std::vector<CheckOutcome> evaluate(const GeometryReport& report, double tolerance_c,
                                   const std::vector<std::string>& identities);

// Default gated identity list for a verification run.
std::vector<std::string> default_gated_identities(const VerifyOptions& options);

// Residuals below this fraction of C h^2 are treated as round-off; no order
// is reported for a pair of such levels.
inline constexpr double kFloorFraction = 1e-4;

struct SurfaceCase {
  SurfaceGrid grid;
  SurfaceExpectations expectations;
};

using CaseBuilder = std::function<SurfaceCase(double h)>;

struct ConvergenceRow {
  std::string identity;
  std::vector<double> residuals;
  std::vector<std::optional<double>> orders;  // empty entry: both levels below the floor
};

struct ConvergenceStudy {
  std::vector<double> hs;
  std::vector<ConvergenceRow> rows;

  const ConvergenceRow* row(const std::string& name) const;
};

// Observed orders log(r(h_k)/r(h_{k+1})) / log(h_k/h_{k+1}) per identity.
ConvergenceStudy convergence_study(const CaseBuilder& builder, std::span<const double> hs,
                                   const VerifyOptions& options = {});

}  // namespace lagsol::verify
