#include "lagsol/geo_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagsol/error.hpp"

namespace lagsol::verify {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::complex<double> kI{0.0, 1.0};

double wrap_pi(double x) { return x - 2 * kPi * std::round(x / (2 * kPi)); }

void require_usable(const SurfaceGrid& grid) {
  if (grid.rows() < kMinGridSize || grid.cols() < kMinGridSize) {
    throw Error(ErrorCode::kGridTooSmall, "grid must be at least 5x5");
  }
  forge::validate_grid(grid);
}

double gate_tolerance(const SurfaceGrid& grid, double c) {
  const double h = std::max(grid.h_t, grid.h_s);
  return c * h * h;
}

// Everything derived from the point cloud, computed once.
struct Analysis {
  const SurfaceGrid* grid = nullptr;
  Partials d;
  Metric metric;
  RealField e2u;
  std::vector<bool> mask;
  std::size_t degenerate = 0;
  double conformality_max = 0.0;
  double lagrangian_max = 0.0;
  std::optional<RealField> beta;
  std::size_t margin = kInteriorMargin;

  std::size_t rows() const { return grid->rows(); }
  std::size_t cols() const { return grid->cols(); }
  bool interior(std::size_t i, std::size_t j) const { return mask[i * cols() + j]; }
};

double lagrangian_value(const Partials& d, std::size_t i, std::size_t j) {
  return std::abs(hermitian(d.phi_t(i, j), d.phi_s(i, j)).imag());
}

double conformal_value(const Metric& m, std::size_t i, std::size_t j) {
  return std::max(std::abs(m.e(i, j) - m.g(i, j)), std::abs(m.f(i, j)));
}

RealField unwrap_angle(const Analysis& a) {
  const std::size_t r = a.rows();
  const std::size_t c = a.cols();
  RealField raw(r, c, kNaN);
  std::vector<bool> valid(r * c, false);
  for (std::size_t i = 1; i + 1 < r; ++i) {
    for (std::size_t j = 1; j + 1 < c; ++j) {
      const C2Point& pt = a.d.phi_t(i, j);
      const C2Point& ps = a.d.phi_s(i, j);
      const std::complex<double> det = pt.z1 * ps.z2 - pt.z2 * ps.z1;
      raw(i, j) = std::arg(det);
      valid[i * c + j] = a.e2u(i, j) >= forge::kDegenerateThreshold;
    }
  }
  RealField beta(r, c, kNaN);
  // Anchor row first, then each column downward; degenerate points keep the
  // last valid reference.
  double ref = raw(1, 1);
  beta(1, 1) = ref;
  for (std::size_t j = 2; j + 1 < c; ++j) {
    if (valid[c + j]) ref += wrap_pi(raw(1, j) - ref);
    beta(1, j) = ref;
  }
  for (std::size_t j = 1; j + 1 < c; ++j) {
    double col_ref = beta(1, j);
    for (std::size_t i = 2; i + 1 < r; ++i) {
      if (valid[i * c + j]) col_ref += wrap_pi(raw(i, j) - col_ref);
      beta(i, j) = col_ref;
    }
  }
  return beta;
}

Analysis analyse(const SurfaceGrid& grid, std::size_t margin = kInteriorMargin) {
  require_usable(grid);
  if (margin < kInteriorMargin) {
    throw Error(ErrorCode::kInvalidArgument, "interior margin must be at least 2");
  }
  Analysis a;
  a.grid = &grid;
  a.margin = margin;
  a.d = partials(grid);
  a.metric = induced_metric(a.d);
  a.e2u = RealField(grid.rows(), grid.cols());
  for (std::size_t k = 0; k < a.e2u.values.size(); ++k) {
    a.e2u.values[k] = 0.5 * (a.metric.e.values[k] + a.metric.g.values[k]);
  }
  a.mask = interior_mask(grid, a.metric, margin);
  for (std::size_t i = margin; i + margin < grid.rows(); ++i) {
    for (std::size_t j = margin; j + margin < grid.cols(); ++j) {
      if (!a.interior(i, j)) {
        ++a.degenerate;
        continue;
      }
      a.conformality_max = std::max(a.conformality_max, conformal_value(a.metric, i, j));
      a.lagrangian_max = std::max(a.lagrangian_max, lagrangian_value(a.d, i, j));
    }
  }
  return a;
}

void require_gate(const Analysis& a, double gate_c) {
  const double tol = gate_tolerance(*a.grid, gate_c);
  if (a.conformality_max > tol || a.lagrangian_max > tol) {
    throw Error(ErrorCode::kGateFailure, "conformality " + std::to_string(a.conformality_max) + " / lagrangian " +
                                             std::to_string(a.lagrangian_max) + " exceed " + std::to_string(tol));
  }
}

const RealField& ensure_beta(Analysis& a, double gate_c) {
  if (!a.beta) {
    require_gate(a, gate_c);
    a.beta = unwrap_angle(a);
  }
  return *a.beta;
}

// Fills a full-size field with f(i, j) at interior points, NaN elsewhere.
template <typename F>
RealField interior_field(const Analysis& a, F&& f) {
  RealField out(a.rows(), a.cols(), kNaN);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a.interior(i, j)) out(i, j) = f(i, j);
    }
  }
  return out;
}

C2Point laplace_h(const Analysis& a, std::size_t i, std::size_t j) {
  return (1.0 / a.e2u(i, j)) * (a.d.phi_tt(i, j) + a.d.phi_ss(i, j));
}

struct AngleGradient {
  double bt;
  double bs;
  double btt;
  double bss;
};

AngleGradient angle_derivatives(const Analysis& a, std::size_t i, std::size_t j) {
  const RealField& b = *a.beta;
  const double ht = a.grid->h_t;
  const double hs = a.grid->h_s;
  return {(b(i + 1, j) - b(i - 1, j)) / (2 * ht), (b(i, j + 1) - b(i, j - 1)) / (2 * hs),
          (b(i + 1, j) - 2 * b(i, j) + b(i - 1, j)) / (ht * ht), (b(i, j + 1) - 2 * b(i, j) + b(i, j - 1)) / (hs * hs)};
}

C2Point angle_h(const Analysis& a, std::size_t i, std::size_t j) {
  const AngleGradient g = angle_derivatives(a, i, j);
  const C2Point grad = (1.0 / a.e2u(i, j)) * (g.bt * a.d.phi_t(i, j) + g.bs * a.d.phi_s(i, j));
  return rotate_j(grad);
}

C2Point e_perp(const Analysis& a, std::size_t i, std::size_t j, const C2Point& e) {
  const C2Point& pt = a.d.phi_t(i, j);
  const C2Point& ps = a.d.phi_s(i, j);
  return e - (dot(e, pt) / a.metric.e(i, j)) * pt - (dot(e, ps) / a.metric.g(i, j)) * ps;
}

double mean_over(const RealField& f) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : f.values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void subtract(RealField& f, double c) {
  for (double& v : f.values) {
    if (!std::isnan(v)) v -= c;
  }
}

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values) {
    if (!std::isnan(v)) m = std::max(m, std::abs(v));
  }
  return m;
}

Summary summarize(const RealField& f) {
  Summary s;
  double sum = 0.0;
  double sq = 0.0;
  for (double v : f.values) {
    if (std::isnan(v)) continue;
    const double x = std::abs(v);
    s.max = std::max(s.max, x);
    sum += x;
    sq += x * x;
    ++s.count;
  }
  if (s.count > 0) {
    s.mean = sum / static_cast<double>(s.count);
    s.rms = std::sqrt(sq / static_cast<double>(s.count));
  }
  return s;
}

ResidualField restrict_to(const RealField& full, std::size_t m) {
  ResidualField out;
  const std::size_t r = full.rows > 2 * m ? full.rows - 2 * m : 0;
  const std::size_t c = full.cols > 2 * m ? full.cols - 2 * m : 0;
  out.field = RealField(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out.field(i, j) = full(i + m, j + m);
  }
  out.summary = summarize(out.field);
  return out;
}

struct Prop1Fields {
  RealField offset;
  double beta0;
  RealField drift;
  RealField energy;
};

Prop1Fields prop1_fields(Analysis& a, const C2Point& e, double gate_c) {
  ensure_beta(a, gate_c);
  const C2Point je = rotate_j(e);
  Prop1Fields out;
  out.offset = interior_field(a, [&](std::size_t i, std::size_t j) {
    return (*a.beta)(i, j) + dot(a.grid->at(i, j), je);
  });
  out.beta0 = mean_over(out.offset);
  subtract(out.offset, out.beta0);
  out.drift = interior_field(a, [&](std::size_t i, std::size_t j) {
    const AngleGradient g = angle_derivatives(a, i, j);
    const double lap = (g.btt + g.bss) / a.e2u(i, j);
    const double grad_e = (g.bt * dot(a.d.phi_t(i, j), e) + g.bs * dot(a.d.phi_s(i, j), e)) / a.e2u(i, j);
    return lap + grad_e;
  });
  out.energy = interior_field(a, [&](std::size_t i, std::size_t j) {
    const C2Point h = laplace_h(a, i, j);
    return dot(h, e) - norm_sq(h);
  });
  return out;
}

}  // namespace

Partials partials(const SurfaceGrid& grid) {
  require_usable(grid);
  const std::size_t r = grid.rows();
  const std::size_t c = grid.cols();
  const double ht = grid.h_t;
  const double hs = grid.h_s;
  Partials d{C2Field(r, c), C2Field(r, c), C2Field(r, c), C2Field(r, c)};
  for (std::size_t i = 1; i + 1 < r; ++i) {
    for (std::size_t j = 1; j + 1 < c; ++j) {
      const C2Point& p = grid.at(i, j);
      const C2Point& tp = grid.at(i + 1, j);
      const C2Point& tm = grid.at(i - 1, j);
      const C2Point& sp = grid.at(i, j + 1);
      const C2Point& sm = grid.at(i, j - 1);
      d.phi_t(i, j) = (1.0 / (2 * ht)) * (tp - tm);
      d.phi_s(i, j) = (1.0 / (2 * hs)) * (sp - sm);
      d.phi_tt(i, j) = (1.0 / (ht * ht)) * (tp - 2.0 * p + tm);
      d.phi_ss(i, j) = (1.0 / (hs * hs)) * (sp - 2.0 * p + sm);
    }
  }
  return d;
}

Metric induced_metric(const Partials& d) {
  const std::size_t r = d.phi_t.rows;
  const std::size_t c = d.phi_t.cols;
  Metric m{RealField(r, c), RealField(r, c), RealField(r, c)};
  for (std::size_t k = 0; k < r * c; ++k) {
    m.e.values[k] = norm_sq(d.phi_t.values[k]);
    m.g.values[k] = norm_sq(d.phi_s.values[k]);
    m.f.values[k] = dot(d.phi_t.values[k], d.phi_s.values[k]);
  }
  return m;
}

Metric induced_metric(const SurfaceGrid& grid) { return induced_metric(partials(grid)); }

std::vector<bool> interior_mask(const SurfaceGrid& grid, const Metric& metric, std::size_t margin) {
  const std::size_t r = grid.rows();
  const std::size_t c = grid.cols();
  std::vector<bool> mask(r * c, false);
  for (std::size_t i = margin; i + margin < r; ++i) {
    for (std::size_t j = margin; j + margin < c; ++j) {
      mask[i * c + j] = 0.5 * (metric.e(i, j) + metric.g(i, j)) >= forge::kDegenerateThreshold;
    }
  }
  for (const auto& [i, j] : grid.degenerate) {
    if (i < r && j < c) mask[i * c + j] = false;
  }
  return mask;
}

ConformalityResidual conformality_check(const SurfaceGrid& grid, const RealField* expected_metric) {
  const Analysis a = analyse(grid);
  ConformalityResidual out;
  out.conformal = interior_field(a, [&](std::size_t i, std::size_t j) { return conformal_value(a.metric, i, j); });
  if (expected_metric != nullptr) {
    out.metric_factor = interior_field(a, [&](std::size_t i, std::size_t j) {
      return std::abs(a.metric.e(i, j) - (*expected_metric)(i, j));
    });
  }
  return out;
}

RealField lagrangian_check(const SurfaceGrid& grid) {
  const Analysis a = analyse(grid);
  return interior_field(a, [&](std::size_t i, std::size_t j) { return lagrangian_value(a.d, i, j); });
}

RealField lagrangian_angle(const SurfaceGrid& grid, double gate_c) {
  Analysis a = analyse(grid);
  return ensure_beta(a, gate_c);
}

MeanCurvature mean_curvature(const SurfaceGrid& grid, double gate_c) {
  Analysis a = analyse(grid);
  ensure_beta(a, gate_c);
  const std::size_t r = grid.rows();
  const std::size_t c = grid.cols();
  MeanCurvature out{C2Field(r, c), C2Field(r, c), RealField(r, c, kNaN)};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (!a.interior(i, j)) continue;
      out.laplace(i, j) = laplace_h(a, i, j);
      out.angle(i, j) = angle_h(a, i, j);
      out.cross(i, j) = norm(out.laplace(i, j) - out.angle(i, j));
    }
  }
  return out;
}

RealField soliton_residual(const SurfaceGrid& grid, const C2Point& e) {
  const Analysis a = analyse(grid);
  return interior_field(a, [&](std::size_t i, std::size_t j) { return norm(laplace_h(a, i, j) - e_perp(a, i, j, e)); });
}

Prop1Result prop1_checks(const SurfaceGrid& grid, const C2Point& e, double gate_c) {
  Analysis a = analyse(grid);
  Prop1Fields f = prop1_fields(a, e, gate_c);
  Prop1Result out;
  out.beta0 = f.beta0;
  out.std_dev = summarize(f.offset).rms;
  out.max_drift = max_abs(f.drift);
  out.max_energy = max_abs(f.energy);
  out.angle_offset = std::move(f.offset);
  out.drift = std::move(f.drift);
  out.energy = std::move(f.energy);
  return out;
}

double harmonic_check(const SurfaceGrid& grid, double gate_c) {
  Analysis a = analyse(grid);
  ensure_beta(a, gate_c);
  const RealField lap = interior_field(a, [&](std::size_t i, std::size_t j) {
    const AngleGradient g = angle_derivatives(a, i, j);
    return (g.btt + g.bss) / a.e2u(i, j);
  });
  return max_abs(lap);
}

const Summary* GeometryReport::summary(const std::string& name) const {
  const auto it = identities.find(name);
  return it == identities.end() ? nullptr : &it->second.summary;
}

GeometryReport verify_surface(const SurfaceGrid& grid, const VerifyOptions& options) {
  Analysis a = analyse(grid, options.interior_margin);
  const C2Point e = options.translating_vector.value_or(grid.translating_vector);

  GeometryReport report;
  report.h_t = grid.h_t;
  report.h_s = grid.h_s;
  report.degenerate_count = a.degenerate;
  report.interior_margin = a.margin;
  const auto restrict_interior = [&](const RealField& f) { return restrict_to(f, a.margin); };
  report.translating_vector = e;

  report.identities["conformality"] = restrict_interior(
      interior_field(a, [&](std::size_t i, std::size_t j) { return conformal_value(a.metric, i, j); }));
  report.identities["lagrangian"] = restrict_interior(
      interior_field(a, [&](std::size_t i, std::size_t j) { return lagrangian_value(a.d, i, j); }));
  report.identities["soliton"] = restrict_interior(interior_field(
      a, [&](std::size_t i, std::size_t j) { return norm(laplace_h(a, i, j) - e_perp(a, i, j, e)); }));

  const SurfaceExpectations* ex = options.expectations;
  if (ex != nullptr && ex->metric_factor) {
    const RealField& m = *ex->metric_factor;
    if (m.rows != grid.rows() || m.cols != grid.cols()) {
      throw Error(ErrorCode::kInvalidArgument, "expected metric factor does not match the grid shape");
    }
    report.identities["metric_factor"] = restrict_interior(
        interior_field(a, [&](std::size_t i, std::size_t j) { return a.metric.e(i, j) - m(i, j); }));
  }

  try {
    ensure_beta(a, options.tolerance_c);
    report.gate_passed = true;
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kGateFailure) throw;
    report.gate_passed = false;
  }
  if (!report.gate_passed) {
    // Energy does not depend on beta.
    report.identities["prop1_energy"] = restrict_interior(interior_field(a, [&](std::size_t i, std::size_t j) {
      const C2Point h = laplace_h(a, i, j);
      return dot(h, e) - norm_sq(h);
    }));
    return report;
  }

  report.identities["h_cross"] = restrict_interior(
      interior_field(a, [&](std::size_t i, std::size_t j) { return norm(laplace_h(a, i, j) - angle_h(a, i, j)); }));
  Prop1Fields p1 = prop1_fields(a, e, options.tolerance_c);
  report.beta0 = p1.beta0;
  report.identities["prop1_const"] = restrict_interior(p1.offset);
  report.identities["prop1_drift"] = restrict_interior(p1.drift);
  report.identities["prop1_energy"] = restrict_interior(p1.energy);
  report.identities["harmonic"] = restrict_interior(interior_field(a, [&](std::size_t i, std::size_t j) {
    const AngleGradient g = angle_derivatives(a, i, j);
    return (g.btt + g.bss) / a.e2u(i, j);
  }));

  if (ex != nullptr && ex->angle) {
    const RealField& expected = *ex->angle;
    if (expected.rows != grid.rows() || expected.cols != grid.cols()) {
      throw Error(ErrorCode::kInvalidArgument, "expected angle does not match the grid shape");
    }
    RealField diff =
        interior_field(a, [&](std::size_t i, std::size_t j) { return (*a.beta)(i, j) - expected(i, j); });
    const double c = mean_over(diff);
    subtract(diff, c);
    report.angle_constant = c;
    report.identities["angle"] = restrict_interior(diff);
  }
  return report;
}

std::vector<std::string> default_gated_identities(const VerifyOptions& options) {
  std::vector<std::string> ids{"conformality", "lagrangian", "soliton",      "h_cross",
                               "prop1_const",  "prop1_drift", "prop1_energy"};
  if (options.expectations != nullptr) {
    if (options.expectations->metric_factor) ids.push_back("metric_factor");
    if (options.expectations->angle) ids.push_back("angle");
  }
  if (options.expect_harmonic) ids.push_back("harmonic");
  return ids;
}

std::vector<CheckOutcome> evaluate(const GeometryReport& report, double tolerance_c,
                                   const std::vector<std::string>& identities) {
  const double h = report.h();
  const double tol = tolerance_c * h * h;
  std::vector<CheckOutcome> out;
  for (const auto& name : identities) {
    CheckOutcome c{name, std::numeric_limits<double>::infinity(), tol, false};
    if (const Summary* s = report.summary(name)) {
      c.value = name == "prop1_const" ? s->rms : s->max;
      c.pass = c.value <= tol;
    }
    out.push_back(c);
  }
  return out;
}

const ConvergenceRow* ConvergenceStudy::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.identity == name) return &r;
  }
  return nullptr;
}

ConvergenceStudy convergence_study(const CaseBuilder& builder, std::span<const double> hs,
                                   const VerifyOptions& options) {
  ConvergenceStudy study;
  study.hs.assign(hs.begin(), hs.end());
  std::vector<GeometryReport> reports;
  for (double h : hs) {
    const SurfaceCase sc = builder(h);
    VerifyOptions local = options;
    local.expectations = &sc.expectations;
    reports.push_back(verify_surface(sc.grid, local));
  }
  if (reports.empty()) return study;

  for (const auto& [name, _] : reports.front().identities) {
    ConvergenceRow row;
    row.identity = name;
    bool complete = true;
    for (const auto& rep : reports) {
      const Summary* s = rep.summary(name);
      if (s == nullptr) {
        complete = false;
        break;
      }
      row.residuals.push_back(name == "prop1_const" ? s->rms : s->max);
    }
    if (!complete) continue;
    for (std::size_t k = 0; k + 1 < row.residuals.size(); ++k) {
      const double r0 = row.residuals[k];
      const double r1 = row.residuals[k + 1];
      const double f0 = kFloorFraction * options.tolerance_c * study.hs[k] * study.hs[k];
      const double f1 = kFloorFraction * options.tolerance_c * study.hs[k + 1] * study.hs[k + 1];
      if (r0 < f0 && r1 < f1) {
        row.orders.emplace_back(std::nullopt);
      } else {
        row.orders.emplace_back(std::log(r0 / r1) / std::log(study.hs[k] / study.hs[k + 1]));
      }
    }
    study.rows.push_back(std::move(row));
  }
  return study;
}

}  // namespace lagsol::verify
