#include "lagsol/csf_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lagsol/error.hpp"

namespace lagsol::csf {

namespace {

std::size_t segment_count(const PolyCurve& poly) { return poly.closed ? poly.size() : poly.size() - 1; }

const PlanarPoint& vertex(const PolyCurve& poly, std::size_t k) { return poly.points[k % poly.size()]; }

std::vector<double> cumulative_length(const PolyCurve& poly) {
  std::vector<double> acc(poly.size() + (poly.closed ? 1 : 0), 0.0);
  for (std::size_t k = 0; k + 1 < acc.size(); ++k) {
    acc[k + 1] = acc[k] + std::abs(vertex(poly, k + 1) - vertex(poly, k));
  }
  return acc;
}

double min_dist(const PlanarPoint& p, const std::vector<PlanarPoint>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : set) best = std::min(best, std::norm(p - q));
  return std::sqrt(best);
}

double directed(const std::vector<PlanarPoint>& a, const std::vector<PlanarPoint>& b) {
  double worst = 0.0;
  for (const auto& p : a) worst = std::max(worst, min_dist(p, b));
  return worst;
}

std::size_t nearest_index(const PlanarPoint& p, const std::vector<PlanarPoint>& set) {
  std::size_t best = 0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double dk = std::norm(p - set[k]);
    if (dk < d) {
      d = dk;
      best = k;
    }
  }
  return best;
}

}  // namespace

void validate(const PolyCurve& poly) {
  if (poly.size() < kMinVertices) {
    throw Error(ErrorCode::kInvalidArgument, "polyline needs at least 8 points, got " + std::to_string(poly.size()));
  }
  for (const auto& p : poly.points) {
    if (!is_finite(p)) throw Error(ErrorCode::kNonFinite, "polyline has a non-finite vertex");
  }
  for (std::size_t k = 0; k < segment_count(poly); ++k) {
    if (std::abs(vertex(poly, k + 1) - vertex(poly, k)) <= kMinSegment) {
      throw Error(ErrorCode::kDegenerateSegment, "segment " + std::to_string(k) + " has zero length");
    }
  }
}

PolyCurve from_trace(const curves::CurveTrace& trace, std::size_t vertices) {
  const std::size_t n = trace.size();
  if (vertices < kMinVertices || vertices > n) {
    throw Error(ErrorCode::kInvalidArgument, "cannot take " + std::to_string(vertices) + " vertices from a trace of " +
                                                 std::to_string(n) + " samples");
  }
  PolyCurve poly;
  poly.closed = trace.closed;
  for (std::size_t k = 0; k < vertices; ++k) {
    std::size_t idx = 0;
    if (trace.closed) {
      idx = k * n / vertices;
    } else {
      idx = static_cast<std::size_t>(std::llround(static_cast<double>(k) * static_cast<double>(n - 1) /
                                                  static_cast<double>(vertices - 1)));
    }
    poly.points.push_back(trace[idx].p);
  }
  validate(poly);
  return poly;
}

double min_segment(const PolyCurve& poly) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < segment_count(poly); ++k) {
    m = std::min(m, std::abs(vertex(poly, k + 1) - vertex(poly, k)));
  }
  return m;
}

double length(const PolyCurve& poly) { return cumulative_length(poly).back(); }

std::vector<PlanarPoint> curvature_vectors(const PolyCurve& poly) {
  validate(poly);
  const std::size_t n = poly.size();
  std::vector<PlanarPoint> kappa(n, PlanarPoint{});
  const std::size_t first = poly.closed ? 0 : 1;
  const std::size_t last = poly.closed ? n : n - 1;
  for (std::size_t i = first; i < last; ++i) {
    const PlanarPoint& prev = poly.points[(i + n - 1) % n];
    const PlanarPoint& cur = poly.points[i];
    const PlanarPoint& next = poly.points[(i + 1) % n];
    const double l1 = std::abs(cur - prev);
    const double l2 = std::abs(next - cur);
    kappa[i] = (2.0 / (l1 + l2)) * ((next - cur) / l2 - (cur - prev) / l1);
  }
  return kappa;
}

PolyCurve flow_step(const PolyCurve& poly, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::kInvalidArgument, "dt must be finite and >= 0");
  validate(poly);
  const double lmin = min_segment(poly);
  const double bound = kStabilityFactor * lmin * lmin;
  if (dt > bound) {
    throw Error(ErrorCode::kStability,
                "dt " + std::to_string(dt) + " exceeds the stability bound " + std::to_string(bound));
  }
  const auto kappa = curvature_vectors(poly);
  PolyCurve out = poly;
  for (std::size_t i = 0; i < poly.size(); ++i) out.points[i] += dt * kappa[i];
  validate(out);
  return out;
}

PolyCurve resample(const PolyCurve& poly) {
  validate(poly);
  const auto acc = cumulative_length(poly);
  const double total = acc.back();
  const std::size_t n = poly.size();
  const double spacing = total / static_cast<double>(poly.closed ? n : n - 1);
  PolyCurve out;
  out.closed = poly.closed;
  out.points.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!poly.closed && k + 1 == n) {
      out.points.push_back(poly.points.back());
      break;
    }
    const double target = spacing * static_cast<double>(k);
    while (seg + 2 < acc.size() && acc[seg + 1] < target) ++seg;
    const double len = acc[seg + 1] - acc[seg];
    const double w = len > 0.0 ? std::clamp((target - acc[seg]) / len, 0.0, 1.0) : 0.0;
    out.points.push_back(vertex(poly, seg) + w * (vertex(poly, seg + 1) - vertex(poly, seg)));
  }
  validate(out);
  return out;
}

FlowTrace evolve(const PolyCurve& poly, double T, double dt, const EvolveOptions& options) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw Error(ErrorCode::kInvalidArgument, "T must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::kInvalidArgument, "dt must be finite and > 0");
  if (options.snapshots == 0) throw Error(ErrorCode::kInvalidArgument, "snapshots must be positive");
  validate(poly);

  FlowTrace trace;
  trace.times.push_back(0.0);
  trace.curves.push_back(poly);
  if (T == 0.0) return trace;

  PolyCurve cur = poly;
  double t = 0.0;
  std::size_t steps = 0;
  for (std::size_t k = 1; k <= options.snapshots; ++k) {
    const double target = T * static_cast<double>(k) / static_cast<double>(options.snapshots);
    while (t < target) {
      const double lmin = min_segment(cur);
      double step = std::min(dt, kStabilityFactor * lmin * lmin);
      // Land exactly on the snapshot time; avoid a trailing sliver step.
      if (t + step >= target - 1e-12 * step) step = target - t;
      cur = flow_step(cur, step);
      t = t + step >= target - 1e-12 * step ? target : t + step;
      ++steps;
      if (options.resample_every != 0 && steps % options.resample_every == 0) cur = resample(cur);
    }
    trace.times.push_back(target);
    trace.curves.push_back(cur);
  }
  return trace;
}

double hausdorff(const std::vector<PlanarPoint>& a, const std::vector<PlanarPoint>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "hausdorff distance of an empty set");
  return std::max(directed(a, b), directed(b, a));
}

std::vector<std::size_t> window_indices(const PolyCurve& poly, double fraction) {
  std::vector<std::size_t> idx;
  if (poly.closed) {
    for (std::size_t k = 0; k < poly.size(); ++k) idx.push_back(k);
    return idx;
  }
  const auto acc = cumulative_length(poly);
  const double total = acc.back();
  for (std::size_t k = 0; k < poly.size(); ++k) {
    if (acc[k] >= fraction * total && acc[k] <= (1.0 - fraction) * total) idx.push_back(k);
  }
  return idx;
}

std::vector<double> compare_to_exact(const FlowTrace& flow, CurveLaw law, const curves::CurveTrace& initial,
                                     const HausdorffWindow& window) {
  std::vector<double> out;
  for (std::size_t k = 0; k < flow.size(); ++k) {
    const auto exact_trace = curves::csf_exact_flow(initial, law, flow.times[k]);
    std::vector<PlanarPoint> exact;
    exact.reserve(exact_trace.size());
    for (const auto& smp : exact_trace.samples) exact.push_back(smp.p);

    const PolyCurve& sim = flow.curves[k];
    std::vector<PlanarPoint> simulated;
    for (std::size_t i : window_indices(sim, window.fraction)) simulated.push_back(sim.points[i]);
    if (simulated.empty()) throw Error(ErrorCode::kInvalidArgument, "empty comparison window");

    if (!sim.closed) {
      std::size_t lo = nearest_index(simulated.front(), exact);
      std::size_t hi = nearest_index(simulated.back(), exact);
      if (lo > hi) std::swap(lo, hi);
      exact = std::vector<PlanarPoint>(exact.begin() + static_cast<std::ptrdiff_t>(lo),
                                       exact.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    }
    out.push_back(hausdorff(simulated, exact));
  }
  return out;
}

double enclosed_area(const PolyCurve& poly) {
  double twice = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const PlanarPoint& p = poly.points[k];
    const PlanarPoint& q = poly.points[(k + 1) % n];
    twice += p.real() * q.imag() - q.real() * p.imag();
  }
  return 0.5 * std::abs(twice);
}

PlanarPoint centroid(const PolyCurve& poly) {
  PlanarPoint c{};
  for (const auto& p : poly.points) c += p;
  return c / static_cast<double>(poly.size());
}

double mean_radius(const PolyCurve& poly) {
  const PlanarPoint c = centroid(poly);
  double sum = 0.0;
  for (const auto& p : poly.points) sum += std::abs(p - c);
  return sum / static_cast<double>(poly.size());
}

}  // namespace lagsol::csf
