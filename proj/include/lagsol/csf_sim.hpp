#pragma once

#include <cstddef>
#include <vector>

#include "lagsol/curve_lab.hpp"
#include "lagsol/planar.hpp"

namespace lagsol::csf {

inline constexpr std::size_t kMinVertices = 8;
inline constexpr double kMinSegment = 1e-12;
inline constexpr double kStabilityFactor = 0.25;
// Fraction of arc length excluded at each end of an open curve.
inline constexpr double kEndWindow = 0.1;

struct PolyCurve {
  std::vector<PlanarPoint> points;
  bool closed = false;

  std::size_t size() const { return points.size(); }
};

// Throws kInvalidArgument for fewer than 8 points and kDegenerateSegment for a
// segment of length at most 1e-12.
void validate(const PolyCurve& poly);

// Picks `vertices` samples of the trace, evenly spaced in index. Closed traces
// give closed polylines.
PolyCurve from_trace(const curves::CurveTrace& trace, std::size_t vertices);

double min_segment(const PolyCurve& poly);
double length(const PolyCurve& poly);

// Three-point arc-length second difference
//   2 / (l1 + l2) * ((p_{i+1} - p_i) / l2 - (p_i - p_{i-1}) / l1).
// Endpoints of open curves get zero.
std::vector<PlanarPoint> curvature_vectors(const PolyCurve& poly);

// One explicit Euler step p <- p + dt kappa. Open endpoints stay fixed.
// Throws kStability when dt > 0.25 * min_segment^2.
PolyCurve flow_step(const PolyCurve& poly, double dt);

// Redistributes the vertices uniformly in chord length by linear
// interpolation. Open endpoints are kept; closed curves keep vertex 0.
PolyCurve resample(const PolyCurve& poly);

struct FlowTrace {
  std::vector<double> times;
  std::vector<PolyCurve> curves;

  std::size_t size() const { return times.size(); }
};

struct EvolveOptions {
  std::size_t resample_every = 10;  // 0 disables resampling
  std::size_t snapshots = 1;        // intervals between t = 0 and t = T
};

// Evolves to time T and records snapshots at T * k / snapshots. Steps use
// min(dt, 0.25 * min_segment^2) so that clustering never breaks the bound.
FlowTrace evolve(const PolyCurve& poly, double T, double dt, const EvolveOptions& options = {});

struct HausdorffWindow {
  double fraction = kEndWindow;
};

// Symmetric nearest-sample Hausdorff distance between two point sets.
double hausdorff(const std::vector<PlanarPoint>& a, const std::vector<PlanarPoint>& b);

// Per snapshot Hausdorff distance between the simulated polyline and the
// closed-form flow of the initial trace. For open curves the simulated samples
// in the first and last 10% of arc length are dropped and the exact samples
// are restricted to the sub-arc between the nearest matches of the window ends.
std::vector<double> compare_to_exact(const FlowTrace& flow, CurveLaw law,
                                     const curves::CurveTrace& initial, const HausdorffWindow& window = {});

// |shoelace area| of a closed polyline.
double enclosed_area(const PolyCurve& poly);
// Mean distance from the vertex centroid.
double mean_radius(const PolyCurve& poly);
PlanarPoint centroid(const PolyCurve& poly);

// Vertex indices inside the interior arc-length window of an open curve; all
// vertices for a closed one.
std::vector<std::size_t> window_indices(const PolyCurve& poly, double fraction = kEndWindow);

}  // namespace lagsol::csf
