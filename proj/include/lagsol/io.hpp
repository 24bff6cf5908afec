#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lagsol/csf_sim.hpp"
#include "lagsol/curve_lab.hpp"
#include "lagsol/geo_verify.hpp"
#include "lagsol/surface_forge.hpp"

namespace lagsol::io {

// Round-trip precision text, "%.17g".
std::string format_real(double v);

// s,x,y,xi,kappa
void write_curve_csv(std::ostream& out, const curves::CurveTrace& trace);
// Reads the curve CSV. The step is taken from the first two samples; `closed`
// is not stored and defaults to false.
curves::CurveTrace read_curve_csv(std::istream& in);

// t,s,re_z1,im_z1,re_z2,im_z2, row-major in t then s.
void write_surface_csv(std::ostream& out, const forge::SurfaceGrid& grid);
forge::SurfaceGrid read_surface_csv(std::istream& in, std::string provenance);

enum class ObjProjection { kZ1, kZ2, kMixed };

std::optional<ObjProjection> parse_projection(std::string_view name);
std::string_view to_string(ObjProjection p);

// Vertices projected to R^3:
//   z1:    (Re z1, Im z1, Re z2)
//   z2:    (Re z2, Im z2, Re z1)
//   mixed: (Re z1, Re z2, Im z2)
// with one quad face per grid cell.
void write_obj(std::ostream& out, const forge::SurfaceGrid& grid, ObjProjection projection);

// t,vertex_index,x,y
void write_flow_csv(std::ostream& out, const csf::FlowTrace& flow);

// Summaries per identity, plus the flattened interior fields when requested.
// NaN field entries become null.
nlohmann::ordered_json report_to_json(const verify::GeometryReport& report, bool include_fields);

nlohmann::ordered_json summary_to_json(const verify::Summary& s);

}  // namespace lagsol::io
