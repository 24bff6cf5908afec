#include "lagsol/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "lagsol/error.hpp"

namespace lagsol::io {

namespace {

constexpr std::string_view kCurveHeader = "s,x,y,xi,kappa";
constexpr std::string_view kSurfaceHeader = "t,s,re_z1,im_z1,re_z2,im_z2";

std::vector<double> parse_row(const std::string& line, std::size_t expected, std::size_t line_no) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      throw Error(ErrorCode::kIo, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
    }
    out.push_back(v);
  }
  if (out.size() != expected) {
    throw Error(ErrorCode::kIo, "line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                                    " columns, got " + std::to_string(out.size()));
  }
  return out;
}

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIo, "empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw Error(ErrorCode::kIo, "expected header '" + std::string(header) + "', got '" + line + "'");
}

template <typename F>
void for_each_row(std::istream& in, std::size_t columns, F&& f) {
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    f(parse_row(line, columns, line_no));
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve_csv(std::ostream& out, const curves::CurveTrace& trace) {
  out << kCurveHeader << '\n';
  for (const auto& c : trace.samples) {
    out << format_real(c.s) << ',' << format_real(c.p.real()) << ',' << format_real(c.p.imag()) << ','
        << format_real(c.xi) << ',' << format_real(c.kappa) << '\n';
  }
}

curves::CurveTrace read_curve_csv(std::istream& in) {
  expect_header(in, kCurveHeader);
  curves::CurveTrace trace;
  for_each_row(in, 5, [&](const std::vector<double>& r) {
    trace.samples.push_back({r[0], {r[1], r[2]}, r[3], r[4]});
  });
  if (trace.size() < 2) throw Error(ErrorCode::kIo, "curve CSV needs at least two samples");
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (!(trace[k].s > trace[k - 1].s)) throw Error(ErrorCode::kIo, "curve CSV samples must increase in s");
  }
  trace.step = trace[1].s - trace[0].s;
  return trace;
}

void write_surface_csv(std::ostream& out, const forge::SurfaceGrid& grid) {
  out << kSurfaceHeader << '\n';
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      const C2Point& p = grid.at(i, j);
      out << format_real(grid.t_samples[i]) << ',' << format_real(grid.s_samples[j]) << ','
          << format_real(p.z1.real()) << ',' << format_real(p.z1.imag()) << ',' << format_real(p.z2.real()) << ','
          << format_real(p.z2.imag()) << '\n';
    }
  }
}

forge::SurfaceGrid read_surface_csv(std::istream& in, std::string provenance) {
  expect_header(in, kSurfaceHeader);
  std::vector<std::vector<double>> rows;
  for_each_row(in, 6, [&](std::vector<double> r) { rows.push_back(std::move(r)); });
  if (rows.empty()) throw Error(ErrorCode::kIo, "surface CSV has no samples");

  forge::SurfaceGrid grid;
  grid.provenance = std::move(provenance);
  std::size_t cols = 0;
  while (cols < rows.size() && rows[cols][0] == rows[0][0]) ++cols;
  if (rows.size() % cols != 0) throw Error(ErrorCode::kIo, "surface CSV is not a rectangular grid");
  const std::size_t nrows = rows.size() / cols;
  for (std::size_t j = 0; j < cols; ++j) grid.s_samples.push_back(rows[j][1]);
  for (std::size_t i = 0; i < nrows; ++i) {
    grid.t_samples.push_back(rows[i * cols][0]);
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& r = rows[i * cols + j];
      if (r[0] != grid.t_samples[i] || r[1] != grid.s_samples[j]) {
        throw Error(ErrorCode::kIo, "surface CSV row " + std::to_string(i * cols + j + 2) + " breaks the grid order");
      }
      grid.points.push_back({{r[2], r[3]}, {r[4], r[5]}});
    }
  }
  if (nrows < 2 || cols < 2) throw Error(ErrorCode::kGridTooSmall, "surface CSV grid is smaller than 2x2");
  grid.h_t = grid.t_samples[1] - grid.t_samples[0];
  grid.h_s = grid.s_samples[1] - grid.s_samples[0];
  forge::validate_grid(grid);
  return grid;
}

std::optional<ObjProjection> parse_projection(std::string_view name) {
  if (name == "z1") return ObjProjection::kZ1;
  if (name == "z2") return ObjProjection::kZ2;
  if (name == "mixed") return ObjProjection::kMixed;
  return std::nullopt;
}

std::string_view to_string(ObjProjection p) {
  switch (p) {
    case ObjProjection::kZ1: return "z1";
    case ObjProjection::kZ2: return "z2";
    case ObjProjection::kMixed: return "mixed";
  }
  return "z1";
}

void write_obj(std::ostream& out, const forge::SurfaceGrid& grid, ObjProjection projection) {
  out << "# " << grid.provenance << " projection " << to_string(projection) << '\n';
  for (const auto& p : grid.points) {
    double x = 0, y = 0, z = 0;
    switch (projection) {
      case ObjProjection::kZ1: x = p.z1.real(), y = p.z1.imag(), z = p.z2.real(); break;
      case ObjProjection::kZ2: x = p.z2.real(), y = p.z2.imag(), z = p.z1.real(); break;
      case ObjProjection::kMixed: x = p.z1.real(), y = p.z2.real(), z = p.z2.imag(); break;
    }
    out << "v " << format_real(x) << ' ' << format_real(y) << ' ' << format_real(z) << '\n';
  }
  const std::size_t c = grid.cols();
  for (std::size_t i = 0; i + 1 < grid.rows(); ++i) {
    for (std::size_t j = 0; j + 1 < c; ++j) {
      // OBJ indices are 1-based.
      const std::size_t v00 = i * c + j + 1;
      out << "f " << v00 << ' ' << v00 + c << ' ' << v00 + c + 1 << ' ' << v00 + 1 << '\n';
    }
  }
}

void write_flow_csv(std::ostream& out, const csf::FlowTrace& flow) {
  out << "t,vertex_index,x,y\n";
  for (std::size_t k = 0; k < flow.size(); ++k) {
    const auto& pts = flow.curves[k].points;
    for (std::size_t v = 0; v < pts.size(); ++v) {
      out << format_real(flow.times[k]) << ',' << v << ',' << format_real(pts[v].real()) << ','
          << format_real(pts[v].imag()) << '\n';
    }
  }
}

nlohmann::ordered_json summary_to_json(const verify::Summary& s) {
  return {{"max", s.max}, {"mean", s.mean}, {"rms", s.rms}, {"count", s.count}};
}

nlohmann::ordered_json report_to_json(const verify::GeometryReport& report, bool include_fields) {
  nlohmann::ordered_json j;
  j["h_t"] = report.h_t;
  j["h_s"] = report.h_s;
  j["interior_margin"] = report.interior_margin;
  j["degenerate_count"] = report.degenerate_count;
  j["gate_passed"] = report.gate_passed;
  const C2Point& e = report.translating_vector;
  j["translating_vector"] = {e.z1.real(), e.z1.imag(), e.z2.real(), e.z2.imag()};
  j["beta0"] = report.beta0 ? nlohmann::ordered_json(*report.beta0) : nlohmann::ordered_json(nullptr);
  j["angle_constant"] =
      report.angle_constant ? nlohmann::ordered_json(*report.angle_constant) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json ids = nlohmann::ordered_json::object();
  for (const auto& [name, field] : report.identities) {
    nlohmann::ordered_json entry = summary_to_json(field.summary);
    if (include_fields) {
      nlohmann::ordered_json values = nlohmann::ordered_json::array();
      for (double v : field.field.values) {
        values.push_back(std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v));
      }
      entry["field"] = {{"rows", field.field.rows}, {"cols", field.field.cols}, {"values", std::move(values)}};
    }
    ids[name] = std::move(entry);
  }
  j["identities"] = std::move(ids);
  return j;
}

}  // namespace lagsol::io
