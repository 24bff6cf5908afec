#include "lagsol/config.hpp"

#include <cmath>
#include <initializer_list>
#include <set>

#include "lagsol/error.hpp"

namespace lagsol::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, path + ": " + what);
}

// A JSON object together with its path, for strict key checks and typed reads.
class Node {
 public:
  Node(const Json& j, std::string path, std::initializer_list<std::string_view> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
    const std::set<std::string_view> ok(allowed);
    for (const auto& item : j_.items()) {
      if (!ok.contains(item.key())) fail(child(item.key()), "unknown key");
    }
  }

  std::string child(std::string_view key) const { return path_ + "." + std::string(key); }
  bool has(std::string_view key) const { return j_.contains(std::string(key)); }
  const Json& at(std::string_view key) const { return j_.at(std::string(key)); }
  const std::string& path() const { return path_; }

  double real(std::string_view key) const {
    if (!has(key)) fail(child(key), "missing required field '" + std::string(key) + "'");
    return as_real(at(key), child(key));
  }
  double real(std::string_view key, double fallback) const { return has(key) ? real(key) : fallback; }
  std::optional<double> opt_real(std::string_view key) const {
    return has(key) ? std::optional<double>(real(key)) : std::nullopt;
  }

  double positive(std::string_view key) const {
    const double v = real(key);
    if (!(v > 0.0)) fail(child(key), "must be > 0");
    return v;
  }
  double positive(std::string_view key, double fallback) const { return has(key) ? positive(key) : fallback; }

  std::size_t count(std::string_view key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(child(key), "expected a non-negative integer");
    return static_cast<std::size_t>(v.get<long long>());
  }

  bool flag(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!at(key).is_boolean()) fail(child(key), "expected a boolean");
    return at(key).get<bool>();
  }

  std::string text(std::string_view key) const {
    if (!has(key)) fail(child(key), "missing required field '" + std::string(key) + "'");
    if (!at(key).is_string()) fail(child(key), "expected a string");
    return at(key).get<std::string>();
  }
  std::string text(std::string_view key, std::string fallback) const { return has(key) ? text(key) : fallback; }

  static double as_real(const Json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "must be finite");
    return d;
  }

 private:
  const Json& j_;
  std::string path_;
};

std::vector<double> real_array(const Json& v, const std::string& path, std::size_t n) {
  if (!v.is_array() || v.size() != n) fail(path, "expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(Node::as_real(v[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

double parse_phi(const Node& n, std::string_view key) {
  const double phi = n.real(key);
  if (phi < 0.0 || phi >= kPi) fail(n.child(key), "phi must lie in [0, pi)");
  return phi;
}

CurveLaw parse_law(const Json& j, const std::string& path) {
  const Node n(j, path, {"a", "b"});
  return CurveLaw{n.real("a"), n.real("b")};
}

CurveSpec parse_curve(const Json& j, const std::string& path) {
  const Node n(j, path, {"kind", "law", "phi", "p0", "xi0", "s_min", "s_max", "h", "csv"});
  CurveSpec spec;
  const std::string kind = n.text("kind");
  curves::CurvePresetParams defaults;
  if (kind == "law") {
    spec.source = CurveSource::kLaw;
    if (!n.has("law")) fail(n.child("law"), "missing required field 'law'");
    spec.law = parse_law(n.at("law"), n.child("law"));
  } else if (kind == "grim_reaper") {
    spec.source = CurveSource::kGrimReaper;
    defaults.s_min = -1.0;
  } else if (kind == "csv") {
    spec.source = CurveSource::kCsv;
    spec.csv = n.text("csv");
  } else if (auto k = curves::parse_curve_kind(kind)) {
    spec.source = CurveSource::kPreset;
    spec.kind = *k;
    defaults = curves::default_preset_params(*k);
  } else {
    fail(n.child("kind"), "unknown curve kind '" + kind + "'");
  }
  if (spec.source != CurveSource::kLaw && n.has("law")) fail(n.child("law"), "only valid with kind 'law'");
  if (spec.source != CurveSource::kCsv && n.has("csv")) fail(n.child("csv"), "only valid with kind 'csv'");
  if (n.has("phi")) spec.phi = parse_phi(n, "phi");
  if (n.has("p0")) {
    const auto v = real_array(n.at("p0"), n.child("p0"), 2);
    spec.p0 = {v[0], v[1]};
  } else {
    spec.p0 = defaults.p0;
  }
  spec.xi0 = n.real("xi0", defaults.xi0);
  spec.s_min = n.real("s_min", defaults.s_min);
  spec.s_max = n.real("s_max", defaults.s_max);
  if (!(spec.s_max > spec.s_min)) fail(n.child("s_max"), "must exceed s_min");
  if (spec.source != CurveSource::kCsv) spec.h = n.positive("h");
  return spec;
}

forge::GridSpec parse_grid(const Json& j, const std::string& path) {
  const Node n(j, path, {"t_min", "t_max", "s_min", "s_max", "h", "h_t", "h_s"});
  forge::GridSpec g;
  g.t_min = n.real("t_min", g.t_min);
  g.t_max = n.real("t_max", g.t_max);
  g.s_min = n.real("s_min", g.s_min);
  g.s_max = n.real("s_max", g.s_max);
  if (!(g.t_max > g.t_min)) fail(n.child("t_max"), "must exceed t_min");
  if (!(g.s_max > g.s_min)) fail(n.child("s_max"), "must exceed s_min");
  if (n.has("h")) {
    if (n.has("h_t") || n.has("h_s")) fail(n.child("h"), "give either h or h_t and h_s");
    g.h_t = g.h_s = n.positive("h");
  } else if (n.has("h_t") || n.has("h_s")) {
    g.h_t = n.positive("h_t");
    g.h_s = n.positive("h_s");
  } else {
    fail(n.child("h"), "missing required field 'h'");
  }
  return g;
}

SurfaceSpec parse_surface(const Json& j, const std::string& path) {
  const Node n(j, path, {"phi", "alpha", "omega", "builder"});
  SurfaceSpec s;
  s.phi = parse_phi(n, "phi");
  for (const char* key : {"alpha", "omega"}) {
    if (!n.has(key)) fail(n.child(key), std::string("missing required field '") + key + "'");
  }
  s.alpha = parse_curve(n.at("alpha"), n.child("alpha"));
  s.omega = parse_curve(n.at("omega"), n.child("omega"));
  if (!s.alpha.phi) s.alpha.phi = s.phi;
  if (!s.omega.phi) s.omega.phi = s.phi;
  const std::string builder = n.text("builder", "quadrature");
  if (builder != "quadrature" && builder != "explicit") {
    fail(n.child("builder"), "expected 'quadrature' or 'explicit'");
  }
  s.explicit_builder = builder == "explicit";
  return s;
}

VerifySpec parse_verify(const Json& j, const std::string& path) {
  const Node n(j, path,
               {"source", "csv", "tolerance_c", "interior_margin", "e", "shear", "expect_harmonic", "identities"});
  VerifySpec v;
  const std::string source = n.text("source", "preset");
  if (source == "preset") {
    v.source = VerifySource::kPreset;
  } else if (source == "star") {
    v.source = VerifySource::kStar;
  } else if (source == "csv") {
    v.source = VerifySource::kCsv;
    v.csv = n.text("csv");
  } else if (source == "graph") {
    v.source = VerifySource::kGraph;
  } else {
    fail(n.child("source"), "expected one of preset, star, csv, graph");
  }
  v.tolerance_c = n.positive("tolerance_c", v.tolerance_c);
  v.interior_margin = n.count("interior_margin", v.interior_margin);
  if (v.interior_margin < 2) fail(n.child("interior_margin"), "must be at least 2");
  if (n.has("e")) {
    const auto e = real_array(n.at("e"), n.child("e"), 4);
    v.e = C2Point{{e[0], e[1]}, {e[2], e[3]}};
  }
  v.shear = n.real("shear", 0.0);
  v.expect_harmonic = n.flag("expect_harmonic", false);
  if (n.has("identities")) {
    const Json& ids = n.at("identities");
    if (!ids.is_array()) fail(n.child("identities"), "expected an array of strings");
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!ids[k].is_string()) fail(n.child("identities") + "[" + std::to_string(k) + "]", "expected a string");
      v.identities.push_back(ids[k].get<std::string>());
    }
  }
  return v;
}

FlowSpec parse_flow(const Json& j, const std::string& path) {
  const Node n(j, path,
               {"initial", "vertices", "T", "dt", "resample_every", "snapshots", "law", "hausdorff_tolerance",
                "radius_tolerance"});
  FlowSpec f;
  if (!n.has("initial")) fail(n.child("initial"), "missing required field 'initial'");
  f.initial = parse_curve(n.at("initial"), n.child("initial"));
  f.vertices = n.count("vertices", f.vertices);
  if (f.vertices < 8) fail(n.child("vertices"), "must be at least 8");
  f.T = n.real("T");
  if (f.T < 0.0) fail(n.child("T"), "must be >= 0");
  f.dt = n.positive("dt");
  f.resample_every = n.count("resample_every", f.resample_every);
  f.snapshots = n.count("snapshots", f.snapshots);
  if (f.snapshots == 0) fail(n.child("snapshots"), "must be at least 1");
  if (n.has("law")) f.law = parse_law(n.at("law"), n.child("law"));
  if (n.has("hausdorff_tolerance")) f.hausdorff_tolerance = n.positive("hausdorff_tolerance");
  if (n.has("radius_tolerance")) f.radius_tolerance = n.positive("radius_tolerance");
  return f;
}

OutputSpec parse_output(const Json& j, const std::string& path) {
  const Node n(j, path, {"dir", "timestamp", "fields", "obj", "obj_projection"});
  OutputSpec o;
  o.dir = n.text("dir", o.dir);
  o.timestamp = n.flag("timestamp", false);
  o.fields = n.flag("fields", false);
  o.obj = n.flag("obj", true);
  const std::string proj = n.text("obj_projection", "z1");
  const auto p = io::parse_projection(proj);
  if (!p) fail(n.child("obj_projection"), "expected z1, z2 or mixed");
  o.obj_projection = *p;
  return o;
}

SuiteSpec parse_suite(const Json& j, const std::string& path) {
  const Node n(j, path, {"criteria"});
  SuiteSpec s;
  if (n.has("criteria")) {
    const Json& c = n.at("criteria");
    if (!c.is_array()) fail(n.child("criteria"), "expected an array of integers");
    s.criteria.clear();
    for (std::size_t k = 0; k < c.size(); ++k) {
      const std::string p = n.child("criteria") + "[" + std::to_string(k) + "]";
      if (!c[k].is_number_integer()) fail(p, "expected an integer");
      const int id = c[k].get<int>();
      if (id < 1 || id > 7) fail(p, "criteria run by the suite are 1 to 7");
      s.criteria.push_back(id);
    }
  }
  return s;
}

void apply_overrides(Json& doc, const Overrides& o) {
  if (o.mode) {
    const std::string m(to_string(*o.mode));
    if (doc.contains("mode") && doc["mode"].is_string() && doc["mode"].get<std::string>() != m) {
      fail("$.mode", "config mode '" + doc["mode"].get<std::string>() + "' does not match command '" + m + "'");
    }
    doc["mode"] = m;
  }
  if (o.out) doc["output"]["dir"] = *o.out;
  if (o.obj_projection) doc["output"]["obj_projection"] = *o.obj_projection;
  if (o.tolerance_c) doc["verify"]["tolerance_c"] = *o.tolerance_c;
  if (o.h) {
    if (doc.contains("grid") && doc["grid"].is_object()) {
      doc["grid"].erase("h_t");
      doc["grid"].erase("h_s");
      doc["grid"]["h"] = *o.h;
    }
    for (const char* key : {"curve", "trace"}) {
      if (doc.contains(key) && doc[key].is_object()) doc[key]["h"] = *o.h;
    }
    if (doc.contains("surface") && doc["surface"].is_object()) {
      for (const char* key : {"alpha", "omega"}) {
        if (doc["surface"].contains(key) && doc["surface"][key].is_object()) doc["surface"][key]["h"] = *o.h;
      }
    }
  }
}

}  // namespace

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "curve") return Mode::kCurve;
  if (name == "surface") return Mode::kSurface;
  if (name == "verify") return Mode::kVerify;
  if (name == "flow") return Mode::kFlow;
  if (name == "preset") return Mode::kPreset;
  if (name == "suite") return Mode::kSuite;
  return std::nullopt;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kCurve: return "curve";
    case Mode::kSurface: return "surface";
    case Mode::kVerify: return "verify";
    case Mode::kFlow: return "flow";
    case Mode::kPreset: return "preset";
    case Mode::kSuite: return "suite";
  }
  return "suite";
}

RunConfig parse_config(std::string_view text, const Overrides& overrides) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");
  apply_overrides(doc, overrides);

  const Node root(doc, "$", {"mode", "kind", "grid", "curve", "trace", "surface", "verify", "flow", "output", "suite"});
  RunConfig cfg;
  const std::string mode = root.text("mode");
  const auto m = parse_mode(mode);
  if (!m) fail("$.mode", "unknown mode '" + mode + "'");
  cfg.mode = *m;

  if (root.has("kind")) {
    const std::string kind = root.text("kind");
    cfg.kind = forge::parse_surface_kind(kind);
    if (!cfg.kind) fail("$.kind", "unknown surface kind '" + kind + "'");
  }
  if (root.has("grid")) cfg.grid = parse_grid(root.at("grid"), "$.grid");
  if (root.has("curve")) cfg.curve = parse_curve(root.at("curve"), "$.curve");
  if (root.has("trace")) cfg.trace = parse_curve(root.at("trace"), "$.trace");
  if (root.has("surface")) cfg.surface = parse_surface(root.at("surface"), "$.surface");
  if (root.has("verify")) cfg.verify = parse_verify(root.at("verify"), "$.verify");
  if (root.has("flow")) cfg.flow = parse_flow(root.at("flow"), "$.flow");
  if (root.has("output")) cfg.output = parse_output(root.at("output"), "$.output");
  if (root.has("suite")) cfg.suite = parse_suite(root.at("suite"), "$.suite");

  auto require = [&](bool present, const char* key) {
    if (!present) fail(std::string("$.") + key, "missing required field '" + std::string(key) + "' for mode " + mode);
  };
  switch (cfg.mode) {
    case Mode::kCurve: require(cfg.curve.has_value(), "curve"); break;
    case Mode::kSurface: require(cfg.surface.has_value(), "surface"); break;
    case Mode::kPreset:
      require(cfg.kind.has_value(), "kind");
      require(cfg.grid.has_value(), "grid");
      break;
    case Mode::kFlow: require(cfg.flow.has_value(), "flow"); break;
    case Mode::kVerify:
      switch (cfg.verify.source) {
        case VerifySource::kPreset:
          require(cfg.kind.has_value(), "kind");
          require(cfg.grid.has_value(), "grid");
          break;
        case VerifySource::kStar: require(cfg.surface.has_value(), "surface"); break;
        case VerifySource::kGraph: require(cfg.grid.has_value(), "grid"); break;
        case VerifySource::kCsv: break;
      }
      break;
    case Mode::kSuite: break;
  }
  cfg.echo = std::move(doc);
  return cfg;
}

}  // namespace lagsol::cli
