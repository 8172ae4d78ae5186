#include "bdm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bdm {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::Io, "mesh file: " + what); }

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema_error(std::string("missing '") + key + "'");
  return j.at(key);
}

double num(const json& j) {
  if (!j.is_number()) schema_error("expected a number");
  return j.get<double>();
}

int integer(const json& j) {
  if (!j.is_number_integer()) schema_error("expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j) {
  if (!j.is_array()) schema_error("expected an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(num(x));
  return out;
}

Matrix matrix_from(const json& j, int cols = -1) {
  if (!j.is_array()) schema_error("expected a matrix");
  const int rows = static_cast<int>(j.size());
  if (rows > 0 && cols < 0) cols = j[0].is_array() ? static_cast<int>(j[0].size()) : 0;
  Matrix m(rows, std::max(cols, 0));
  for (int i = 0; i < rows; ++i) {
    const auto r = numbers(j[i]);
    if (static_cast<int>(r.size()) != cols) schema_error("ragged matrix");
    for (int k = 0; k < cols; ++k) m(i, k) = r[k];
  }
  return m;
}

json box_json(const Box& b) { return {{"lo", {b.lo[0], b.lo[1]}}, {"hi", {b.hi[0], b.hi[1]}}}; }

Box box_from(const json& j) {
  const auto lo = numbers(need(j, "lo")), hi = numbers(need(j, "hi"));
  if (lo.size() != 2 || hi.size() != 2) schema_error("box needs two coordinates");
  Box b;
  b.lo = {lo[0], lo[1]};
  b.hi = {hi[0], hi[1]};
  return b;
}

}  // namespace

json mesh_to_json(const MeshFile& file) {
  json j;
  j["format"] = "bdm-mesh";
  j["version"] = 1;
  json patches = json::array();
  for (const auto& p : file.model.patches) {
    json jp;
    jp["degrees"] = {p.degree(0), p.degree(1)};
    jp["knots"] = {p.knots(0).values(), p.knots(1).values()};
    json pts = json::array();
    for (const auto& x : p.points()) pts.push_back({x[0], x[1]});
    jp["control_points"] = std::move(pts);
    jp["weights"] = p.weights();
    patches.push_back(std::move(jp));
  }
  j["patches"] = std::move(patches);
  json ifaces = json::array();
  for (const auto& i : file.model.interfaces) {
    json ji;
    ji["master"] = {{"patch", i.master_patch}, {"side", to_string(i.master_side)}};
    ji["slave"] = {{"patch", i.slave_patch}, {"side", to_string(i.slave_side)}};
    if (i.reversed) ji["reversed"] = *i.reversed;
    ifaces.push_back(std::move(ji));
  }
  j["interfaces"] = std::move(ifaces);
  if (file.dual_level) j["dual_level"] = *file.dual_level;
  if (!file.info.empty()) j["info"] = file.info;
  if (file.weak) {
    json els = json::array();
    for (const auto& el : file.weak->elements) {
      json je;
      je["patch"] = el.patch;
      je["index"] = {el.index[0], el.index[1]};
      je["degree"] = {el.degree[0], el.degree[1]};
      je["parent"] = box_json(el.parent);
      je["cell"] = box_json(el.cell);
      je["dofs"] = el.dofs;
      je["operator"] = matrix_json(el.op);
      je["bezier"] = matrix_json(el.bezier);
      els.push_back(std::move(je));
    }
    j["weak"] = {{"num_dofs", file.weak->num_dofs}, {"elements", std::move(els)}};
  }
  return j;
}

MeshFile mesh_from_json(const json& j) {
  if (!j.is_object()) schema_error("document is not an object");
  if (need(j, "format") != "bdm-mesh") schema_error("unknown format");
  if (integer(need(j, "version")) != 1) schema_error("unsupported version");
  MeshFile f;
  const auto& patches = need(j, "patches");
  if (!patches.is_array() || patches.empty()) schema_error("patches must be a nonempty array");
  for (const auto& jp : patches) {
    const auto& deg = need(jp, "degrees");
    const auto& knots = need(jp, "knots");
    if (!deg.is_array() || deg.size() != 2 || !knots.is_array() || knots.size() != 2)
      schema_error("patch needs two degrees and two knot vectors");
    KnotVector ku(numbers(knots[0]), integer(deg[0]));
    KnotVector kv(numbers(knots[1]), integer(deg[1]));
    const auto& jpts = need(jp, "control_points");
    if (!jpts.is_array()) schema_error("control_points must be an array");
    std::vector<Vec2> pts;
    for (const auto& x : jpts) {
      const auto c = numbers(x);
      if (c.size() != 2) throw Error(ErrorCode::InvalidControlNet, "control points need two coordinates");
      pts.emplace_back(c[0], c[1]);
    }
    std::vector<double> w = jp.contains("weights") ? numbers(jp.at("weights")) : std::vector<double>{};
    f.model.patches.emplace_back(std::move(ku), std::move(kv), std::move(pts), std::move(w));
  }
  const int np = static_cast<int>(f.model.patches.size());
  if (j.contains("interfaces")) {
    const auto& ifaces = j.at("interfaces");
    if (!ifaces.is_array()) schema_error("interfaces must be an array");
    for (const auto& ji : ifaces) {
      InterfaceSpec s;
      const auto& m = need(ji, "master");
      const auto& sl = need(ji, "slave");
      s.master_patch = integer(need(m, "patch"));
      s.slave_patch = integer(need(sl, "patch"));
      if (!need(m, "side").is_string() || !need(sl, "side").is_string()) schema_error("side must be a string");
      try {
        s.master_side = side_from_string(m.at("side").get<std::string>());
        s.slave_side = side_from_string(sl.at("side").get<std::string>());
      } catch (const Error& e) {
        schema_error(e.what());
      }
      if (s.master_patch < 0 || s.master_patch >= np || s.slave_patch < 0 || s.slave_patch >= np ||
          s.master_patch == s.slave_patch)
        schema_error("interface references invalid patches");
      if (ji.contains("reversed")) {
        if (!ji.at("reversed").is_boolean()) schema_error("reversed must be a boolean");
        s.reversed = ji.at("reversed").get<bool>();
      }
      f.model.interfaces.push_back(s);
    }
  }
  if (j.contains("dual_level")) f.dual_level = integer(j.at("dual_level"));
  if (j.contains("info")) f.info = j.at("info");
  if (j.contains("weak")) {
    const auto& jw = j.at("weak");
    Mesh mesh;
    mesh.patches = f.model.patches;
    mesh.num_dofs = integer(need(jw, "num_dofs"));
    for (const auto& je : need(jw, "elements")) {
      Element el;
      el.patch = integer(need(je, "patch"));
      if (el.patch < 0 || el.patch >= np) schema_error("element on unknown patch");
      const auto& idx = need(je, "index");
      const auto& deg = need(je, "degree");
      if (idx.size() != 2 || deg.size() != 2) schema_error("element index and degree need two entries");
      el.index = {integer(idx[0]), integer(idx[1])};
      el.degree = {integer(deg[0]), integer(deg[1])};
      el.parent = box_from(need(je, "parent"));
      el.cell = box_from(need(je, "cell"));
      for (const auto& d : need(je, "dofs")) {
        const int v = integer(d);
        if (v < 0 || v >= mesh.num_dofs) schema_error("element DOF out of range");
        el.dofs.push_back(v);
      }
      const int nb = (el.degree[0] + 1) * (el.degree[1] + 1);
      el.op = matrix_from(need(je, "operator"), nb);
      el.bezier = matrix_from(need(je, "bezier"), 3);
      if (el.op.rows() != static_cast<int>(el.dofs.size()) || el.bezier.rows() != nb)
        throw Error(ErrorCode::DimensionMismatch, "element operator does not match its DOFs");
      mesh.elements.push_back(std::move(el));
    }
    f.weak = std::move(mesh);
  }
  return f;
}

std::string write_mesh(const MeshFile& file) { return mesh_to_json(file).dump(2) + "\n"; }

MeshFile read_mesh(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("mesh file is not valid JSON: ") + e.what());
  }
  return mesh_from_json(j);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string report_csv(const std::vector<ConvergenceReport>& reports) {
  bool status = false;
  for (const auto& r : reports)
    for (const auto& row : r.rows) status = status || row.status != "ok";
  std::ostringstream out;
  out << "case,p,ratio,matched,n,level,h,dofs,l2_error,rate" << (status ? ",status" : "") << "\n";
  for (const auto& r : reports)
    for (const auto& row : r.rows) {
      out << to_string(r.spec.id) << ',' << r.spec.p << ',' << r.spec.ratio.str() << ','
          << (r.spec.matched ? "true" : "false") << ',' << r.spec.n << ',' << row.level << ','
          << format_double(row.h) << ',' << row.dofs << ',';
      if (row.status == "ok") out << format_double(row.l2_error);
      out << ',';
      if (row.rate) out << format_double(*row.rate);
      if (status) out << ',' << row.status;
      out << "\n";
    }
  return out.str();
}

std::string report_csv(const ConvergenceReport& report) { return report_csv(std::vector{report}); }

}  // namespace bdm
