#include "spherosim/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "spherosim/error.hpp"

namespace spherosim {
namespace {

using nlohmann::json;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::ostringstream precise() {
  std::ostringstream s;
  s << std::setprecision(17);
  return s;
}

}  // namespace

void write_field(const Field& m, std::ostream& out) {
  const auto& mesh = m.mesh();
  out << "spherosim-field v1 " << m.size() << ' ' << mesh.level() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Vec3& y = mesh.vertex(i);
    out << y.x() << ' ' << y.y() << ' ' << y.z() << ' ' << m[i].x() << ' ' << m[i].y() << ' ' << m[i].z() << '\n';
  }
}

Field read_field(std::istream& in) {
  std::string magic, version;
  std::size_t count = 0;
  int level = -1;
  if (!(in >> magic >> version >> count >> level) || magic != "spherosim-field" || version != "v1") {
    throw Error(ErrorCode::Io, "missing 'spherosim-field v1 <V> <level>' header");
  }
  const auto mesh = TriMesh::icosphere(level);
  if (count != mesh->vertex_count()) {
    throw Error(ErrorCode::Io, "vertex count does not match the icosphere of level " + std::to_string(level));
  }
  VertexVectors values(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 y;
    if (!(in >> y.x() >> y.y() >> y.z() >> values[i].x() >> values[i].y() >> values[i].z())) {
      throw Error(ErrorCode::Io, "truncated field file at vertex " + std::to_string(i));
    }
    if ((y - mesh->vertex(i)).norm() > 1e-9) {
      throw Error(ErrorCode::Io, "vertex " + std::to_string(i) + " does not match the mesh");
    }
  }
  return Field(mesh, std::move(values));
}

void save_field(const Field& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  write_field(m, out);
}

Field load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_field(in);
}

std::string diagnostics_csv_header() {
  return "E_exchange,E_anis,E_total,Q,S1,S2,S3,L1,L2,L3,J1,J2,J3";
}

std::string diagnostics_csv_row(const Diagnostics& d) {
  auto s = precise();
  s << d.exchange << ',' << d.anisotropy << ',' << d.total << ',' << d.Q;
  for (const Vec3* v : {&d.S, &d.L, &d.J}) s << ',' << v->x() << ',' << v->y() << ',' << v->z();
  return s.str();
}

void write_trace_csv(const std::vector<TracePoint>& trace, std::ostream& out) {
  out << "# schema_version=" << kSchemaVersion << '\n' << "t," << diagnostics_csv_header() << '\n';
  for (const auto& p : trace) {
    auto s = precise();
    s << p.t;
    out << s.str() << ',' << diagnostics_csv_row(p.d) << '\n';
  }
}

std::string minimize_report_json(const MinimizeReport& rep, double kappa, int level) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kappa"] = kappa;
  j["level"] = level;
  j["converged"] = rep.converged;
  j["constrained"] = rep.constrained;
  j["E_final"] = rep.E_final;
  j["J_final"] = vec(rep.J_final);
  if (rep.constrained) j["J_target"] = vec(rep.J_target);
  j["Q_final"] = rep.Q_final;
  j["multiplier"] = vec(rep.multiplier);
  j["kkt_residual"] = rep.kkt_residual;
  j["equivariance_defect"] = rep.equivariance_defect;
  j["equivariance_axis"] = vec(rep.equivariance_axis);
  j["outer_iterations"] = rep.outer_iterations;
  j["inner_iterations"] = rep.inner_iterations;
  j["step_retries"] = rep.step_retries;
  json trace = json::array();
  for (const auto& r : rep.trace) {
    trace.push_back({{"outer", r.outer},
                     {"inner_iterations", r.inner_iterations},
                     {"mu", r.mu},
                     {"lagrangian", r.lagrangian},
                     {"energy", r.energy},
                     {"constraint_residual", r.constraint_residual},
                     {"gradient_norm", r.gradient_norm},
                     {"multiplier", vec(r.multiplier)}});
  }
  j["trace"] = trace;
  return j.dump(2);
}

std::string suite_report_json(const std::vector<CheckResult>& results, const SuiteOptions& opts) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["level"] = opts.level;
  j["kappa"] = opts.kappa;
  j["seed"] = opts.seed;
  bool all = true;
  json checks = json::array();
  for (const auto& c : results) {
    all = all && c.passed;
    checks.push_back({{"name", c.name},
                      {"measured_error", c.measured_error},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed},
                      {"details", c.details}});
  }
  j["all_passed"] = all;
  j["checks"] = checks;
  return j.dump(2);
}

void write_vtk(const Field& m, std::ostream& out) {
  const auto& mesh = m.mesh();
  out << "# vtk DataFile Version 3.0\nspherosim field\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << m.size() << " double\n" << std::setprecision(12);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Vec3& y = mesh.vertex(i);
    out << y.x() << ' ' << y.y() << ' ' << y.z() << '\n';
  }
  const auto tris = mesh.triangles();
  out << "POLYGONS " << tris.size() << ' ' << 4 * tris.size() << '\n';
  for (const auto& t : tris) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "POINT_DATA " << m.size() << "\nVECTORS m double\n";
  for (std::size_t i = 0; i < m.size(); ++i) out << m[i].x() << ' ' << m[i].y() << ' ' << m[i].z() << '\n';
  out << "SCALARS m_dot_nu double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < m.size(); ++i) out << m[i].dot(mesh.vertex(i)) << '\n';
}

}  // namespace spherosim
