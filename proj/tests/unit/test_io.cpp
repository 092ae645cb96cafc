#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "json.hpp"

#include "spherosim/error.hpp"
#include "spherosim/io.hpp"

namespace spherosim {
namespace {

TEST(Io, FieldRoundTripIsExact) {
  const auto mesh = TriMesh::icosphere(3);
  std::mt19937_64 rng(1);
  const Field m = Field::from_function(mesh, random_smooth_function(rng));
  std::stringstream buf;
  write_field(m, buf);
  const Field back = read_field(buf);
  ASSERT_EQ(back.size(), m.size());
  EXPECT_EQ(back.mesh().level(), 3);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(back[i], m[i]);
}

TEST(Io, MalformedFieldFilesThrow) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_field(in);
  };
  EXPECT_THROW(read("nonsense"), Error);
  EXPECT_THROW(read("spherosim-field v1 12 1\n"), Error);
  EXPECT_THROW(read("spherosim-field v1 12 0\n0 0 1 0 0 1\n"), Error);
  std::ostringstream shifted;
  shifted << "spherosim-field v1 12 0\n";
  for (int i = 0; i < 12; ++i) shifted << "1 0 0 0 0 1\n";
  EXPECT_THROW(read(shifted.str()), Error);
  EXPECT_THROW(load_field("/nonexistent/field.txt"), Error);
}

TEST(Io, TraceCsvCarriesSchemaAndColumns) {
  std::vector<TracePoint> trace(2);
  trace[1].t = 0.5;
  std::ostringstream out;
  write_trace_csv(trace, out);
  std::istringstream in(out.str());
  std::string schema, header, row;
  std::getline(in, schema);
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(schema, "# schema_version=1");
  EXPECT_EQ(header, "t,E_exchange,E_anis,E_total,Q,S1,S2,S3,L1,L2,L3,J1,J2,J3");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 13);
}

TEST(Io, ReportsAreVersionedJson) {
  MinimizeReport rep;
  rep.converged = true;
  rep.constrained = true;
  rep.J_target = Vec3(0, 0, -1);
  rep.trace.push_back(OuterRecord{});
  const auto j = nlohmann::json::parse(minimize_report_json(rep, 50.0, 4));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["J_target"][2], -1.0);
  EXPECT_EQ(j["trace"].size(), 1u);
  EXPECT_TRUE(j.contains("equivariance_defect"));

  const auto s = nlohmann::json::parse(suite_report_json({make_check("a", 0.1, 1.0), make_check("b", 2.0, 1.0)}, {}));
  EXPECT_EQ(s["schema_version"], 1);
  EXPECT_FALSE(s["all_passed"].get<bool>());
  EXPECT_EQ(s["checks"].size(), 2u);
}

TEST(Io, VtkHasPointsAndData) {
  const auto mesh = TriMesh::icosphere(1);
  std::ostringstream out;
  write_vtk(hedgehog(1, mesh), out);
  const std::string s = out.str();
  EXPECT_NE(s.find("POINTS 42 double"), std::string::npos);
  EXPECT_NE(s.find("POLYGONS 80 320"), std::string::npos);
  EXPECT_NE(s.find("VECTORS m double"), std::string::npos);
  EXPECT_NE(s.find("SCALARS m_dot_nu double 1"), std::string::npos);
}

TEST(Io, DiagnosticsRowIsDeterministic) {
  const auto mesh = TriMesh::icosphere(3);
  std::mt19937_64 a(9), b(9);
  const Field ma = Field::from_function(mesh, random_smooth_function(a));
  const Field mb = Field::from_function(mesh, random_smooth_function(b));
  EXPECT_EQ(diagnostics_csv_row(diagnose(ma, EnergyParams{2.0})), diagnostics_csv_row(diagnose(mb, EnergyParams{2.0})));
}

}  // namespace
}  // namespace spherosim
