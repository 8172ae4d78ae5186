#include <doctest.h>

#include "bdm/io.hpp"
#include "helpers.hpp"

using namespace bdm;

namespace {

ErrorCode code_of(const nlohmann::json& j) {
  try {
    mesh_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a schema error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("mesh files round-trip byte for byte") {
  for (CaseId id : {CaseId::SquareMixed, CaseId::Annulus, CaseId::PlateHole3, CaseId::Fig4}) {
    BenchmarkCase c;
    c.id = id;
    c.matched = id != CaseId::SquareMixed;
    MeshFile f;
    f.model = case_model(c, 0);
    const std::string a = write_mesh(f);
    const MeshFile g = read_mesh(a);
    CHECK(write_mesh(g) == a);
    CHECK(g.model.patches.size() == f.model.patches.size());
    CHECK(g.model.patches[0].points()[3] == f.model.patches[0].points()[3]);
  }
}

TEST_CASE("weak payload round-trips and keeps the element operators") {
  MeshFile f;
  f.model = gen_fig4();
  f.dual_level = 1;
  f.weak = build_weak_mesh(f.model, 1).mesh;
  const std::string a = write_mesh(f);
  const MeshFile g = read_mesh(a);
  REQUIRE(g.weak.has_value());
  CHECK(write_mesh(g) == a);
  CHECK(g.weak->elements.size() == f.weak->elements.size());
  CHECK(test::max_abs(g.weak->elements[5].op - f.weak->elements[5].op) == 0.0);
}

TEST_CASE("schema validation reports specific errors") {
  MeshFile f;
  f.model = gen_fig4();
  const nlohmann::json good = mesh_to_json(f);
  auto j = good;
  j["patches"][0]["knots"][0] = {0, 0.5, 0.5, 1, 1, 1};
  CHECK(code_of(j) == ErrorCode::InvalidKnotVector);
  j = good;
  j["patches"][1]["weights"][2] = -1.0;
  CHECK(code_of(j) == ErrorCode::InvalidWeights);
  j = good;
  j["patches"][1]["control_points"].erase(0);
  CHECK(code_of(j) == ErrorCode::InvalidControlNet);
  j = good;
  j["format"] = "other";
  CHECK(code_of(j) == ErrorCode::Io);
  CHECK_THROWS_AS(read_mesh("{not json"), Error);
}

TEST_CASE("convergence csv layout") {
  ConvergenceReport r;
  r.spec.id = CaseId::SquareMixed;
  r.rows = {{0, 0.5, 36, 0.1, std::nullopt, "ok"}, {1, 0.25, 92, 0.0125, 3.0, "ok"}};
  const std::string csv = report_csv(r);
  CHECK(csv.substr(0, csv.find('\n')) == "case,p,ratio,matched,n,level,h,dofs,l2_error,rate");
  CHECK(csv.find("square-mixed,2,2:3,true,1,0,0.5,36,0.10000000000000001,\n") != std::string::npos);
  r.rows[1].status = "SingularMatrix";
  r.failed = true;
  const std::string bad = report_csv(r);
  CHECK(bad.substr(0, bad.find('\n')) == "case,p,ratio,matched,n,level,h,dofs,l2_error,rate,status");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("convergence output is deterministic for a fixed seed") {
  BenchmarkCase c;
  c.matched = false;
  c.levels = {0, 1};
  const std::string a = report_csv(run_convergence(c));
  const std::string b = report_csv(run_convergence(c));
  CHECK(a == b);
  c.seed = 7;
  CHECK(report_csv(run_convergence(c)) != a);
}
