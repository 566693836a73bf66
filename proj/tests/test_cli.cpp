#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgbary/cli.hpp"
#include "mgbary/json_io.hpp"

namespace fs = std::filesystem;
using mgbary::io::Json;

namespace {

const fs::path kData = MGBARY_TEST_DATA;

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = mgbary::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string data(const char* name) { return (kData / name).string(); }

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mgbary_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

std::string error_code(const Outcome& o) { return Json::parse(o.err).at("error").get<std::string>(); }

}  // namespace

TEST(Cli, DistExample) {
  const Outcome o = run({"dist", "--graph", data("triangle.json"), "--from", "v:A", "--to", "e_BC:0.5"});
  EXPECT_EQ(o.status, 0);
  EXPECT_EQ(o.out, "1.5\n");
  EXPECT_TRUE(o.err.empty());
}

TEST(Cli, TripodHalvesBarycenter) {
  const Outcome o = run({"bary", "--problem", data("tripod_fig1.json"), "--grid", "0.015625"});
  ASSERT_EQ(o.status, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_GE(j.at("vertex_mass").at("o").get<double>(), 0.99);
  EXPECT_NEAR(j.at("objective").get<double>(), 7.0 / 12.0, 0.02 * 7.0 / 12.0);
}

TEST(Cli, FixedPointMethod) {
  const Outcome o = run({"bary", "--problem", data("tripod_fig1.json"), "--method", "fixed-point", "--edge", "e2",
                         "--reverse", "--start-at-tail"});
  ASSERT_EQ(o.status, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_EQ(j.at("vertex_mass").at("o").get<double>(), 1.0);
}

TEST(Cli, ValidateRejectsSelfLoop) {
  const Outcome o = run({"validate", "--graph", data("bad_selfloop.json")});
  EXPECT_EQ(o.status, 1);
  EXPECT_TRUE(o.out.empty());
  const Json e = Json::parse(o.err);
  EXPECT_EQ(e.at("error"), "invalid-graph");
  EXPECT_TRUE(e.at("detail").is_string());
}

TEST(Cli, ValidateAcceptsTriangle) {
  const Outcome o = run({"validate", "--graph", data("triangle.json")});
  ASSERT_EQ(o.status, 0);
  const Json j = Json::parse(o.out);
  EXPECT_TRUE(j.at("valid").get<bool>());
  EXPECT_EQ(j.at("vertices"), 3);
  EXPECT_EQ(j.at("edges"), 3);
  EXPECT_TRUE(j.at("all_edges_minimizing").get<bool>());
}

TEST_F(CliFiles, DistinctErrorCodes) {
  EXPECT_EQ(error_code(run({"validate", "--graph", path("missing.json")})), "file-not-found");
  EXPECT_EQ(error_code(run({"validate", "--graph", write("broken.json", "{\"vertices\": [")})), "parse-error");

  const std::string bad_mass = write("m.json", R"({"atoms": [{"point": "v:A", "mass": 0.5}]})");
  EXPECT_EQ(error_code(run({"w2", "--graph", data("triangle.json"), "--from", bad_mass, "--to", bad_mass})),
            "invalid-measure");

  const std::string par =
      write("par.json", R"({"vertices": ["A", "B"], "edges": [{"id": "s", "u": "A", "v": "B", "length": 1},
                                                            {"id": "l", "u": "A", "v": "B", "length": 3}]})");
  const std::string prob = write("p.json", R"({"graph": "par.json", "grid": 0.5,
      "measures": [{"weight": 1, "measure": {"atoms": [{"point": "v:A", "mass": 1}]}}]})");
  EXPECT_EQ(error_code(run({"bary", "--problem", prob, "--method", "fixed-point", "--edge", "l"})),
            "non-minimizing-edge");

  ::setenv("MGBARY_SUPPORT_CAP", "10", 1);
  const Outcome capped = run({"bary", "--problem", data("tripod_fig1.json")});
  ::unsetenv("MGBARY_SUPPORT_CAP");
  EXPECT_EQ(capped.status, 1);
  EXPECT_EQ(error_code(capped), "support-cap-exceeded");

  EXPECT_EQ(error_code(run({"dist", "--graph", data("triangle.json")})), "invalid-argument");
  EXPECT_EQ(error_code(run({})), "invalid-argument");
}

TEST_F(CliFiles, BarycenterRoundTrips) {
  const Outcome o = run({"bary", "--problem", data("tripod_fig1.json"), "--grid", "0.125"});
  ASSERT_EQ(o.status, 0) << o.err;
  const Json emitted = Json::parse(o.out).at("barycenter");
  const auto g = mgbary::io::parse_graph(mgbary::io::read_json_file(kData / "tripod.json"));
  const Json again = mgbary::io::to_json(g, mgbary::io::parse_graph_measure(g, emitted));
  EXPECT_EQ(mgbary::io::dump(again), mgbary::io::dump(emitted));
}

TEST_F(CliFiles, PhiOutputRoundTrips) {
  const std::string base = write("base.json", R"({"atoms": [{"point": "e_AB:0.25", "mass": 1}]})");
  const std::string nu =
      write("nu.json", R"({"atoms": [{"point": "v:C", "mass": 0.5}], "pieces": [{"edge": "e_BC", "a": 0, "b": 0.5, "density": 1}]})");
  const Outcome o = run({"phi", "--graph", data("triangle.json"), "--edge", "e_AB", "--base", base, "--measure", nu,
                         "--grid", "0.125"});
  ASSERT_EQ(o.status, 0) << o.err;
  const Json emitted = Json::parse(o.out);
  EXPECT_EQ(mgbary::io::dump(mgbary::io::to_json(mgbary::io::parse_line_measure(emitted))), mgbary::io::dump(emitted));
  double mass = 0.0;
  for (const auto& a : emitted.at("atoms")) mass += a.at("mass").get<double>();
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST_F(CliFiles, W2ReportsPlan) {
  const std::string a = write("a.json", R"({"atoms": [{"point": "v:A", "mass": 1}]})");
  const std::string b = write("b.json", R"({"atoms": [{"point": "e_BC:0.5", "mass": 1}]})");
  const Outcome o = run({"w2", "--graph", data("triangle.json"), "--from", a, "--to", b});
  ASSERT_EQ(o.status, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_DOUBLE_EQ(j.at("w2").get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(j.at("cost").get<double>(), 2.25);
  ASSERT_EQ(j.at("plan").size(), 1u);
}

TEST_F(CliFiles, OutputFileAndCsv) {
  const std::string out = path("bary.json"), csv = path("cells.csv");
  const Outcome o = run({"bary", "--problem", data("tripod_fig1.json"), "--grid", "0.125", "--output", out, "--csv", csv});
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_TRUE(o.out.empty());
  const Json j = Json::parse(slurp(out));
  EXPECT_EQ(j.at("method"), "lp");
  const std::string cells = slurp(csv);
  EXPECT_EQ(cells.rfind("kind,id,offset,mass\n", 0), 0u);
  EXPECT_NE(cells.find("vertex,o,"), std::string::npos);

  const Outcome r = run({"report", "--problem", data("tripod_fig1.json"), "--grid", "0.125", "--barycenter", out});
  ASSERT_EQ(r.status, 0) << r.err;
  const Json rep = Json::parse(r.out);
  EXPECT_EQ(rep.at("verdict"), "PASS");
  EXPECT_EQ(rep.at("vertex_atoms").size(), 1u);
}

TEST_F(CliFiles, ReportHonoursAtomTolerance) {
  const Outcome r = run({"report", "--problem", data("tripod_fig1.json"), "--grid", "0.125", "--atom-tol", "1e-6"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out).at("atom_tol").get<double>(), 1e-6);
}

TEST(Cli, DeterministicBytes) {
  const std::vector<std::vector<std::string>> cmds = {
      {"bary", "--problem", data("tripod_fig1.json"), "--grid", "0.0625"},
      {"bary", "--problem", data("tripod_fig1.json"), "--grid", "0.0625", "--threads", "3"},
      {"report", "--problem", data("tripod_fig1.json"), "--grid", "0.0625"},
      {"bary", "--problem", data("tripod_fig1.json"), "--method", "fixed-point", "--edge", "e1"},
  };
  for (const auto& c : cmds) {
    const Outcome a = run(c), b = run(c);
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
  }
  EXPECT_EQ(run(cmds[0]).out, run(cmds[1]).out);
}

TEST(Cli, HelpExitsCleanly) {
  const Outcome o = run({"--help"});
  EXPECT_EQ(o.status, 0);
  EXPECT_NE((o.out + o.err).find("bary"), std::string::npos);
}
