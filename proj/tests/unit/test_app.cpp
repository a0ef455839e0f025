#include <doctest.h>

#include <cmath>
#include <sstream>

#include "castfv/app.hpp"
#include "castfv/error.hpp"
#include "helpers.hpp"

using namespace castfv;
using castfv::testing::read_file;
using castfv::testing::scratch_dir;

namespace {

const char* kSmallRun =
    "[mesh]\nbox_cells = 2 2 2\nbox_size = 1 1 1 cm\n"
    "[initial]\ntemperature = 950 K\n"
    "[time]\ndt = 0.01 s\nend = 0.05 s\n";

std::string campaign_text() {
  return std::string(kSmallRun) +
         "[campaign]\nlevel = 3\noutputs = a b\n"
         "[input.x]\nfield = initial.temperature\nmean = 950 K\nstddev = 10 K\n"
         "[input.y]\nfield = material.C0\nmean = 10 wt%\nstddev = 0.2 wt%\n";
}

SampleEvaluator additive(const CampaignConfig& c) {
  const InputDistribution d = c.distribution();
  return [d](const Eigen::VectorXd& x) {
    const Eigen::VectorXd xi = d.standardize(x);
    return std::vector<double>{xi[0] + 2.0 * xi[1], xi[0] * xi[1]};
  };
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char ch : text) n += ch == '\n';
  return n;
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("quantities carry units") {
  CHECK(parse_quantity("5 K/min", "cooling_rate") == doctest::Approx(5.0 / 60.0));
  CHECK(parse_quantity("20 C", "temperature") == doctest::Approx(293.15));
  CHECK(parse_quantity("3 mm", "length") == doctest::Approx(3e-3));
  CHECK(parse_quantity("0.13", "dimensionless") == 0.13);
  CHECK_THROWS_AS(parse_quantity("5", "temperature"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("5 furlongs", "length"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("abc K", "temperature"), ConfigError);
  CHECK(key_kind("material.density") == "density");
  CHECK(key_kind("boundary.wall.temperature") == "temperature");
}

TEST_CASE("run configuration parsing") {
  const RunConfig c = parse_run_config(parse_config_tree(std::string(kSmallRun) +
                                                         "[boundary.xmin]\ntype = cooling\ntemperature = 900 K\n"
                                                         "rate = 5 K/min\noffset = 0.5 K\n"
                                                         "[probes]\ncentre = 5 5 5 mm\n"));
  CHECK(c.uses_box());
  CHECK(c.box_size.isApprox(Vec3(0.01, 0.01, 0.01)));
  CHECK(c.dt == doctest::Approx(0.01));
  CHECK(c.mat.T_ref == doctest::Approx(950.0));
  REQUIRE(c.boundaries.size() == 1);
  CHECK(c.boundaries[0].value(60.0) == doctest::Approx(895.5));
  REQUIRE(c.probes.size() == 1);
  CHECK(c.probes[0].position.isApprox(Vec3(0.005, 0.005, 0.005)));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_run_config(parse_config_tree("[mesh]\nbox_cells = 2 2 2\nbox_size = 1 1 1 m\n"
                                                     "[time]\ndt = 1 s\nend = 2 s\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(parse_config_tree(std::string(kSmallRun) + "[boundary.xmin]\ntype = hot\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(parse_config_tree("[mesh]\nbox_cells = 2 2 2\nbox_size = 1 1 1 m\n"
                                                     "[initial]\ntemperature = 950 K\n"
                                                     "[time]\ndt = 0 s\nend = 2 s\n")),
                  ConfigError);
  const RunConfig c =
      parse_run_config(parse_config_tree(std::string(kSmallRun) + "[boundary.nowhere]\ntype = insulated\n"));
  CHECK_THROWS_AS(load_run_mesh(c), ConfigError);
}

TEST_CASE("VTK output") {
  const auto dir = scratch_dir();
  const Mesh m = make_box_mesh(1, 1, 1, Vec3::Zero(), Vec3(1, 1, 1));
  const std::string path = (dir / "one.vtk").string();
  write_vtk(m, {{"T", {1.0}}, {"sdas", {kNoValue}}}, path);
  const std::string text = read_file(path);
  CHECK(text.find("CELLS 1 9") != std::string::npos);
  CHECK(text.find("CELL_TYPES 1\n12") != std::string::npos);
  CHECK(text.find("CELL_DATA 1") != std::string::npos);
  CHECK(text.find("SCALARS T double") != std::string::npos);
  CHECK(text.find("SCALARS sdas double") != std::string::npos);
  CHECK(text.find("\n-1\n") != std::string::npos);
  const std::string again = (dir / "again.vtk").string();
  write_vtk(m, {{"T", {1.0}}, {"sdas", {kNoValue}}}, again);
  CHECK(read_file(again) == text);
  CHECK_THROWS(write_vtk(m, {{"T", {1.0, 2.0}}}, path));
}

TEST_CASE("probe files") {
  const auto dir = scratch_dir();
  const std::string one = (dir / "one.csv").string();
  write_probes(one, {"p"}, {0.0, 1.0}, {{900.0}, {899.0}});
  CHECK(count_lines(read_file(one)) == 3);

  std::vector<std::string> names;
  for (int k = 0; k < 25; ++k) names.push_back("tc" + std::to_string(k));
  const std::string many = (dir / "many.csv").string();
  write_probes(many, names, {0.0}, {std::vector<double>(25, 900.0)});
  std::istringstream is(read_file(many));
  std::string header;
  std::getline(is, header);
  CHECK(std::count(header.begin(), header.end(), ',') + 1 == 26);
}

TEST_CASE("probe lookup") {
  const Mesh m = make_box_mesh(3, 3, 3, Vec3::Zero(), Vec3(3, 3, 3));
  const std::vector<int> cells = locate_probes(m, {{"a", m.cell_centroid[13]}, {"b", Vec3(0.1, 0.2, 2.9)}});
  CHECK(cells[0] == 13);
  CHECK((m.cell_centroid[cells[1]] - Vec3(0.5, 0.5, 2.5)).norm() < 1e-12);
  CHECK_THROWS_AS(locate_probes(m, {{"out", Vec3(4, 0, 0)}}), ConfigError);
}

TEST_CASE("insulated run stays constant") {
  RunConfig c = parse_run_config(parse_config_tree(std::string(kSmallRun) + "[physics]\ngravity = off\n"
                                                                            "[probes]\nc = 2 2 2 mm\n"));
  const RunResult r = run_deterministic(c);
  REQUIRE(r.times.size() == 6);
  for (double T : r.max_temperature) CHECK(T == doctest::Approx(950.0).epsilon(1e-12));
  for (const auto& row : r.probe_traces) CHECK(row[0] == doctest::Approx(950.0).epsilon(1e-12));
  CHECK_FALSE(r.fully_solid);
  CHECK(std::isnan(r.solidification_time));
}

TEST_CASE("run stops once everything is solid") {
  const RunConfig c = parse_run_config(parse_config_tree(
      "[mesh]\nbox_cells = 3 1 1\nbox_size = 3 1 1 mm\n"
      "[initial]\ntemperature = 870 K\n"
      "[boundary.xmin]\ntype = fixed\ntemperature = 500 K\n"
      "[boundary.xmax]\ntype = fixed\ntemperature = 500 K\n"
      "[physics]\nconvection = off\n"
      "[time]\ndt = 0.005 s\nend = 100 s\n"));
  const RunResult r = run_deterministic(c);
  CHECK(r.fully_solid);
  CHECK(r.times.back() < 100.0);
  CHECK(r.solidification_time == doctest::Approx(r.times.back()));
  CHECK(r.state.fs.minCoeff() == 1.0);
  CHECK(std::isfinite(output_functional(r, "max_sdas")));
  CHECK(output_functional(r, "solidification_time") == r.solidification_time);
}

TEST_CASE("campaign recovers analytic Sobol indices through the evaluator hook") {
  const CampaignConfig c = parse_campaign_config(parse_config_tree(campaign_text()));
  CampaignOptions opt;
  opt.evaluator = additive(c);
  const CampaignResult r = run_campaign(c, opt);
  REQUIRE(r.sobol.size() == 2);
  CHECK(r.sobol[0].total[0] == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(r.sobol[0].total[1] == doctest::Approx(0.8).epsilon(1e-8));
  CHECK(r.sobol[1].total[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(r.sobol[1].first[0]) < 1e-10);
  CHECK(r.evaluated == r.grid.size());
}

TEST_CASE("campaign rerun reuses cached samples") {
  const auto dir = scratch_dir();
  const CampaignConfig c = parse_campaign_config(parse_config_tree(campaign_text()));
  CampaignOptions opt;
  opt.evaluator = additive(c);
  opt.out_dir = dir.string();
  const CampaignResult first = run_campaign(c, opt);
  const CampaignResult second = run_campaign(c, opt);
  CHECK(first.evaluated == first.grid.size());
  CHECK(second.evaluated == 0);
  CHECK(second.models[0].coeffs == first.models[0].coeffs);
  CHECK(sample_config(c, c.distribution().mean).size() > 0);
}

TEST_CASE("campaign overrides write SI values back into the config") {
  const CampaignConfig c = parse_campaign_config(parse_config_tree(campaign_text()));
  const ConfigTree t = sample_config(c, Eigen::Vector2d(961.0, 10.4));
  const RunConfig rc = parse_run_config(t);
  CHECK(rc.initial_temperature == doctest::Approx(961.0));
  CHECK(rc.mat.C0 == doctest::Approx(10.4));
}

}  // TEST_SUITE
