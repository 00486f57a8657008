#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "planar_ot/cli.hpp"
#include "support.hpp"

using namespace planar_ot;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, bool faults = false) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err, {.allow_fault_injection = faults});
  return {code, out.str(), err.str()};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("planar_ot_cli_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("solve from files") {
  TempDir dir;
  const auto a = dir.write("a.pts", "0 0 1\n");
  const auto b = dir.write("b.pts", "3 4 1\n");

  const auto eu = run({"solve", "--metric", "euclid", "--source", a, "--sink", b});
  REQUIRE(eu.code == 0);
  const auto j = nlohmann::json::parse(eu.out);
  CHECK(j["value"].get<double>() == 5);
  CHECK(j["exact"] == false);
  CHECK(j["certificate"]["complementary_slackness"] == true);

  const auto l1 = run({"solve", "--metric", "l1", "--source", a, "--sink", b, "--theta", "unit"});
  REQUIRE(l1.code == 0);
  CHECK(nlohmann::json::parse(l1.out)["value"] == "7");

  const auto same = run({"solve", "--metric", "l1", "--source", a, "--sink", a, "--format", "text"});
  CHECK(same.code == 0);
  CHECK(same.out.rfind("value: 0", 0) == 0);

  const auto plan_path = (dir.path / "plan.txt").string();
  const auto p = dir.write("p.pts", "0 0 2\n1 0 1\n");
  const auto q = dir.write("q.pts", "0 1 1\n2 0 2\n");
  const auto planned = run({"solve", "--metric", "sqeuclid", "--source", p, "--sink", q, "--plan-out", plan_path});
  CHECK(planned.code == 0);
  std::ifstream in(plan_path);
  std::stringstream plan;
  plan << in.rdbuf();
  CHECK(plan.str() == "0 0 1\n0 1 1\n1 1 1\n");
}

TEST_CASE("solve exit codes") {
  TempDir dir;
  const auto a = dir.write("a.pts", "0 0 1\n");
  const auto c = dir.write("c.pts", "3 4 2\n");
  const auto bad = dir.write("bad.pts", "0 0 -1\n");
  const auto half = dir.write("h.pts", "0.5 0 1\n");

  const auto unbalanced = run({"solve", "--metric", "l1", "--source", a, "--sink", c});
  CHECK(unbalanced.code == 2);
  CHECK(unbalanced.err.find("unbalanced") != std::string::npos);

  const auto parse = run({"solve", "--metric", "l1", "--source", a, "--sink", bad});
  CHECK(parse.code == 3);
  CHECK(parse.err.find("nonpositive mass at line 1") != std::string::npos);

  CHECK(run({"solve", "--metric", "l1", "--source", a, "--sink", dir.path.string() + "/missing.pts"}).code == 3);
  CHECK(run({"solve", "--metric", "cosine", "--source", a, "--sink", a}).code == 3);
  CHECK(run({"solve", "--metric", "l1", "--source", a}).code == 3);
  CHECK(run({"solve", "--metric", "l1", "--source", a, "--sink", a, "--theta", "fast"}).code == 3);
  CHECK(run({"frobnicate"}).code == 3);
  CHECK(run({}).code == 3);
  CHECK(run({"solve", "--metric", "euclid", "--source", a, "--sink", a, "--theta", "unit"}).code == 2);
  CHECK(run({"solve", "--metric", "l1", "--source", half, "--sink", a}).code == 0);

  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("solve") != std::string::npos);
}

TEST_CASE("compare") {
  TempDir dir;
  std::mt19937_64 rng(9);
  for (const Metric m : planar_ot::testing::kMetrics) {
    InstanceGenSpec spec;
    spec.seed = rng();
    spec.metric = m;
    spec.n_sources = 30;
    spec.n_sinks = 30;
    const auto inst = random_instance(spec);
    const auto p = dir.write("p.pts", serialize_points(inst.source));
    const auto q = dir.write("q.pts", serialize_points(inst.sink));
    const std::string metric(to_string(m));

    const auto ok = run({"compare", "--metric", metric, "--source", p, "--sink", q});
    REQUIRE(ok.code == 0);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["equal"] == true);
    const double ratio = j["savings_ratio"].get<double>();
    CHECK(ratio > 0);
    CHECK(ratio <= 1);

    const auto broken = run({"compare", "--metric", metric, "--source", p, "--sink", q, "--inject-bad-prune"}, true);
    CHECK(broken.code == 1);
    CHECK(nlohmann::json::parse(broken.out)["equal"] == false);
  }
  const auto p = dir.write("one.pts", "0 0 1\n");
  CHECK(run({"compare", "--metric", "l1", "--source", p, "--sink", p, "--inject-bad-prune"}).code == 3);
}

TEST_CASE("bench") {
  const auto csv = run({"bench", "--grid", "4,8", "--metric", "sqeuclid", "--seed", "3"});
  REQUIRE(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 3);

  const auto a = run({"bench", "--grid", "4,8", "--seed", "3", "--format", "json"});
  const auto b = run({"bench", "--grid", "4,8", "--seed", "3", "--format", "json"});
  REQUIRE(a.code == 0);
  const auto ja = nlohmann::json::parse(a.out);
  const auto jb = nlohmann::json::parse(b.out);
  REQUIRE(ja.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(ja[k]["candidates_examined"] == jb[k]["candidates_examined"]);
    CHECK(ja[k]["dual_updates"] == jb[k]["dual_updates"]);
    CHECK(ja[k]["candidates_examined"].get<double>() <= ja[k]["full_scan"].get<double>());
  }
  CHECK(run({"bench", "--grid", "4,x"}).code == 3);
}

TEST_CASE("oracle command") {
  for (const char* m : {"l1", "sqeuclid", "euclid"}) {
    const auto r = run({"oracle", "--random", "100", "--max-points", "4", "--metric", m, "--seed", "5"});
    CHECK(r.code == 0);
  }
}

TEST_CASE("report JSON round trip") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 30; ++k) {
    const Metric metric = planar_ot::testing::kMetrics[k % 3];
    const auto inst = planar_ot::testing::random_small(rng, metric, 15);
    SolveOptions o;
    o.pruning = k % 2 == 0;
    const auto r = solve(inst, o);
    const auto cert = verify_optimality(inst, r.plan, r.duals, r.tolerance);
    const auto report = make_report(inst, o, r, cert, 1.25 * k);
    const auto text = serialize_report(report);
    CHECK(parse_report(text) == report);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["value"].is_string() == r.exact);
    for (const char* key : {"value", "metric", "exact", "pruning", "theta_mode", "tolerance", "sources", "sinks",
                            "stats", "certificate", "wall_time_ms"}) {
      CHECK(j.contains(key));
    }
  }
  CHECK_THROWS_AS(parse_report("{}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_report("not json"), std::invalid_argument);
}

TEST_CASE("instance JSON replays") {
  const auto inst = planar_ot::testing::instance(Metric::l1, {{{0, 0}, 2}}, {{{1, 1}, 2}});
  const auto j = nlohmann::json::parse(instance_to_json(inst));
  CHECK(j["metric"] == "l1");
  CHECK(parse_points(j["source"].get<std::string>()) == inst.source);
  CHECK(parse_points(j["sink"].get<std::string>()) == inst.sink);
}
