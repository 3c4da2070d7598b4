#include "doctest.h"
#include "gscfw/errors.hpp"
#include "gscfw/experiment.hpp"
#include "gscfw/records.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

using namespace gscfw;
namespace fs = std::filesystem;

namespace {

// A run whose f drops to `final_f` at iteration `hit`, flat before and after.
RunRecord fake(const std::string& problem, const std::string& method, int start, int hit,
               double final_f, int len = 30) {
  RunRecord r;
  r.problem = problem;
  r.method = method;
  r.start = start;
  r.trace.method = method;
  for (int k = 0; k <= len; ++k) {
    IterationRecord it;
    it.k = k;
    it.f = k >= hit ? final_f : final_f + 1.0;
    it.gap = 1.0 / (k + 1);
    it.kind = k == len ? StepKind::kNone : StepKind::kForward;
    it.elapsed = 0.01 * k;
    r.trace.records.push_back(it);
  }
  r.trace.f_final = r.trace.records.back().f;
  r.trace.x_final = Vector::Zero(2);
  return r;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gscfw_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Each line of a record file as JSON with the wall-time field removed.
std::vector<nlohmann::json> strip_time(const fs::path& file) {
  std::ifstream in(file);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    j.erase("time");
    out.push_back(j);
  }
  return out;
}

nlohmann::json small_config(const fs::path& out) {
  return {{"name", "t"},
          {"output_dir", out.string()},
          {"seed", 5},
          {"starts", 2},
          {"solver", {{"epsilon", 1e-8}, {"max_iter", 60}}},
          {"epsilons", {1e-2, 1e-4, 1e-6}},
          {"problems",
           {{{"id", "pa"}, {"kind", "portfolio"}, {"p", 30}, {"n", 10}, {"seed", 1}},
            {{"id", "pb"}, {"kind", "portfolio"}, {"p", 30}, {"n", 12}, {"seed", 2}}}},
          {"methods", {"fwgsc", "mbtfwgsc", "asfwgsc"}}};
}

}  // namespace

TEST_CASE("relative error") {
  CHECK(relative_error(3.0, 3.0) == 0.0);
  CHECK(relative_error(101.0, 100.0) == doctest::Approx(0.01));
  CHECK(relative_error(-1.98, -2.0) == doctest::Approx(0.01));
  CHECK(relative_error(1.0 - 1e-13, 1.0) == 0.0);
  CHECK(relative_error(1e-13, 0.0) == doctest::Approx(0.1));
  CHECK(relative_error(0.9, 1.0) < 0.0);
}

TEST_CASE("f star is the per-problem minimum") {
  std::vector<RunRecord> rs = {fake("a", "m1", 0, 5, 2.0), fake("a", "m2", 0, 5, 1.5),
                               fake("b", "m1", 0, 5, -3.0)};
  assign_f_star(rs);
  CHECK(rs[0].f_star == 1.5);
  CHECK(rs[1].f_star == 1.5);
  CHECK(rs[2].f_star == -3.0);
  for (const auto& r : rs) {
    for (const auto& it : r.trace.records) CHECK(r.f_star <= it.f + 1e-12);
  }
}

TEST_CASE("success ratio") {
  std::vector<RunRecord> rs = {fake("a", "m", 0, 3, 1.0), fake("a", "m", 1, 3, 1.0),
                               fake("b", "m", 0, 3, 1.0), fake("b", "m", 1, 3, 1.5)};
  for (auto& r : rs) r.f_star = 1.0;
  CHECK(success_ratio(rs, "m", 1e-6) == doctest::Approx(0.75));
  CHECK(success_ratio(rs, "m", INFINITY) == 1.0);
  CHECK_THROWS_AS(success_ratio(rs, "other", 1e-6), InvalidArgument);
  CHECK_THROWS_AS(success_ratio({}, "m", 1e-6), InvalidArgument);
}

TEST_CASE("iteration and time ratios") {
  std::vector<RunRecord> one = {fake("a", "m", 0, 7, 1.0)};
  assign_f_star(one);
  CHECK(*iteration_ratio(one, "m", 1e-6) == 1.0);
  CHECK(*time_ratio(one, "m", 1e-6) == 1.0);

  std::vector<RunRecord> two = {fake("a", "fast", 0, 10, 1.0), fake("a", "slow", 0, 20, 1.0)};
  assign_f_star(two);
  CHECK(*iteration_ratio(two, "fast", 1e-6) == 1.0);
  CHECK(*iteration_ratio(two, "slow", 1e-6) == 2.0);
  CHECK(*time_ratio(two, "slow", 1e-6) == doctest::Approx(2.0));

  // per-problem ratios 1 and 3 average to 2
  std::vector<RunRecord> avg = {fake("a", "m", 0, 10, 1.0), fake("a", "r", 0, 10, 1.0),
                                fake("b", "m", 0, 15, 1.0), fake("b", "r", 0, 5, 1.0)};
  assign_f_star(avg);
  CHECK(*iteration_ratio(avg, "m", 1e-6) == doctest::Approx(2.0));
  CHECK(*iteration_ratio(avg, "r", 1e-6) == doctest::Approx(1.0));

  // a method that solved nothing has no ratio
  std::vector<RunRecord> fail = {fake("a", "m", 0, 10, 1.0), fake("a", "r", 0, 10, 1.5)};
  assign_f_star(fail);
  CHECK_FALSE(iteration_ratio(fail, "r", 1e-6).has_value());

  std::vector<RunRecord> none = {fake("a", "m", 0, 10, 1.0)};
  none[0].f_star = 0.5;
  CHECK_THROWS_AS(iteration_ratio(none, "m", 1e-6), InvalidArgument);
}

TEST_CASE("profile invariants") {
  std::vector<RunRecord> rs;
  for (int s = 0; s < 2; ++s) {
    rs.push_back(fake("a", "x", s, 4 + s, 1.0));
    rs.push_back(fake("a", "y", s, 9, 1.0 + 1e-3));
    rs.push_back(fake("a", "z", s, 2, 1.0 + 0.5));
    rs.push_back(fake("b", "x", s, 12, -2.0 + 1e-5));
    rs.push_back(fake("b", "y", s, 3, -2.0));
    rs.push_back(fake("b", "z", s, 6, -2.0 + 0.1));
  }
  assign_f_star(rs);
  const std::vector<double> grid = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6};
  for (const auto& m : methods_of(rs)) {
    const auto pts = profile(rs, m, grid);
    REQUIRE(pts.size() == grid.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(pts[i].rho >= 0.0);
      CHECK(pts[i].rho <= 1.0);
      if (pts[i].rho_iter) CHECK(*pts[i].rho_iter >= 1.0);
      if (pts[i].rho_time) CHECK(*pts[i].rho_time >= 1.0);
      CHECK(pts[i].rho_iter.has_value() == (pts[i].rho > 0.0));
      if (i > 0) CHECK(pts[i].rho <= pts[i - 1].rho);  // grid is decreasing in eps
    }
  }
  CHECK(methods_of(rs) == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("run records round trip") {
  RunRecord r = fake("p1", "fwgsc", 3, 2, -1.25, 5);
  r.trace.status = RunStatus::kGapConverged;
  r.trace.records[1].backtracks = 4;
  r.trace.records[1].estimate = 0.1 + 0.2;
  r.trace.records[2].kind = StepKind::kDrop;
  r.trace.records[2].certificate = 1.0 / 3.0;
  r.trace.records[3].forced_forward = true;
  r.trace.records[3].active_size = 7;
  r.trace.sigma_f = 1e-10;
  std::ostringstream out;
  write_run(out, r);
  std::istringstream in(out.str());
  const RunRecord b = read_run(in);
  CHECK(b.problem == r.problem);
  CHECK(b.method == r.method);
  CHECK(b.start == 3);
  CHECK(b.trace.status == RunStatus::kGapConverged);
  CHECK(b.trace.sigma_f == 1e-10);
  REQUIRE(b.trace.records.size() == r.trace.records.size());
  for (std::size_t k = 0; k < b.trace.records.size(); ++k) {
    const auto &x = r.trace.records[k], &y = b.trace.records[k];
    CHECK(x.k == y.k);
    CHECK(x.f == y.f);
    CHECK(x.gap == y.gap);
    CHECK(x.kind == y.kind);
    CHECK(x.backtracks == y.backtracks);
    CHECK(x.active_size == y.active_size);
    CHECK(x.forced_forward == y.forced_forward);
    CHECK(std::isnan(x.estimate) == std::isnan(y.estimate));
    if (!std::isnan(x.estimate)) CHECK(x.estimate == y.estimate);
    CHECK(std::isnan(x.certificate) == std::isnan(y.certificate));
  }
  std::istringstream junk("not json\n");
  CHECK_THROWS(read_run(junk));
}

TEST_CASE("summary csv") {
  std::vector<RunRecord> rs = {fake("a", "m", 0, 3, 1.0), fake("a", "r", 0, 6, 1.0)};
  assign_f_star(rs);
  std::ostringstream out;
  write_summary_csv(out, rs, {1e-2, 1e-4});
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "method,epsilon,rho,rho_iter,rho_time");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("config parsing") {
  const auto dir = temp_dir("cfg");
  const auto cfg = parse_config(small_config(dir));
  CHECK(cfg.problems.size() == 2);
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.solver.max_iter == 60);
  CHECK(plan_grid(cfg).size() == 12);

  auto bad = small_config(dir);
  bad["methods"] = {"newton"};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = small_config(dir);
  bad["solver"]["gamma_u"] = 0.5;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = small_config(dir);
  bad["solver"]["typo"] = 1;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = small_config(dir);
  bad["problems"][1]["id"] = "pa";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = small_config(dir);
  bad.erase("problems");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);

  auto dwd = small_config(dir);
  dwd["problems"] = {{{"kind", "dwd"}, {"p", 20}, {"d", 4}}};
  dwd["methods"] = {"asfwgsc"};
  CHECK_THROWS_AS(run_experiment(parse_config(dwd), 1, false, std::cout), ConfigError);
  dwd["methods"] = {"fwlloo"};
  CHECK_THROWS_AS(run_experiment(parse_config(dwd), 1, false, std::cout), ConfigError);
}

TEST_CASE("start seeds") {
  CHECK(start_seed(1, 0, 0) == start_seed(1, 0, 0));
  CHECK(start_seed(1, 0, 0) != start_seed(1, 0, 1));
  CHECK(start_seed(1, 0, 0) != start_seed(1, 1, 0));
  CHECK(start_seed(1, 0, 0) != start_seed(2, 0, 0));
}

TEST_CASE("dry run lists the grid and writes nothing") {
  const auto dir = temp_dir("dry");
  fs::remove_all(dir);
  std::ostringstream log;
  const auto res = run_experiment(parse_config(small_config(dir)), 1, true, log);
  CHECK(res.records.empty());
  CHECK_FALSE(fs::exists(dir));
  CHECK(log.str().find("12 runs") != std::string::npos);
  CHECK(log.str().find("pb asfwgsc start=1") != std::string::npos);
}

TEST_CASE("fixed-seed reruns are identical apart from time") {
  const auto a = temp_dir("run_a"), b = temp_dir("run_b");
  std::ostringstream log;
  const auto ra = run_experiment(parse_config(small_config(a)), 2, false, log);
  const auto rb = run_experiment(parse_config(small_config(b)), 1, false, log);
  REQUIRE(ra.records.size() == 12);
  CHECK(fs::exists(a / "summary.csv"));
  CHECK(fs::exists(a / "fstar.json"));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a / "records")) files.push_back(e.path());
  CHECK(files.size() == 12);
  for (const auto& f : files) {
    CHECK(strip_time(f) == strip_time(b / "records" / f.filename()));
  }
  const auto back = read_run_dir(a / "records");
  CHECK(back.size() == 12);
  for (const auto& r : ra.records) {
    for (const auto& it : r.trace.records) CHECK(r.f_star <= it.f + 1e-12);
    if (r.trace.status == RunStatus::kGapConverged) CHECK(r.trace.records.back().gap <= 1e-8);
  }
  for (const auto& m : methods_of(ra.records)) {
    const auto pts = profile(ra.records, m, {1e-2, 1e-4, 1e-6});
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].rho <= pts[i - 1].rho);
  }
}
