#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dln/errors.hpp"
#include "dln/experiment.hpp"
#include "dln/loss.hpp"

using namespace dln;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dln_experiment_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("config text parsing") {
  std::istringstream good("# comment\n\ndepth = 4\nwidth=6\npolicy = theory:0.5\ntarget = none\n");
  const RunConfig c = RunConfig::parse(good);
  CHECK(c.depth == 4);
  CHECK(c.width == 6);
  CHECK(c.policy == "theory:0.5");
  CHECK_FALSE(c.target.has_value());
  CHECK(c.resolved_dims() == DimChain{8, 6, 6, 6, 2});

  std::istringstream round(c.to_text());
  const RunConfig back = RunConfig::parse(round);
  CHECK(back.to_text() == c.to_text());

  std::istringstream unknown("depth = 3\nlayers = 4\n");
  try {
    RunConfig::parse(unknown);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream noeq("depth 3\n");
  CHECK_THROWS_AS(RunConfig::parse(noeq), ConfigError);
  std::istringstream badnum("m = forty\n");
  CHECK_THROWS_AS(RunConfig::parse(badnum), ConfigError);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.validate();
  RunConfig bad = c;
  bad.dims = {5, 3, 2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.loss = "lp:4";
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // optimal needs l2
  bad.policy = "lp:4";
  bad.validate();
  bad = c;
  bad.optimizer = "bcsgd";
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // eta unset
  bad.eta = 0.5;
  bad.validate();
  bad = c;
  bad.checkpoint_every = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.policy = "bogus";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero sweeps writes a header-only CSV") {
  RunConfig c;
  c.sweeps = 0;
  c.output = scratch("empty.csv").string();
  const ExperimentResult r = run_experiment(c);
  CHECK(r.trajectories.front().empty());
  CHECK(slurp(c.output) == std::string(kTrajectoryHeader) + "\n");
  CHECK(r.final_dist > 0.0);
}

TEST_CASE("trajectory CSV round trip and row count") {
  RunConfig c;
  c.depth = 4;
  c.sweeps = 2500;
  c.target.reset();
  c.gamma = true;
  c.output = scratch("long.csv").string();
  const ExperimentResult r = run_experiment(c);
  const Trajectory& t = r.trajectories.front();
  REQUIRE(t.size() == 10000);
  CHECK(line_count(c.output) == t.size() + 1);
  REQUIRE(r.audit.has_value());
  CHECK(r.audit->violations.empty());

  const Trajectory back = load_trajectory_csv(c.output);
  REQUIRE(back.size() == t.size());
  for (std::size_t k = 0; k < t.size(); k += 97) {
    const StepRecord& a = t.steps[k];
    const StepRecord& b = back.steps[k];
    CHECK(a.iteration == b.iteration);
    CHECK(a.sweep == b.sweep);
    CHECK(a.layer == b.layer);
    CHECK(a.lr == b.lr);
    CHECK(a.loss_after == b.loss_after);
    CHECK(a.dist_after == b.dist_after);
    CHECK(a.dist_before == b.dist_before);
    CHECK(a.grad_frobenius == b.grad_frobenius);
    CHECK(a.gamma_bound == b.gamma_bound);
  }
}

TEST_CASE("identical configs give byte-identical CSVs") {
  for (const char* opt : {"bcgd", "gd", "bcsgd"}) {
    RunConfig c;
    c.optimizer = opt;
    c.depth = 3;
    c.sweeps = 30;
    c.eta = std::string(opt) == "bcsgd" ? 0.5 : 0.0;
    c.seed = 7;
    c.output = scratch(std::string("a_") + opt + ".csv").string();
    run_experiment(c);
    RunConfig d = c;
    d.output = scratch(std::string("b_") + opt + ".csv").string();
    run_experiment(d);
    CHECK(slurp(c.output) == slurp(d.output));
    CHECK(slurp(c.output).size() > std::string(kTrajectoryHeader).size() + 1);
  }
}

TEST_CASE("checkpoints reproduce the logged distances") {
  RunConfig c;
  c.depth = 3;
  c.sweeps = 40;
  c.target.reset();
  c.checkpoint_every = 12;
  c.checkpoint_dir = scratch("ckpt").string();
  fs::remove_all(c.checkpoint_dir);
  const ExperimentResult r = run_experiment(c);
  const Dataset data = build_dataset(c);
  const Trajectory& t = r.trajectories.front();
  int checked = 0;
  for (std::int64_t it = 12; it <= static_cast<std::int64_t>(t.size()) && checked < 10; it += 12, ++checked) {
    const Network net = load_network(fs::path(c.checkpoint_dir) / ("net_" + std::to_string(it) + ".txt"));
    const ErrorReport e = error_report(net, data, LossFunction::l2(), r.oracle.optimal_loss);
    const StepRecord& s = t.steps[static_cast<std::size_t>(it - 1)];
    CHECK(s.iteration == it);
    CHECK(std::abs(e.dist_to_opt - s.dist_after) <= 1e-12 * std::max(1.0, std::abs(s.dist_after)));
  }
  CHECK(checked == 10);
}

TEST_CASE("deeper networks converge faster per sweep") {
  double prev = kInfinity;
  for (int depth : {1, 10, 50}) {
    RunConfig c;
    c.d_in = 20;
    c.d_out = 4;
    c.m = 100;
    c.depth = depth;
    c.sweeps = 3;
    c.target.reset();
    c.gamma = false;
    const ExperimentResult r = run_experiment(c);
    MESSAGE("depth " << depth << ": dist after 3 sweeps " << r.final_dist);
    CHECK(r.final_dist < prev);
    prev = r.final_dist;
  }
}
