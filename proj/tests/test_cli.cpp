#include "doctest.h"
#include "helpers.hpp"

#include "robsvm/commands.hpp"
#include "robsvm/config.hpp"
#include "robsvm/data.hpp"
#include "robsvm/solver.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace robsvm;
using testutil::vec;

namespace {

std::vector<nlohmann::json> records(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::string run(const std::string& command, const RunConfig& cfg, int* rc = nullptr) {
  std::ostringstream out;
  const int code = run_command(command, cfg, out);
  if (rc) *rc = code;
  return out.str();
}

// Everything after the header line.
std::string body(const std::string& report) { return report.substr(report.find('\n') + 1); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("robsvm_test_" + name);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("libsvm parsing") {
    std::istringstream in("+1 1:0.5 3:-2\n0 1:1\n\n# comment\n-1 2:4\n");
    const auto r = parse_libsvm(in);
    CHECK(r.dataset.size() == 3);
    CHECK(r.dataset.dim() == 3);
    CHECK(r.dataset[0].x == vec({0.5, 0, -2}));
    CHECK(r.dataset[0].y == 1);
    CHECK(r.dataset[1].y == -1);
    CHECK(r.remapped_labels == 1);

    std::istringstream bad_label("+1 1:1\n2 1:1\n");
    CHECK_THROWS_WITH(parse_libsvm(bad_label, "f"), doctest::Contains("f:2: invalid label"));
    std::istringstream bad_pair("+1 1:1 x\n");
    CHECK_THROWS_WITH(parse_libsvm(bad_pair, "f"), doctest::Contains("f:1:"));
    std::istringstream bad_index("+1 0:1\n");
    CHECK_THROWS(parse_libsvm(bad_index));
    std::istringstream inf("+1 1:inf\n");
    CHECK_THROWS_WITH(parse_libsvm(inf), doctest::Contains("non-finite"));
    std::istringstream dup("+1 1:1 1:2\n");
    CHECK_THROWS(parse_libsvm(dup));
    CHECK_THROWS(load_dataset("/nonexistent/file.svm"));
  }

  TEST_CASE("dataset round trip is exact") {
    Rng rng(5);
    std::vector<LabeledSample> s;
    for (int i = 0; i < 30; ++i) {
      Vector x = testutil::random_vector(rng, 4, 1e3);
      if (i % 3 == 0) x[1] = 0.0;
      if (i % 5 == 0) x[3] = 0.0;
      s.push_back({x, i % 2 ? 1 : -1});
    }
    const Dataset ds(std::move(s));
    const auto path = temp_path("roundtrip.svm");
    save_dataset(path.string(), ds);
    const auto back = load_dataset(path.string()).dataset;
    std::filesystem::remove(path);
    REQUIRE(back.size() == ds.size());
    CHECK(back.dim() == ds.dim());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(back[i].y == ds[i].y);
      CHECK(back[i].x == ds[i].x);
    }
  }

  TEST_CASE("generators") {
    const Dataset a = gaussian_blobs(10, 2, 2.0, 1.0, std::uint64_t{3});
    const Dataset b = gaussian_blobs(10, 2, 2.0, 1.0, std::uint64_t{3});
    for (std::size_t i = 0; i < 10; ++i) CHECK(a[i].x == b[i].x);
    const auto rep = replicated_with_noise(a, 0.0, 1);
    for (std::size_t i = 0; i < 10; ++i) CHECK(rep.disturbed[i].x == a[i].x);
    const auto noisy = replicated_with_noise(a, 0.5, 1);
    CHECK(noisy.disturbed[0].x != a[0].x);
    CHECK(noisy.disturbed[0].y == a[0].y);

    // Equal means: a trained classifier is no better than chance on fresh data.
    const Dataset tr = gaussian_blobs(200, 2, 0.0, 1.0, std::uint64_t{4});
    const Dataset te = gaussian_blobs(4000, 2, 0.0, 1.0, std::uint64_t{5});
    const auto fit = train_regularized(tr, NormSpec::l2(), 1.0);
    CHECK(std::abs(classification_error(fit.classifier, te) - 0.5) <= 0.05);
  }

  TEST_CASE("config parsing") {
    const auto cfg = RunConfig::from_string("# comment\nc = 0.25\nnorm=l1  # trailing\n");
    CHECK(cfg.get_double("c") == 0.25);
    CHECK(cfg.get("norm") == "l1");
    CHECK(cfg.get("kernel") == "rbf");
    CHECK_THROWS_WITH(RunConfig::from_string("bogus = 1\n", "x.cfg"), doctest::Contains("x.cfg:1"));
    CHECK_THROWS(RunConfig::from_string("c = 1\nc = 2\n"));
    CHECK_THROWS(RunConfig::from_string("no equals sign\n"));
    RunConfig r;
    r.set("c", "abc");
    CHECK_THROWS(r.get_double("c"));
    r.set("sizes", "1, 2,3");
    CHECK(r.get_list("sizes") == std::vector<double>{1, 2, 3});
    r.set("seed", "-1");
    CHECK_THROWS(r.get_u64("seed"));
    CHECK_THROWS(r.set("nope", "1"));
  }

  TEST_CASE("prior parsing") {
    CHECK(bayes_regularizer(parse_prior("point_mass:0.7")) == 0.7);
    CHECK(bayes_regularizer(parse_prior("uniform:0,1")) == 0.5);
    CHECK(bayes_regularizer(parse_prior("discrete:1@0.25,3@0.75")) == 2.5);
    CHECK_THROWS(parse_prior("gamma:1"));
    CHECK_THROWS(parse_prior("uniform:1"));
  }

  TEST_CASE("reports: header, determinism, errors") {
    RunConfig cfg;
    cfg.set("gen.m", "16");
    cfg.set("c", "0.4");
    for (const auto& cmd : {"train", "robust-eval", "kernel-train"}) {
      int rc = -1;
      const auto a = run(cmd, cfg, &rc);
      CHECK(rc == 0);
      const auto recs = records(a);
      CHECK(recs.front()["record"] == "header");
      CHECK(recs.front()["config"]["c"] == "0.4");
      CHECK(recs.back()["complete"] == true);
      CHECK(body(a) == body(run(cmd, cfg)));
    }
    RunConfig bad = cfg;
    bad.set("norm", "l3");
    int rc = 0;
    const auto err = records(run("train", bad, &rc));
    CHECK(rc != 0);
    CHECK(err.back()["complete"] == false);
    CHECK(run("nope", cfg, &rc).find("unknown command") != std::string::npos);
    CHECK(rc != 0);
  }

  TEST_CASE("calibrate trains at the prior mean") {
    RunConfig cfg;
    cfg.set("gen.m", "20");
    cfg.set("source", "bayes");
    cfg.set("prior", "point_mass:0.7");
    const auto recs = records(run("calibrate", cfg));
    const auto& res = recs[1];
    CHECK(res["c"] == 0.7);
    const Dataset ds = gaussian_blobs(20, 2, 2.0, 1.0, std::uint64_t{0});
    const auto direct = train_regularized(ds, NormSpec::l2(), 0.7);
    CHECK(res["train"]["objective"].get<double>() == direct.objective);

    cfg.set("source", "chance");
    cfg.set("model", "point_mass");
    cfg.set("model.scale", "3");
    cfg.set("n_draws", "200");
    const auto chance = records(run("calibrate", cfg));
    CHECK(chance[1]["c"].get<double>() == doctest::Approx(3.0));
    CHECK(chance[1]["coverage"].get<double>() == 1.0);
  }

  TEST_CASE("equivalence-check and small experiments") {
    RunConfig cfg;
    cfg.set("instances", "5");
    cfg.set("resolution", "32");
    auto recs = records(run("equivalence-check", cfg));
    CHECK(recs.size() == 8);
    CHECK(recs[6]["max_abs_gap"].get<double>() <= 1e-2);
    CHECK(recs[6]["max_sandwich_gap"].get<double>() <= 1e-9);

    RunConfig ce;
    ce.set("sizes", "10,20");
    ce.set("trials", "2");
    recs = records(run("consistency-exp", ce));
    CHECK(recs.back()["complete"] == true);
    CHECK(recs[recs.size() - 2]["bound_violations"] == 0);

    RunConfig pd;
    pd.set("m", "40");
    pd.set("trials", "2");
    pd.set("c", "0.01");
    recs = records(run("pathological-demo", pd));
    CHECK(recs[recs.size() - 2]["max_test_error"].get<double>() == 0.5);
  }

#ifdef ROBSVM_CLI_PATH
  TEST_CASE("command-line tool") {
    const auto cfg_path = temp_path("run.cfg");
    const auto out_path = temp_path("out.jsonl");
    {
      std::ofstream f(cfg_path);
      f << "gen.m = 12\nc = 5\n";
    }
    const std::string cli = ROBSVM_CLI_PATH;
    const std::string cmd = cli + " train --config " + cfg_path.string() + " --c 0.5 --output " + out_path.string();
    CHECK(std::system(cmd.c_str()) == 0);
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto recs = records(ss.str());
    CHECK(recs.front()["config"]["c"] == "0.5");
    CHECK(recs.front()["config"]["gen.m"] == "12");
    CHECK(std::system((cli + " train --norm l9 --output " + out_path.string() + " 2>/dev/null").c_str()) != 0);
    {
      std::ofstream f(cfg_path);
      f << "unknown_key = 1\n";
    }
    CHECK(std::system((cli + " train --config " + cfg_path.string() + " 2>/dev/null >/dev/null").c_str()) != 0);
    std::filesystem::remove(cfg_path);
    std::filesystem::remove(out_path);
  }
#endif
}
