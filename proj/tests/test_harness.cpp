#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "nlslab/error.hpp"
#include "nlslab/harness.hpp"
#include "nlslab/snapshot.hpp"

using namespace nlslab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nlslab-harness-" + name);
  fs::remove_all(p);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

EvolutionResult fake_run(std::vector<double> linf, std::vector<double> kinetic) {
  EvolutionResult r;
  for (std::size_t i = 0; i < linf.size(); ++i)
    r.trajectory.records.push_back({double(i), 1.0, 0.0, kinetic[i], linf[i], 0.0});
  return r;
}

DiagnosticsReport fake_report(std::vector<double> n, std::vector<double> delta) {
  DiagnosticsReport d;
  for (std::size_t i = 0; i < n.size(); ++i) d.t.push_back(double(i));
  d.frequency_scale = std::move(n);
  d.profile_distance = std::move(delta);
  return d;
}

}  // namespace

TEST_CASE("scenario names round-trip") {
  for (auto s : {Scenario::ground_state, Scenario::soliton, Scenario::pseudoconformal, Scenario::subcritical,
                 Scenario::threshold_census, Scenario::operator_suite})
    CHECK(scenario_from_string(to_string(s)) == s);
  CHECK(to_string(Scenario::threshold_census) == "threshold-census");
  CHECK_THROWS_AS(scenario_from_string("supercritical"), InvalidArgument);
}

TEST_CASE("config parsing fills scenario defaults") {
  const auto c = ExperimentConfig::from_json(
      json::parse(R"({"scenario":"subcritical","mass_ratio":0.5,"grid":{"M":256},"seed":7})"));
  CHECK(c.scenario == Scenario::subcritical);
  CHECK(c.mass_ratio == 0.5);
  CHECK(c.grid.nodes == 256);
  CHECK(c.grid.rmax == ExperimentConfig::defaults(Scenario::subcritical).grid.rmax);
  CHECK(c.time.t1 == ExperimentConfig::defaults(Scenario::subcritical).time.t1);
  CHECK(c.seed == 7);
  CHECK_FALSE(c.certificate.has_value());

  const auto back = ExperimentConfig::from_json(json::parse(c.to_json().dump()));
  CHECK(back.to_json() == c.to_json());
}

TEST_CASE("invalid configs are rejected") {
  const char* bad[] = {
      R"([1,2])",
      R"({"grid":{"M":512}})",
      R"({"scenario":"warp"})",
      R"({"scenario":"soliton","colour":"red"})",
      R"({"scenario":"soliton","grid":{"M":4}})",
      R"({"scenario":"soliton","grid":{"Rmax":-1}})",
      R"({"scenario":"soliton","time":{"t0":2,"t1":1}})",
      R"({"scenario":"subcritical","mass_ratio":0})",
      R"({"scenario":"threshold-census","census":{"ratios":[0.5,-1]}})",
      R"({"scenario":"threshold-census","census":{"shapes":["square"]}})",
      R"({"scenario":"soliton","grid":{"M":"many"}})",
  };
  for (const char* text : bad) CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(text)), InvalidArgument);

  const auto path = scratch("badjson.json");
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(ExperimentConfig::load(path), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::load(scratch("absent.json")), InvalidArgument);
}

TEST_CASE("classification rules") {
  SUBCASE("blowup report wins") {
    auto r = fake_run({1, 2}, {1, 2});
    r.blowup.detected = true;
    CHECK(classify(r, fake_report({1, 1}, {0, 0})) == "blowup-like");
  }
  SUBCASE("soliton-like needs small distance and steady N over the final half") {
    const auto r = fake_run({1, 1, 1, 1}, {1, 1, 1, 1});
    CHECK(classify(r, fake_report({1, 1, 1.5, 1.9}, {9, 9, 0.1, 0.2})) == "soliton-like");
    CHECK(classify(r, fake_report({1, 1, 1, 2.1}, {0, 0, 0, 0})) == "undecided");
    CHECK(classify(r, fake_report({1, 1, 1, 1}, {0, 0, 0, 0.3})) == "undecided");
  }
  SUBCASE("disperse-like needs amplitude decay and shrinking kinetic energy") {
    const auto d = fake_report({1, 2, 4, 8}, {1, 1, 1, 1});
    CHECK(classify(fake_run({4, 3, 2, 2}, {5, 4, 3, 2}), d) == "disperse-like");
    CHECK(classify(fake_run({4, 3, 2, 2.1}, {5, 4, 3, 2}), d) == "undecided");
    CHECK(classify(fake_run({4, 3, 2, 1}, {1, 2, 3, 4}), d) == "undecided");
  }
}

TEST_CASE("census monotonicity relabels, never reorders") {
  std::vector<CensusEntry> e{
      {Shape::ground_state, 0.9, "disperse-like", "disperse-like"},
      {Shape::ground_state, 1.1, "blowup-like", "blowup-like"},
      {Shape::ground_state, 1.3, "disperse-like", "disperse-like"},
      {Shape::gaussian, 1.3, "disperse-like", "disperse-like"},
  };
  CHECK(enforce_census_monotonicity(e) == 1);
  CHECK(e[0].label == "disperse-like");
  CHECK(e[1].label == "blowup-like");
  CHECK(e[2].label == "undecided");
  CHECK(e[2].raw_label == "disperse-like");
  CHECK(e[2].ratio == 1.3);
  CHECK(e[3].label == "disperse-like");
}

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("missing certificate is reported") {
  auto c = ExperimentConfig::defaults(Scenario::soliton);
  c.output_dir = scratch("nocert");
  CHECK_THROWS_AS(run(c), PreconditionFailed);
  c.certificate = scratch("nowhere") / "certificate.json";
  CHECK_THROWS_AS(run(c), PreconditionFailed);
}

TEST_CASE("ground-state scenario is certified and deterministic") {
  auto c = ExperimentConfig::defaults(Scenario::ground_state);
  c.grid.nodes = 512;
  c.output_dir = scratch("gs");
  const auto a = run(c);
  const auto b = run(c);
  CHECK(a.content_hash == b.content_hash);
  CHECK(a.content_hash.size() == 64);
  CHECK(a.headline["energy_relative"].get<double>() <= 1e-6);
  CHECK(a.headline["cross_method_mass_agreement"].get<double>() <= 1e-5);

  const auto m = read_json(c.output_dir / "manifest.json");
  CHECK(m["content_hash"] == a.content_hash);
  CHECK(m["config"]["scenario"] == "ground-state");
  CHECK(m["classification_thresholds"]["version"] == ClassificationThresholds::version);
  for (const auto& f : m["outputs"]) CHECK(sha256_file(c.output_dir / f["path"].get<std::string>()) == f["sha256"]);

  SUBCASE("certificate loads onto another grid") {
    const auto q = load_certified_ground_state(c.output_dir / "certificate.json", RadialGrid::make(4, 1024, 30.0));
    CHECK(std::abs(q.mass - a.headline["mass"].get<double>()) / q.mass < 1e-6);
    CHECK_THROWS_AS(load_certified_ground_state(c.output_dir / "certificate.json", RadialGrid::make(2, 512, 30.0)),
                    PreconditionFailed);
  }
  SUBCASE("manifest config reproduces the hash") {
    const auto again = run(ExperimentConfig::from_json(m["config"]));
    CHECK(again.content_hash == a.content_hash);
  }
}

TEST_CASE("subcritical 0.81 run disperses") {
  const auto grid = RadialGrid::make(4, 512, 60.0);
  const auto q = solve_shooting(grid);
  auto c = ExperimentConfig::defaults(Scenario::subcritical);
  c.grid = {4, 512, 60.0};
  c.output_dir = scratch("sub");
  const auto m = run_with_ground_state(c, q);
  CHECK(m.headline["label"] == "disperse-like");
  CHECK(m.headline["mass_drift"].get<double>() < 1e-8);
  for (const auto* f : {"run.csv", "diagnostics.csv", "diagnostics.json", "final.snap", "config.json"})
    CHECK(fs::exists(c.output_dir / f));
  std::ifstream csv(c.output_dir / "run.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,mass,energy,kinetic,linf,S");
}
