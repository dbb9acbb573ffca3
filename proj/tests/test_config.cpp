#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "olsb/config.hpp"

using namespace olsb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = OLSB_CONFIG_DIR;

json moderate() { return read_json_file(kConfigs / "moderate.json"); }

std::string error_of(const json& j) {
  try {
    parse_experiment(j, kConfigs);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("shipped configs parse") {
  for (const char* name : {"light.json", "moderate.json", "high.json"}) {
    CAPTURE(name);
    const auto spec = load_experiment(kConfigs / name);
    CHECK(spec.graph->node_count() == 64);
    CHECK(spec.graph->link_count() == 119);
    CHECK(spec.base.flows.size() == 9);
    CHECK(spec.K.size() == 3);
    CHECK(spec.algorithms.size() == 4);
    CHECK(spec.seeds.size() == 20);
    CHECK(spec.seeds.front() == 1);
    CHECK(spec.base.objective_scale == 64.0);
    CHECK(spec.base.levels.count() == 80);
    CHECK_NOTHROW(spec.base.validate());
  }
  CHECK(load_experiment(kConfigs / "light.json").arrival_rates.front() == 0.6);
  CHECK(load_experiment(kConfigs / "high.json").arrival_rates.front() == 1.5);
}

TEST_CASE("errors carry the field path") {
  auto j = moderate();
  j["cap"] = 0;
  CHECK(error_of(j).find("cap") != std::string::npos);

  j = moderate();
  j["K"] = json::array({1, "x"});
  CHECK(error_of(j).find("K[1]") != std::string::npos);

  j = moderate();
  j["links"]["width"] = 2.0;
  CHECK(error_of(j).find("links") != std::string::npos);

  j = moderate();
  j["algorithm"] = "dijkstra";
  CHECK(error_of(j).find("algorithm") != std::string::npos);

  j = moderate();
  j["schema"] = 99;
  CHECK(error_of(j).find("schema") != std::string::npos);

  j = moderate();
  j["topology"] = "nowhere.json";
  CHECK(error_of(j).find("topology") != std::string::npos);

  j = moderate();
  j["hop_slack"] = -2;
  CHECK(error_of(j).find("hop_slack") != std::string::npos);

  j = moderate();
  j.erase("arrival_rate");
  CHECK_FALSE(error_of(j).empty());
}

TEST_CASE("missing files are distinguished from bad ones") {
  CHECK_THROWS_AS(load_experiment(kConfigs / "absent.json"), MissingConfig);
  const fs::path tmp = fs::temp_directory_path() / "olsb_bad_config.json";
  {
    std::ofstream(tmp) << "{ not json";
  }
  CHECK_THROWS_AS(load_experiment(tmp), ConfigError);
  fs::remove(tmp);
}

TEST_CASE("a manifest round-trips through its hash") {
  const auto spec = load_experiment(kConfigs / "moderate.json");
  json manifest{{"config", spec.resolved}, {"config_sha1", config_hash(spec.resolved)}};
  const fs::path tmp = fs::temp_directory_path() / "olsb_manifest.json";
  {
    std::ofstream(tmp) << manifest.dump(2);
  }
  const auto again = load_experiment(tmp);
  CHECK(again.topology_sha1 == spec.topology_sha1);
  CHECK(again.graph->link_count() == spec.graph->link_count());

  manifest["config"]["cap"] = 4;
  {
    std::ofstream(tmp) << manifest.dump(2);
  }
  CHECK_THROWS_AS(load_experiment(tmp), ConfigError);
  fs::remove(tmp);
}

TEST_CASE("hashes") {
  CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
  // git hash-object of an empty file
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(config_hash(json{{"b", 1}, {"a", 2}}) == config_hash(json{{"a", 2}, {"b", 1}}));
}

TEST_CASE("levels and distributions") {
  const auto lv = parse_levels(json{{"kind", "stepped"}, {"count", 4}, {"step", 0.25}, {"top", 1.1}}, "levels");
  CHECK(lv.count() == 4);
  CHECK(lv[1] == doctest::Approx(0.25));
  CHECK(lv[4] == doctest::Approx(1.1));
  CHECK(parse_distribution(json{{"kind", "uniform"}, {"a", 0.2}, {"b", 0.4}}, "d").mean() == doctest::Approx(0.3));
  CHECK_THROWS_AS(parse_distribution(json{{"kind", "uniform"}, {"a", 0.5}, {"b", 0.4}}, "d"), ConfigError);
  CHECK_THROWS_AS(parse_distribution(json{{"kind", "pareto"}}, "d"), ConfigError);
}
