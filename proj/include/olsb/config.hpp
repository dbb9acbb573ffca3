#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "olsb/sim.hpp"

namespace olsb {

inline constexpr int kConfigSchema = 1;

/// The config file itself could not be found or read.
class MissingConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowDef {
  std::uint32_t id = 0;
  Coord src;
  Coord dst;
};

/// A sweep over K, arrival rate, algorithm and seed around one base config.
struct ExperimentSpec {
  std::string name;
  /// The config with topology and flows inlined; scalars and lists as given.
  nlohmann::json resolved;
  std::shared_ptr<const Graph> graph;
  std::string topology_sha1;  // git blob hash of the canonical topology dump
  SimConfig base;
  std::vector<double> K;
  std::vector<double> arrival_rates;
  std::vector<Algorithm> algorithms;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
};

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Relative file references inside `j` resolve against base_dir. Throws
/// ConfigError with the JSON field path of the first problem.
ExperimentSpec parse_experiment(const nlohmann::json& j, const std::filesystem::path& base_dir);
struct ConfigSource {
  nlohmann::json config;
  std::filesystem::path base_dir;
};
/// Reads a config file, or the config embedded in a run manifest after
/// re-hashing it. Throws MissingConfig when the file does not exist.
ConfigSource read_config_source(const std::filesystem::path& path);
ExperimentSpec load_experiment(const std::filesystem::path& path);

std::vector<FlowDef> parse_flows(const nlohmann::json& j, const std::string& where);
std::vector<WeightDistribution> parse_link_model(const nlohmann::json& j, const Graph& g, const std::string& where);
CostLevels parse_levels(const nlohmann::json& j, const std::string& where);
WeightDistribution parse_distribution(const nlohmann::json& j, const std::string& where);

std::string sha1_hex(std::string_view data);
/// SHA-1 of "blob <size>\0<data>", as git hashes file contents.
std::string git_blob_sha1(std::string_view data);
/// Hash of the canonical (sorted-key, compact) dump.
std::string config_hash(const nlohmann::json& j);

}  // namespace olsb
