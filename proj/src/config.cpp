#include "olsb/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace olsb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

const json& need(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + "." + key, "missing required field");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double dflt, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : number(*it, where + "." + key);
}

std::int64_t integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t integer_or(const json& obj, const char* key, std::int64_t dflt, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : integer(*it, where + "." + key);
}

std::string string_or(const json& obj, const char* key, const std::string& dflt, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (!it->is_string()) fail(where + "." + key, "expected a string");
  return it->get<std::string>();
}

Coord coord(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    fail(where, "expected [row, col]");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

// A scalar or a non-empty list of numbers.
std::vector<double> number_list(const json& v, const std::string& where) {
  std::vector<double> out;
  if (v.is_array()) {
    if (v.empty()) fail(where, "empty list");
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(number(v, where));
  }
  return out;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MissingConfig("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_referenced(const json& v, const std::filesystem::path& base_dir, const std::string& where) {
  if (!v.is_string()) return v;
  const auto p = base_dir / v.get<std::string>();
  std::string text;
  try {
    text = read_text(p);
  } catch (const MissingConfig&) {
    fail(where, "cannot open referenced file " + p.string());
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(where, std::string("invalid JSON in ") + p.string() + ": " + e.what());
  }
}

std::string digest_hex(const EVP_MD* md, std::string_view data) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, md, nullptr) != 1 || EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("digest computation failed");
  }
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", out[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace

std::string sha1_hex(std::string_view data) { return digest_hex(EVP_sha1(), data); }

std::string git_blob_sha1(std::string_view data) {
  std::string blob = "blob " + std::to_string(data.size());
  blob.push_back('\0');
  blob.append(data);
  return sha1_hex(blob);
}

std::string config_hash(const json& j) { return sha1_hex(j.dump()); }

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
}

WeightDistribution parse_distribution(const json& j, const std::string& where) {
  const std::string kind = string_or(j, "kind", "", where);
  try {
    if (kind == "uniform") return WeightDistribution::uniform(number(need(j, "a", where), where + ".a"), number(need(j, "b", where), where + ".b"));
    if (kind == "bernoulli") return WeightDistribution::bernoulli(number(need(j, "p", where), where + ".p"));
    if (kind == "beta") return WeightDistribution::beta(number(need(j, "alpha", where), where + ".alpha"), number(need(j, "beta", where), where + ".beta"));
    if (kind == "constant") return WeightDistribution::constant(number(need(j, "c", where), where + ".c"));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    fail(where, msg);
  }
  fail(where + ".kind", "expected one of uniform, bernoulli, beta, constant");
}

std::vector<WeightDistribution> parse_link_model(const json& j, const Graph& g, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::string model = string_or(j, "model", "", where);
  std::vector<WeightDistribution> out;
  if (model == "heterogeneous_uniform") {
    const double lo = number(need(j, "lo", where), where + ".lo");
    const double hi = number(need(j, "hi", where), where + ".hi");
    const double width = number(need(j, "width", where), where + ".width");
    const auto meta = integer(need(j, "meta_seed", where), where + ".meta_seed");
    try {
      out = heterogeneous_uniform(g.link_count(), static_cast<std::uint64_t>(meta), lo, hi, width);
    } catch (const ConfigError& e) {
      fail(where, e.what());
    }
  } else if (model == "per_link") {
    out.assign(g.link_count(), parse_distribution(need(j, "default", where), where + ".default"));
  } else {
    fail(where + ".model", "expected heterogeneous_uniform or per_link");
  }
  if (auto it = j.find("overrides"); it != j.end()) {
    if (!it->is_array()) fail(where + ".overrides", "expected a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string w = where + ".overrides[" + std::to_string(i) + "]";
      const auto& o = (*it)[i];
      NodeId s, d;
      try {
        s = g.node_at(coord(need(o, "src", w), w + ".src"));
        d = g.node_at(coord(need(o, "dst", w), w + ".dst"));
      } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(w, 0) == 0) throw;
        fail(w, msg);
      }
      auto e = g.find_link(s, d);
      if (!e) fail(w, "no such link");
      out[index_of(*e)] = parse_distribution(need(o, "dist", w), w + ".dist");
    }
  }
  return out;
}

CostLevels parse_levels(const json& j, const std::string& where) {
  const std::string kind = string_or(j, "kind", "uniform", where);
  try {
    if (kind == "uniform") return CostLevels::uniform(static_cast<std::size_t>(integer_or(j, "count", 10, where)));
    if (kind == "stepped") {
      const auto M = integer_or(j, "count", 10, where);
      if (M < 1) fail(where + ".count", "must be >= 1");
      return CostLevels::stepped(number(need(j, "step", where), where + ".step"), static_cast<std::size_t>(M),
                                 number_or(j, "top", 1.1, where));
    }
    if (kind == "explicit") {
      const auto& v = need(j, "values", where);
      if (!v.is_array()) fail(where + ".values", "expected a list");
      std::vector<double> vals;
      for (std::size_t i = 0; i < v.size(); ++i) vals.push_back(number(v[i], where + ".values[" + std::to_string(i) + "]"));
      return CostLevels(std::move(vals));
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    fail(where, msg);
  }
  fail(where + ".kind", "expected uniform, stepped or explicit");
}

std::vector<FlowDef> parse_flows(const json& j, const std::string& where) {
  const json* list = &j;
  std::string base = where;
  if (j.is_object()) {
    list = &need(j, "flows", where);
    base = where + ".flows";
  }
  if (!list->is_array() || list->empty()) fail(base, "expected a non-empty list of flows");
  std::vector<FlowDef> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const std::string w = base + "[" + std::to_string(i) + "]";
    const auto& f = (*list)[i];
    FlowDef d;
    d.id = static_cast<std::uint32_t>(integer_or(f, "id", static_cast<std::int64_t>(i + 1), w));
    d.src = coord(need(f, "src", w), w + ".src");
    d.dst = coord(need(f, "dst", w), w + ".dst");
    out.push_back(d);
  }
  return out;
}

ExperimentSpec parse_experiment(const json& j_in, const std::filesystem::path& base_dir) {
  if (!j_in.is_object()) fail("config", "top level must be an object");
  json j = j_in;
  const auto schema = integer(need(j, "schema", "config"), "schema");
  if (schema != kConfigSchema) fail("schema", "unsupported version " + std::to_string(schema));

  ExperimentSpec spec;
  spec.name = string_or(j, "name", "experiment", "config");

  // topology: file reference or inline document
  j["topology"] = load_referenced(need(j, "topology", "config"), base_dir, "topology");
  TopologyFile topo;
  try {
    topo = parse_topology(j["topology"].dump(2));
  } catch (const ConfigError& e) {
    fail("topology", e.what());
  }
  if (!topo.graph.has_coords()) fail("topology", "nodes need coordinates");
  spec.topology_sha1 = git_blob_sha1(dump_topology(topo.graph, topo.note));
  auto graph = std::make_shared<const Graph>(std::move(topo.graph));
  spec.graph = graph;

  j["flows"] = load_referenced(need(j, "flows", "config"), base_dir, "flows");
  const auto flow_defs = parse_flows(j["flows"], "flows");

  SimConfig& c = spec.base;
  c.graph = graph;
  for (std::size_t i = 0; i < flow_defs.size(); ++i) {
    const std::string w = "flows[" + std::to_string(i) + "]";
    FlowSpec f;
    f.id = flow_defs[i].id;
    try {
      f.src = graph->node_at(flow_defs[i].src);
      f.dst = graph->node_at(flow_defs[i].dst);
    } catch (const ConfigError& e) {
      fail(w, e.what());
    }
    c.flows.push_back(f);
  }
  c.link_dists = parse_link_model(need(j, "links", "config"), *graph, "links");
  if (auto it = j.find("levels"); it != j.end()) c.levels = parse_levels(*it, "levels");

  spec.K = number_list(need(j, "K", "config"), "K");
  spec.arrival_rates = number_list(need(j, "arrival_rate", "config"), "arrival_rate");
  {
    const auto& a = need(j, "algorithm", "config");
    std::vector<std::string> names;
    if (a.is_string()) {
      names.push_back(a.get<std::string>());
    } else if (a.is_array() && !a.empty()) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_string()) fail("algorithm[" + std::to_string(i) + "]", "expected a string");
        names.push_back(a[i].get<std::string>());
      }
    } else {
      fail("algorithm", "expected a name or a non-empty list of names");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      try {
        spec.algorithms.push_back(parse_algorithm(names[i]));
      } catch (const ConfigError& e) {
        fail(a.is_array() ? "algorithm[" + std::to_string(i) + "]" : "algorithm", e.what());
      }
    }
  }
  {
    const auto& s = need(j, "seeds", "config");
    if (s.is_array()) {
      if (s.empty()) fail("seeds", "empty list");
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto v = integer(s[i], "seeds[" + std::to_string(i) + "]");
        if (v < 0) fail("seeds[" + std::to_string(i) + "]", "must be >= 0");
        spec.seeds.push_back(static_cast<std::uint64_t>(v));
      }
    } else if (s.is_object()) {
      const auto b = integer(need(s, "base", "seeds"), "seeds.base");
      const auto n = integer(need(s, "count", "seeds"), "seeds.count");
      if (b < 0) fail("seeds.base", "must be >= 0");
      if (n < 1) fail("seeds.count", "must be >= 1");
      for (std::int64_t i = 0; i < n; ++i) spec.seeds.push_back(static_cast<std::uint64_t>(b + i));
      j["seeds"] = spec.seeds;
    } else {
      const auto v = integer(s, "seeds");
      if (v < 0) fail("seeds", "must be >= 0");
      spec.seeds.push_back(static_cast<std::uint64_t>(v));
    }
  }

  if (auto it = j.find("objective_scale"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "nodes") fail("objective_scale", "expected a number or \"nodes\"");
      c.objective_scale = static_cast<double>(graph->node_count());
    } else {
      c.objective_scale = number(*it, "objective_scale");
    }
  }
  c.horizon = integer(need(j, "slots", "config"), "slots");
  c.cap = static_cast<int>(integer_or(j, "cap", 1, "config"));
  c.link_cap = static_cast<int>(integer_or(j, "link_cap", 1, "config"));
  try {
    c.ack_mode = parse_ack_mode(string_or(j, "ack_mode", "instant", "config"));
  } catch (const ConfigError& e) {
    fail("ack_mode", e.what());
  }
  try {
    c.genie_set = parse_genie_set(string_or(j, "genie_set", "spanner", "config"));
  } catch (const ConfigError& e) {
    fail("genie_set", e.what());
  }
  const auto max_hops = integer_or(j, "max_hops", 0, "config");
  const auto max_paths = integer_or(j, "max_paths", 0, "config");
  if (max_hops < 0) fail("max_hops", "must be >= 0");
  if (max_paths < 0) fail("max_paths", "must be >= 0");
  c.max_hops = static_cast<std::size_t>(max_hops);
  c.max_paths = static_cast<std::size_t>(max_paths);
  if (j.contains("hop_slack")) {
    const auto slack = integer(j["hop_slack"], "hop_slack");
    if (slack < 0) fail("hop_slack", "must be >= 0");
    c.hop_slack = static_cast<int>(slack);
  }
  c.spanner_C = number_or(j, "spanner_C", 2.0, "config");
  c.stride = integer_or(j, "stride", 100, "config");
  c.decision_log = j.value("decision_log", false);
  spec.out_dir = string_or(j, "out", "runs/" + spec.name, "config");

  // every sweep point must validate; check the axes against a probe config
  for (std::size_t i = 0; i < spec.K.size(); ++i) {
    if (!(spec.K[i] > 0)) fail(spec.K.size() > 1 ? "K[" + std::to_string(i) + "]" : "K", "must be > 0");
  }
  for (std::size_t i = 0; i < spec.arrival_rates.size(); ++i) {
    const double r = spec.arrival_rates[i];
    if (!(r >= 0 && r <= 100)) {
      fail(spec.arrival_rates.size() > 1 ? "arrival_rate[" + std::to_string(i) + "]" : "arrival_rate",
           "must be in [0, 100]");
    }
  }
  c.K = spec.K.front();
  for (auto& f : c.flows) f.rate = spec.arrival_rates.front();
  c.algorithm = spec.algorithms.front();
  c.seed = spec.seeds.front();
  c.validate();

  spec.resolved = std::move(j);
  return spec;
}

ConfigSource read_config_source(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingConfig("config file not found: " + path.string());
  json j = read_json_file(path);
  if (j.is_object() && j.contains("config") && j.contains("config_sha1")) {
    json inner = j["config"];
    const std::string want = j["config_sha1"].is_string() ? j["config_sha1"].get<std::string>() : "";
    if (config_hash(inner) != want) fail("config_sha1", "manifest hash does not match its embedded config");
    return {std::move(inner), path.parent_path()};
  }
  return {std::move(j), path.parent_path()};
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  auto src = read_config_source(path);
  return parse_experiment(src.config, src.base_dir);
}

}  // namespace olsb
