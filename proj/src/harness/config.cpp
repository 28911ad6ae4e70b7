#include "thermoprep/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace thermoprep::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : node.items()) {
    if (!keys.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_as(const json& node, const std::string& key, const std::string& where) {
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

double get_number(const json& node, const std::string& key, const std::string& where) {
  const json& v = node.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& node, const std::string& key, const std::string& where) {
  const json& v = node.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::optional<double> optional_number(const json& node, const char* key, const std::string& where) {
  if (!node.contains(key) || node.at(key).is_null()) return std::nullopt;
  return get_number(node, key, where);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_couplings(const ModelConfig& m, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : m.couplings) {
    if (!keys.contains(key)) throw ConfigError("model.couplings: unknown coupling '" + key + "' for " + m.name);
  }
}

double coupling_or(const ModelConfig& m, const char* key, double fallback) {
  auto it = m.couplings.find(key);
  return it == m.couplings.end() ? fallback : it->second;
}

}  // namespace

bool OutputConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

const char* to_string(CostMode mode) { return mode == CostMode::faithful ? "faithful" : "single-pass"; }

CostMode parse_cost_mode(const std::string& text) {
  if (text == "faithful") return CostMode::faithful;
  if (text == "single-pass" || text == "single_pass") return CostMode::single_pass;
  throw ConfigError("cost_mode must be 'faithful' or 'single-pass', got '" + text + "'");
}

const char* to_string(FidelityMode mode) { return mode == FidelityMode::ideal ? "ideal" : "imperfect"; }

ExperimentConfig parse_config(const json& tree) {
  reject_unknown(tree, "config", {"model", "beta", "eps_bar", "eps", "fidelity", "run", "output"});
  ExperimentConfig cfg;

  if (!tree.contains("model")) throw ConfigError("config: missing 'model'");
  const json& model = tree.at("model");
  reject_unknown(model, "model", {"name", "sites", "local_dim", "couplings", "seed"});
  if (model.contains("name")) cfg.model.name = get_as<std::string>(model, "name", "model");
  if (!model.contains("sites")) throw ConfigError("model: missing 'sites'");
  cfg.model.sites = get_unsigned(model, "sites", "model");
  if (model.contains("local_dim")) cfg.model.local_dim = static_cast<Index>(get_unsigned(model, "local_dim", "model"));
  if (model.contains("seed")) cfg.model.seed = get_unsigned(model, "seed", "model");
  if (model.contains("couplings")) {
    const json& c = model.at("couplings");
    if (!c.is_object()) throw ConfigError("model.couplings: expected an object");
    for (const auto& [key, value] : c.items()) {
      if (!value.is_number()) throw ConfigError("model.couplings." + key + ": expected a number");
      cfg.model.couplings[key] = value.get<double>();
    }
  }

  if (!tree.contains("beta")) throw ConfigError("config: missing 'beta'");
  cfg.beta = get_number(tree, "beta", "config");
  cfg.eps_bar = optional_number(tree, "eps_bar", "config");
  cfg.eps = optional_number(tree, "eps", "config");

  if (tree.contains("fidelity")) {
    const json& f = tree.at("fidelity");
    reject_unknown(f, "fidelity", {"mode", "delta", "pe_time", "zeta", "c", "eps_pe", "quadrature"});
    if (f.contains("mode")) {
      const auto mode = get_as<std::string>(f, "mode", "fidelity");
      if (mode == "ideal") cfg.fidelity.mode = FidelityMode::ideal;
      else if (mode == "imperfect") cfg.fidelity.mode = FidelityMode::imperfect;
      else throw ConfigError("fidelity.mode must be 'ideal' or 'imperfect', got '" + mode + "'");
    }
    cfg.fidelity.delta = optional_number(f, "delta", "fidelity");
    cfg.fidelity.pe_time = optional_number(f, "pe_time", "fidelity");
    cfg.fidelity.zeta = optional_number(f, "zeta", "fidelity");
    cfg.fidelity.c = optional_number(f, "c", "fidelity");
    cfg.fidelity.eps_pe = optional_number(f, "eps_pe", "fidelity");
    if (f.contains("quadrature")) {
      const json& q = f.at("quadrature");
      reject_unknown(q, "fidelity.quadrature", {"nodes", "truncation"});
      if (q.contains("nodes")) cfg.fidelity.quadrature.nodes = get_unsigned(q, "nodes", "fidelity.quadrature");
      if (q.contains("truncation")) {
        cfg.fidelity.quadrature.truncation = get_number(q, "truncation", "fidelity.quadrature");
      }
    }
  }

  if (tree.contains("run")) {
    const json& r = tree.at("run");
    reject_unknown(r, "run", {"seed", "trials", "cost_mode", "max_qubits", "threads"});
    if (r.contains("seed")) cfg.run.seed = get_unsigned(r, "seed", "run");
    if (r.contains("trials")) cfg.run.trials = get_unsigned(r, "trials", "run");
    if (r.contains("cost_mode")) cfg.run.cost_mode = parse_cost_mode(get_as<std::string>(r, "cost_mode", "run"));
    if (r.contains("max_qubits")) cfg.run.max_qubits = static_cast<int>(get_unsigned(r, "max_qubits", "run"));
    if (r.contains("threads")) cfg.run.threads = get_unsigned(r, "threads", "run");
  }

  if (tree.contains("output")) {
    const json& o = tree.at("output");
    reject_unknown(o, "output", {"directory", "formats"});
    if (o.contains("directory")) cfg.output.directory = get_as<std::string>(o, "directory", "output");
    if (o.contains("formats")) cfg.output.formats = get_as<std::vector<std::string>>(o, "formats", "output");
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json tree;
  try {
    tree = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(tree);
}

void ExperimentConfig::validate() const {
  std::ostringstream os;
  if (model.sites == 0 || !is_power_of_two(model.sites)) os << "model.sites must be a power of 2; ";
  if (model.local_dim < 2) os << "model.local_dim must be >= 2; ";
  if (!(beta > 0.0)) os << "beta must be > 0; ";
  if (eps_bar.has_value() == eps.has_value()) os << "exactly one of eps_bar and eps is required; ";
  if (eps_bar && !(*eps_bar > 0.0 && *eps_bar < 1.0)) os << "eps_bar must lie in (0, 1); ";
  if (eps && !(*eps > 0.0 && *eps <= 1.0)) os << "eps must lie in (0, 1]; ";
  if (run.trials == 0) os << "run.trials must be >= 1; ";
  if (run.threads == 0) os << "run.threads must be >= 1; ";
  if (run.max_qubits < 1 || run.max_qubits > 30) os << "run.max_qubits must lie in [1, 30]; ";
  for (const auto& f : output.formats) {
    if (f != "csv" && f != "json") os << "output.formats: unknown format '" << f << "'; ";
  }
  if (fidelity.quadrature.nodes < 2) os << "fidelity.quadrature.nodes must be >= 2; ";
  if (!(fidelity.quadrature.truncation > 0.0)) os << "fidelity.quadrature.truncation must be > 0; ";
  if (!os.str().empty()) throw ConfigError(os.str());

  if (model.name == "ising") {
    if (model.local_dim != 2) throw ConfigError("model.local_dim must be 2 for ising");
    require_couplings(model, {"J", "g", "hz"});
  } else if (model.name == "heisenberg") {
    if (model.local_dim != 2) throw ConfigError("model.local_dim must be 2 for heisenberg");
    require_couplings(model, {"J", "hz"});
  } else if (model.name == "random") {
    require_couplings(model, {"scale"});
  } else {
    throw ConfigError("model.name must be one of ising, heisenberg, random; got '" + model.name + "'");
  }
}

Index ExperimentConfig::max_dim() const { return Index{1} << run.max_qubits; }

PrepareOptions ExperimentConfig::prepare_options() const {
  PrepareOptions o;
  o.eps_bar = eps_bar;
  o.eps = eps;
  o.fidelity = fidelity;
  o.cost_mode = run.cost_mode;
  o.max_dim = max_dim();
  return o;
}

ChainModel build_model(const ModelConfig& m) {
  if (m.name == "ising") {
    return transverse_field_ising(m.sites, coupling_or(m, "J", 1.0), coupling_or(m, "g", 1.0),
                                  coupling_or(m, "hz", 0.0));
  }
  if (m.name == "heisenberg") return heisenberg(m.sites, coupling_or(m, "J", 1.0), coupling_or(m, "hz", 0.0));
  if (m.name == "random") return random_nearest_neighbor(m.sites, m.local_dim, m.seed, coupling_or(m, "scale", 1.0));
  throw ConfigError("unknown model '" + m.name + "'");
}

json resolved_config(const ExperimentConfig& config, const MergeSchedule& schedule) {
  json out;
  out["model"] = {{"name", config.model.name},
                  {"sites", config.model.sites},
                  {"local_dim", config.model.local_dim},
                  {"couplings", config.model.couplings},
                  {"seed", config.model.seed}};
  out["beta"] = config.beta;
  out["eps_bar"] = config.eps_bar ? json(*config.eps_bar) : json(nullptr);
  out["eps"] = schedule.eps;
  out["n_steps"] = schedule.n_steps;
  out["link_norm"] = schedule.h_norm;
  const auto& f = schedule.fidelity;
  json fid = {{"mode", to_string(f.mode)},
              {"quadrature", {{"nodes", f.quadrature.nodes}, {"truncation", f.quadrature.truncation}}}};
  if (f.mode == FidelityMode::imperfect) {
    fid["delta"] = f.delta;
    fid["pe_time"] = f.pe_time;
    fid["zeta"] = f.zeta;
    fid["c"] = f.c;
    fid["eps_pe"] = f.eps_pe;
    fid["sigma"] = f.sigma();
  }
  out["fidelity"] = fid;
  out["run"] = {{"seed", config.run.seed},
                {"trials", config.run.trials},
                {"cost_mode", to_string(config.run.cost_mode)},
                {"max_qubits", config.run.max_qubits},
                {"threads", config.run.threads}};
  out["output"] = {{"directory", config.output.directory.string()}, {"formats", config.output.formats}};
  return out;
}

}  // namespace thermoprep::harness
