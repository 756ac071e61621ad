#include "fsm/run_config.hpp"
#include "fsm/errors.hpp"
#include "fsm/potential_io.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace fsm {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigError("config: field '" + field + "' " + what);
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "must be an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) bad(field, "is out of range");
  return static_cast<int>(v);
}

std::vector<int> get_int_list(const json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "must be an array of integers");
  std::vector<int> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_int(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

void parse_sweep(const json& j, SweepSettings& s) {
  if (!j.is_object()) bad("sweep", "must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "axis") {
      if (!value.is_string()) bad("sweep.axis", "must be one of \"K\", \"N\", \"M\"");
      try {
        s.axis = parse_axis(value.get<std::string>());
      } catch (const ConfigError&) {
        bad("sweep.axis", "must be one of \"K\", \"N\", \"M\"");
      }
    } else if (key == "grid") {
      if (value.is_string()) {
        try {
          s.grid = parse_grid(value.get<std::string>());
        } catch (const ConfigError& e) {
          bad("sweep.grid", std::string("is invalid: ") + e.what());
        }
      } else {
        s.grid = get_int_list(value, "sweep.grid");
      }
    } else if (key == "M_values") {
      s.m_values = get_int_list(value, "sweep.M_values");
    } else if (key == "jobs") {
      s.jobs = get_int(value, "sweep.jobs");
    } else {
      bad("sweep." + key, "is not recognized");
    }
  }
}

void parse_audit(const json& j, AuditSettings& a) {
  if (!j.is_object()) bad("audit", "must be an object");
  for (const auto& [key, value] : j.items()) {
    const std::string f = "audit." + key;
    if (key == "fsmap_trials") a.fsmap_trials = get_int(value, f);
    else if (key == "perturbation_trials") a.perturbation_trials = get_int(value, f);
    else if (key == "perturbation_dim") a.perturbation_dim = get_int(value, f);
    else if (key == "M_values") a.m_values = get_int_list(value, f);
    else if (key == "max_order") a.max_order = get_int(value, f);
    else if (key == "rhs_factor") a.rhs_factor = get_number(value, f);
    else bad(f, "is not recognized");
  }
}

}  // namespace

std::vector<int> parse_grid(const std::string& spec) {
  std::vector<int> out;
  auto to_int = [&](const std::string& tok) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw ConfigError("grid: '" + tok + "' is not an integer");
    return v;
  };
  if (spec.empty()) return out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    if (parts.size() != 3) throw ConfigError("grid: expected a:b:step");
    const int a = to_int(parts[0]), b = to_int(parts[1]), step = to_int(parts[2]);
    if (step <= 0) throw ConfigError("grid: step must be positive");
    for (int v = a; v <= b; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(spec);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(to_int(tok));
  return out;
}

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  std::optional<double> target;
  std::optional<int> index;
  std::string strategy = "index";
  for (const auto& [key, value] : doc.items()) {
    if (key == "potential") {
      if (value.is_string()) {
        c.potential_text = value.get<std::string>();
        c.potential_is_path = true;
      } else if (value.is_object()) {
        c.potential_text = value.dump();
        c.potential_is_path = false;
      } else {
        bad("potential", "must be an object or a file path");
      }
    } else if (key == "L") c.L = get_number(value, key);
    else if (key == "M") c.params.M = get_int(value, key);
    else if (key == "N") c.params.N = get_int(value, key);
    else if (key == "K") c.params.K = get_int(value, key);
    else if (key == "r") c.params.r = get_number(value, key);
    else if (key == "alpha") {
      c.params.alpha = get_number(value, key);
      c.alpha_given = true;
    } else if (key == "convention") {
      if (!value.is_string()) bad(key, "must be \"strictly_below\" or \"up_to\"");
      try {
        c.params.convention = parse_convention(value.get<std::string>());
      } catch (const ConfigError&) {
        bad(key, "must be \"strictly_below\" or \"up_to\"");
      }
    } else if (key == "strategy") {
      if (!value.is_string()) bad(key, "must be \"index\" or \"target\"");
      strategy = value.get<std::string>();
      if (strategy != "index" && strategy != "target") bad(key, "must be \"index\" or \"target\"");
    } else if (key == "index") index = get_int(value, key);
    else if (key == "target") target = get_number(value, key);
    else if (key == "lambda0") c.lambda0 = get_number(value, key);
    else if (key == "tol") c.tol = get_number(value, key);
    else if (key == "max_iter") c.max_iter = get_int(value, key);
    else if (key == "N_e") c.n_exact = get_int(value, key);
    else if (key == "norm_cutoff") c.norm_cutoff = get_int(value, key);
    else if (key == "s") c.s = get_number(value, key);
    else if (key == "reference") {
      if (!value.is_boolean()) bad(key, "must be a boolean");
      c.reference = value.get<bool>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) bad(key, "must be a nonnegative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "out") {
      if (!value.is_string()) bad(key, "must be a string");
      c.out = value.get<std::string>();
    } else if (key == "sweep") parse_sweep(value, c.sweep);
    else if (key == "audit") parse_audit(value, c.audit);
    else bad(key, "is not recognized");
  }
  if (strategy == "target") {
    if (!target) bad("target", "is required when strategy is \"target\"");
    c.strategy = Strategy::by_target(*target);
  } else {
    c.strategy = Strategy::by_index(index.value_or(1));
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

FourierPotential RunConfig::potential() const {
  if (!potential_is_path) return parse_potential(potential_text, L);
  std::filesystem::path p(potential_text);
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return load_potential(p.string(), L);
}

FixedPointOptions RunConfig::options() const { return {tol, max_iter, lambda0}; }

double RunConfig::family_t() const {
  const auto v = potential();
  return v.family() ? v.family()->t : std::numeric_limits<double>::quiet_NaN();
}

void RunConfig::validate() const {
  if (!(L > 0.0)) bad("L", "must be positive");
  if (params.M < 1) bad("M", "must be >= 1");
  if (params.N < params.M) bad("N", "must be >= M");
  if (params.K < 0) bad("K", "must be >= 0");
  if (!(params.r >= 0.0)) bad("r", "must be >= 0");
  if (!(params.alpha >= 0.0)) bad("alpha", "must be >= 0");
  if (strategy.kind == StrategyKind::ByIndex && strategy.index < 1) bad("index", "must be >= 1");
  if (!(tol > 0.0)) bad("tol", "must be positive");
  if (max_iter < 1) bad("max_iter", "must be >= 1");
  if (n_exact < 1) bad("N_e", "must be >= 1");
  if (norm_cutoff && *norm_cutoff < 1) bad("norm_cutoff", "must be >= 1");
  if (!(s >= 0.0)) bad("s", "must be >= 0");
  if (sweep.jobs < 1) bad("sweep.jobs", "must be >= 1");
  for (int m : sweep.m_values) {
    if (m < 1 || m > params.N) bad("sweep.M_values", "entries must be in [1, N]");
  }
  if (!sweep.m_values.empty() && sweep.axis == SweepAxis::M) bad("sweep.M_values", "cannot be combined with axis M");
  if (audit.fsmap_trials < 0) bad("audit.fsmap_trials", "must be >= 0");
  if (audit.perturbation_trials < 0) bad("audit.perturbation_trials", "must be >= 0");
  if (audit.perturbation_dim < 2) bad("audit.perturbation_dim", "must be >= 2");
  if (audit.max_order < 0) bad("audit.max_order", "must be >= 0");
  for (int m : audit.m_values) {
    if (m < 1) bad("audit.M_values", "entries must be >= 1");
  }
  try {
    (void)potential();
  } catch (const ConfigError& e) {
    bad("potential", std::string("is invalid: ") + e.what());
  }
}

std::string RunConfig::echo() const {
  json j;
  if (potential_is_path) j["potential"] = potential_text;
  else j["potential"] = json::parse(potential_text);
  j["L"] = L;
  j["M"] = params.M;
  j["N"] = params.N;
  j["K"] = params.K;
  j["r"] = params.r;
  if (alpha_given) j["alpha"] = params.alpha;
  j["convention"] = to_string(params.convention);
  if (strategy.kind == StrategyKind::ByIndex) {
    j["strategy"] = "index";
    j["index"] = strategy.index;
  } else {
    j["strategy"] = "target";
    j["target"] = strategy.target;
  }
  if (lambda0) j["lambda0"] = *lambda0;
  j["tol"] = tol;
  j["max_iter"] = max_iter;
  j["N_e"] = n_exact;
  j["norm_cutoff"] = regularity_cutoff();
  j["s"] = s;
  j["reference"] = reference;
  j["seed"] = seed;
  if (!out.empty()) j["out"] = out;
  json sw;
  if (sweep.axis) sw["axis"] = to_string(*sweep.axis);
  sw["grid"] = sweep.grid;
  if (!sweep.m_values.empty()) sw["M_values"] = sweep.m_values;
  j["sweep"] = sw;
  json au;
  au["fsmap_trials"] = audit.fsmap_trials;
  au["perturbation_trials"] = audit.perturbation_trials;
  au["perturbation_dim"] = audit.perturbation_dim;
  au["M_values"] = audit.m_values;
  au["max_order"] = audit.max_order;
  au["rhs_factor"] = audit.rhs_factor;
  j["audit"] = au;
  return j.dump();
}

}  // namespace fsm
