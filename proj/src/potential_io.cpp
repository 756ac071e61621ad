#include "fsm/potential_io.hpp"
#include "fsm/errors.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace fsm {

namespace {

using json = nlohmann::json;

double number(const json& j, const char* field) {
  if (!j.is_number()) throw ConfigError(std::string("potential: field '") + field + "' must be a number");
  return j.get<double>();
}

int frequency_key(const std::string& key) {
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || key.empty()) {
    throw ConfigError("potential: field 'coeffs' has a non-integer frequency key '" + key + "'");
  }
  return n;
}

}  // namespace

FourierPotential parse_potential(const std::string& json_text, double default_period) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("potential: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("potential: document must be a JSON object");
  const double period = doc.contains("L") ? number(doc["L"], "L") : default_period;

  if (doc.contains("family")) {
    if (!doc["family"].is_string() || doc["family"].get<std::string>() != "Vt") {
      throw ConfigError("potential: field 'family' must be \"Vt\"");
    }
    if (!doc.contains("t")) throw ConfigError("potential: field 't' is required for the Vt family");
    PowerLawFamily fam{number(doc["t"], "t")};
    if (doc.contains("v0")) fam.v0 = number(doc["v0"], "v0");
    if (doc.contains("amplitude")) fam.amplitude = number(doc["amplitude"], "amplitude");
    for (const auto& [key, _] : doc.items()) {
      if (key != "family" && key != "t" && key != "v0" && key != "amplitude" && key != "L") {
        throw ConfigError("potential: unknown field '" + key + "'");
      }
    }
    return FourierPotential::power_law(period, fam);
  }

  if (!doc.contains("coeffs")) throw ConfigError("potential: field 'coeffs' or 'family' is required");
  const json& c = doc["coeffs"];
  if (!c.is_object()) throw ConfigError("potential: field 'coeffs' must be an object");
  std::map<int, cplx> coeffs;
  for (const auto& [key, value] : c.items()) {
    const int n = frequency_key(key);
    if (value.is_number()) {
      coeffs[n] = cplx(value.get<double>(), 0.0);
    } else if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
      coeffs[n] = cplx(value[0].get<double>(), value[1].get<double>());
    } else {
      throw ConfigError("potential: field 'coeffs." + key + "' must be [re, im]");
    }
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "coeffs" && key != "L") throw ConfigError("potential: unknown field '" + key + "'");
  }
  return FourierPotential::from_coefficients(period, coeffs);
}

FourierPotential load_potential(const std::string& path, double default_period) {
  std::ifstream in(path);
  if (!in) throw ConfigError("potential: cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_potential(ss.str(), default_period);
}

}  // namespace fsm
