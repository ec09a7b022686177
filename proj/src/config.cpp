#include "tonelli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tonelli {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

const std::vector<std::string> kOperations = {"analyze",        "flow",   "green",
                                              "conjugate",      "characteristic",
                                              "extend",         "homology",
                                              "report"};

}  // namespace

IniData parse_ini(const std::string& text) {
  IniData out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key");
    out[section][key] = value;
  }
  return out;
}

IniData parse_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ini(ss.str());
}

std::vector<double> parse_number_list(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  if (!in.eof()) throw Error("bad number list: " + value);
  return out;
}

std::vector<long long> parse_integer_list(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<long long> out;
  long long x;
  while (in >> x) out.push_back(x);
  if (!in.eof()) throw Error("bad integer list: " + value);
  return out;
}

RunConfig::RunConfig() {
  tolerances = {
      {"lagrangian", 1e-9},        {"kernel_direction", 1e-8},
      {"invariance_exact", 1e-9},  {"invariance_numeric", 1e-6},
      {"energy_drift", 1e-4},      {"green_residual", 1e-6},
      {"green_symmetry", 1e-9},    {"symplecticity", 1e-5},
      {"zero_section", 1e-10},     {"growth_rate", 1e-2},
      {"projective_limit", 1e-6},  {"closure", 1e-6},
  };
}

RunConfig RunConfig::from_file(const std::string& path) {
  RunConfig cfg;
  cfg.apply(parse_ini_file(path));
  return cfg;
}

void RunConfig::apply(const IniData& ini) {
  for (const auto& [section, kvs] : ini)
    for (const auto& [key, value] : kvs) apply_kv(section, key, value);
}

void RunConfig::apply_kv(const std::string& section, const std::string& key,
                         const std::string& value) {
  auto as_double = [&] {
    auto xs = parse_number_list(value);
    if (xs.size() != 1) throw Error("expected one number for " + section + "." + key);
    return xs[0];
  };
  if (section == "run" || section.empty()) {
    if (key == "fixture") fixture = value;
    else if (key == "operation") operation = value;
    else if (key == "seed") seed = static_cast<unsigned>(parse_integer_list(value).at(0));
    else if (key == "output_dir") output_dir = value;
    else if (key == "policy") exec_policy = value;
    else throw Error("unknown config key: " + section + "." + key);
    return;
  }
  if (section == "grid") {
    if (key == "resolution") grid_resolution = static_cast<int>(parse_integer_list(value).at(0));
    else throw Error("unknown config key: grid." + key);
    return;
  }
  if (section == "tolerances") {
    if (!tolerances.count(key)) throw Error("unknown tolerance: " + key);
    tolerances[key] = as_double();
    return;
  }
  if (section == "horizons") {
    if (key == "flow_t") flow_t = as_double();
    else if (key == "invariance") invariance_times = parse_number_list(value);
    else if (key == "conjugate") conjugate_horizon = as_double();
    else throw Error("unknown config key: horizons." + key);
    return;
  }
  if (section == "point") {
    if (key == "x0") x0 = parse_number_list(value);
    else if (key == "theta0") theta0 = parse_number_list(value);
    else throw Error("unknown config key: point." + key);
    return;
  }
  if (section == "green") {
    if (key == "side") green_side = value;
    else throw Error("unknown config key: green." + key);
    return;
  }
  if (section == "extend") {
    if (key == "basemap") basemap = value;
    else throw Error("unknown config key: extend." + key);
    return;
  }
  if (section == "homology") {
    if (key == "matrix") matrix = parse_integer_list(value);
    else if (key == "v0") v0 = parse_integer_list(value);
    else if (key == "n") homology_n = static_cast<int>(parse_integer_list(value).at(0));
    else throw Error("unknown config key: homology." + key);
    return;
  }
  throw Error("unknown config section: " + section);
}

void RunConfig::validate() const {
  if (std::find(kOperations.begin(), kOperations.end(), operation) == kOperations.end())
    throw Error("unknown operation: '" + operation + "'");
  if (grid_resolution < 2) throw Error("grid resolution must be at least 2");
  for (const auto& [name, value] : tolerances)
    if (!(value > 0)) throw Error("tolerance " + name + " must be positive");
  for (double t : invariance_times)
    if (!(t > 0)) throw Error("invariance times must be positive");
  if (homology_n < 1) throw Error("homology iteration count must be positive");
  if (matrix.size() != 4) throw Error("homology matrix needs 4 entries");
  if (v0.size() != 2) throw Error("homology v0 needs 2 entries");
}

double RunConfig::tol(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it == tolerances.end()) throw Error("unknown tolerance: " + name);
  return it->second;
}

}  // namespace tonelli
