#pragma once

#include <map>
#include <string>
#include <vector>

#include "tonelli/types.hpp"

namespace tonelli {

/// Sections of key = value lines; '#' and ';' start comments. Unknown keys
/// are rejected by RunConfig, not by the parser.
using IniData = std::map<std::string, std::map<std::string, std::string>>;
IniData parse_ini(const std::string& text);
IniData parse_ini_file(const std::string& path);

/// One experiment run: which fixture, which operation, and the knobs every
/// operation reads. The seed fixes all random sampling in a run.
struct RunConfig {
  std::string fixture;
  std::string operation;
  int grid_resolution = 32;
  unsigned seed = 1;
  std::string output_dir = "tonelli-out";
  std::string exec_policy = "openmp";

  double flow_t = 1.0;
  std::vector<double> invariance_times = {1.0, 2.0, 3.0};
  double conjugate_horizon = 0.0;  // 0 = fixture default
  std::string green_side = "plus";
  std::vector<double> x0;      // stacked (q, p); empty = fixture seed
  std::vector<double> theta0;  // characteristic seed parameter
  std::string basemap = "sine:0.05";
  std::vector<long long> matrix = {2, 1, 1, 1};
  std::vector<long long> v0 = {1, 0};
  int homology_n = 100;

  std::map<std::string, double> tolerances;

  RunConfig();  // fills default tolerances

  static RunConfig from_file(const std::string& path);
  void apply(const IniData& ini);
  void apply_kv(const std::string& section, const std::string& key, const std::string& value);
  /// Throws on non-positive tolerances, bad resolutions or unknown operation.
  void validate() const;

  double tol(const std::string& name) const;  // throws on unknown tolerance name
};

std::vector<double> parse_number_list(const std::string& value);
std::vector<long long> parse_integer_list(const std::string& value);

}  // namespace tonelli
