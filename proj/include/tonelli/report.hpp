#pragma once

#include <map>
#include <string>
#include <vector>

#include "tonelli/types.hpp"

namespace tonelli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// One operation's result set. Serialized as a schema-versioned JSON object;
/// the timestamp lives in its own field so reports can be compared byte for
/// byte after dropping it.
struct Report {
  std::string operation;
  std::string fixture;
  unsigned seed = 0;
  std::map<std::string, std::string> parameters;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool pass() const;
  void add(const std::string& name, bool passed, double value, double tolerance,
           const std::string& detail = "");
  /// Convenience: passed iff |value| <= tolerance.
  void add_bound(const std::string& name, double value, double tolerance,
                 const std::string& detail = "");

  std::string to_json(bool with_timestamp = true) const;
};

/// Write via a temp file plus rename so readers never see partial content.
void write_text_atomic(const std::string& path, const std::string& content);

/// dir is created if missing; writes dir/summary.json.
void write_report(const Report& r, const std::string& dir);

/// Numeric table with a header row; doubles serialized round-trip exact.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

/// Reads every summary.json directly under dir (depth 1 subdirectories
/// included), returns the merged pass verdict and per-file summaries.
struct MergedReport {
  bool pass = true;
  std::vector<std::pair<std::string, bool>> files;
};
MergedReport merge_reports(const std::string& dir);

}  // namespace tonelli
