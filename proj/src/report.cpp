#include "tonelli/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace tonelli {

namespace fs = std::filesystem;

bool Report::pass() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

void Report::add(const std::string& name, bool passed, double value, double tolerance,
                 const std::string& detail) {
  checks.push_back(CheckResult{name, passed, value, tolerance, detail});
}

void Report::add_bound(const std::string& name, double value, double tolerance,
                       const std::string& detail) {
  add(name, std::abs(value) <= tolerance, value, tolerance, detail);
}

std::string Report::to_json(bool with_timestamp) const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  if (with_timestamp) {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    j["generated_at"] = buf;
  }
  j["operation"] = operation;
  j["fixture"] = fixture;
  j["seed"] = seed;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : parameters) params[k] = v;
  j["parameters"] = params;
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    cj["value"] = c.value;
    cj["tolerance"] = c.tolerance;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    cs.push_back(cj);
  }
  j["checks"] = cs;
  j["warnings"] = warnings;
  j["pass"] = pass();
  return j.dump(2) + "\n";
}

void write_text_atomic(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_report(const Report& r, const std::string& dir) {
  write_text_atomic((fs::path(dir) / "summary.json").string(), r.to_json());
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  char buf[40];
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw Error("csv row width mismatch");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

MergedReport merge_reports(const std::string& dir) {
  MergedReport merged;
  if (!fs::exists(dir)) throw Error("report directory does not exist: " + dir);
  std::vector<fs::path> files;
  auto consider = [&files](const fs::path& p) {
    if (p.filename() == "summary.json") files.push_back(p);
  };
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) consider(entry.path());
    if (entry.is_directory())
      for (const auto& sub : fs::directory_iterator(entry.path()))
        if (sub.is_regular_file()) consider(sub.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no summary.json found under " + dir);
  for (const auto& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw Error("cannot parse " + f.string() + ": " + e.what());
    }
    bool ok = j.value("pass", false);
    merged.files.emplace_back(f.string(), ok);
    merged.pass = merged.pass && ok;
  }
  return merged;
}

}  // namespace tonelli
