#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypercyc/stats.hpp"

namespace hypercyc::app {

struct Record {
  std::string name;
  std::string anchor;   // the inequality or identity being checked
  double bound = 0.0;
  double observed = 0.0;
  std::optional<Interval> ci;
  bool pass = false;
  bool gating = true;   // informational records never change the exit code
};

class Report {
 public:
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string group;
  double wall_time = 0.0;

  Record& add(Record r) {
    records_.push_back(std::move(r));
    return records_.back();
  }
  Record& check(std::string name, std::string anchor, double bound, double observed, bool pass,
                std::optional<Interval> ci = {}) {
    return add({std::move(name), std::move(anchor), bound, observed, ci, pass, true});
  }
  Record& info(std::string name, std::string anchor, double bound, double observed, bool holds,
               std::optional<Interval> ci = {}) {
    return add({std::move(name), std::move(anchor), bound, observed, ci, holds, false});
  }
  void table(const std::string& name, std::string csv) { files_.emplace_back(name + ".csv", std::move(csv)); }
  void attach(std::string filename, std::string body) { files_.emplace_back(std::move(filename), std::move(body)); }

  const std::vector<Record>& records() const { return records_; }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
  bool all_pass() const;
  std::string to_json() const;
  // report.json plus every attached file; throws ConfigError when the directory is unusable
  void write(const std::string& dir) const;

 private:
  std::vector<Record> records_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// %.17g
std::string num(double x);

}  // namespace hypercyc::app
