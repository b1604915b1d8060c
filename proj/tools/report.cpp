#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hypercyc/errors.hpp"
#include "json.hpp"

namespace hypercyc::app {

using json = nlohmann::ordered_json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool Report::all_pass() const {
  for (const auto& r : records_)
    if (r.gating && !r.pass) return false;
  return true;
}

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(num(x)); }

}  // namespace

std::string Report::to_json() const {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  json j;
  j["metadata"] = {{"command", command},
                   {"version", HYPERCYC_VERSION},
                   {"config_hash", hash},
                   {"seed", seed},
                   {"group", group},
                   {"wall_time", wall_time}};
  json recs = json::array();
  for (const auto& r : records_) {
    json o = {{"name", r.name}, {"anchor", r.anchor}, {"bound", number(r.bound)},
              {"observed", number(r.observed)}};
    o["ci"] = r.ci ? json::array({number(r.ci->lo), number(r.ci->hi)}) : json(nullptr);
    o["pass"] = r.pass;
    o["gating"] = r.gating;
    recs.push_back(o);
  }
  j["records"] = recs;
  j["pass"] = all_pass();
  return j.dump(2) + "\n";
}

void Report::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!(out << body)) throw ConfigError("cannot write '" + (fs::path(dir) / name).string() + "'");
  };
  put("report.json", to_json());
  for (const auto& [name, body] : files_) put(name, body);
}

}  // namespace hypercyc::app
