// Runs the twelve acceptance criteria and prints one line per criterion.
//   acceptance            all criteria, exit 1 if any fails
//   acceptance --only N   criterion N only

#include <omp.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "hypercyc/errors.hpp"
#include "json.hpp"
#include "pipelines.hpp"

using namespace hypercyc;
using namespace hypercyc::app;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// gating records whose name starts with one of the prefixes
struct Tally {
  std::size_t total = 0, failed = 0;
  std::vector<std::string> failures;
  bool ok() const { return total > 0 && failed == 0; }
  std::string str() const {
    std::string s = std::to_string(total - failed) + "/" + std::to_string(total) + " checks";
    for (std::size_t i = 0; i < failures.size() && i < 3; ++i) s += (i ? ", " : "; failed: ") + failures[i];
    return s;
  }
};

Tally tally(const Report& r, const std::vector<std::string>& prefixes) {
  Tally t;
  for (const auto& rec : r.records()) {
    if (!rec.gating) continue;
    bool hit = false;
    for (const auto& p : prefixes) hit = hit || rec.name.rfind(p, 0) == 0;
    if (!hit) continue;
    ++t.total;
    if (!rec.pass) {
      ++t.failed;
      t.failures.push_back(rec.name);
    }
  }
  return t;
}

const Record* find(const Report& r, const std::string& name) {
  for (const auto& rec : r.records())
    if (rec.name == name) return &rec;
  return nullptr;
}

const char* kZ = R"({"seed": 20240517, "group": {"kind": "integers"}, "weight": {"q": 0.5, "n_max": 40},
                    "system": {"kind": "bernoulli"}, "model": {"stages": 4}})";

const char* kF2 = R"({"seed": 7, "group": {"kind": "free", "d": 2}, "weight": {"q": 0.5, "n_max": 11},
                     "norms": {"trials": 10000, "ratio_max_len": 3, "subgroup": false}})";

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  auto z = run_pipeline("norms", parse_config(kZ));
  auto f = run_pipeline("norms", parse_config(kF2));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto tz = tally(z, {"norms.S_"}), tf = tally(f, {"norms.S_"});
  double worst_z = 0, worst_f = 0;
  for (const auto& r : z.records())
    if (r.name.rfind("norms.S_", 0) == 0) worst_z = std::max(worst_z, r.observed / r.bound);
  for (const auto& r : f.records())
    if (r.name.rfind("norms.S_", 0) == 0) worst_f = std::max(worst_f, r.observed / r.bound);
  return {tz.ok() && tf.ok() && secs < 30,
          "Z " + tz.str() + " (max ratio/bound " + fmt("%.4f", worst_z) + "), F2 " + tf.str() +
              " (max ratio/bound " + fmt("%.4f", worst_f) + "), " + fmt("%.1f", secs) + " s"};
}

Outcome c2() {
  auto z = run_pipeline("norms", parse_config(kZ));
  auto f = run_pipeline("norms", parse_config(kF2));
  auto tz = tally(z, {"norms.ratio_len"}), tf = tally(f, {"norms.ratio_len"});
  bool lens = find(z, "norms.ratio_len3.upper") && find(f, "norms.ratio_len3.upper");
  return {tz.ok() && tf.ok() && lens, "Z " + tz.str() + ", F2 " + tf.str() + ", |b| <= 3"};
}

Outcome c3() {
  auto cfg = parse_config(R"({"seed": 20240517, "group": {"kind": "integers"},
                              "jrt": {"rotation_steps": 20, "bernoulli_steps": 12, "samples": 2000,
                                      "ratio_tolerance": 0.05, "sigmas": 4}})");
  auto r = run_pipeline("jrt", cfg);
  auto rot = tally(r, {"jrt.rotation.ratio"}), ber = tally(r, {"jrt.bernoulli.variance"});
  auto all = tally(r, {"jrt."});
  std::string d = "rotation ratio " + rot.str() + ", Bernoulli variance " + ber.str();
  if (auto v = find(r, "jrt.bernoulli.variance")) d += fmt(" (worst z %.2f)", v->observed);
  return {rot.ok() && ber.ok() && all.ok(), d};
}

Outcome c4() {
  auto cfg = parse_config(R"({"seed": 20240517, "group": {"kind": "integers"},
                              "tower": {"N": 3, "eta": 0.05, "samples": 100000}})");
  auto r = run_pipeline("tower", cfg);
  auto t = tally(r, {"tower."});
  const auto* col = find(r, "tower.collisions");
  const auto* m = find(r, "tower.measure");
  std::string d = t.str();
  if (col && m) d += fmt(", collisions %.0f", col->observed) + fmt(", CI upper %.5f", m->observed) +
                     fmt(" < eta/2 = %.4f", m->bound);
  return {t.ok(), d};
}

Outcome c5() {
  auto r = run_pipeline("build", parse_config(kZ));
  auto t = tally(r, {"build."});
  double worst_l4 = 0;
  int stages = 0;
  for (const auto& rec : r.records())
    if (rec.name.find(".l4_mc") != std::string::npos) {
      worst_l4 = std::max(worst_l4, rec.observed);
      ++stages;
    }
  // ||f_n||_4 < 1 iff E f_n^4 < 1
  bool l4 = stages == 4 && worst_l4 < 1;
  return {t.ok() && l4, "4 stages, " + t.str() + fmt(", max ||f_n||_4 <= %.4f", std::pow(worst_l4, 0.25))};
}

Outcome c6() {
  auto cfg = parse_config(R"({"seed": 20240517, "group": {"kind": "integers"}, "model": {"stages": 4},
                              "support": {"equivariance_samples": 1000, "shift_radius": 2}})");
  auto r = run_pipeline("support", cfg);
  const auto* eq = find(r, "support.equivariance");
  const auto* cmp = find(r, "support.equivariance_compared");
  if (!eq) return {false, "no equivariance record"};
  return {eq->pass && eq->observed == 0,
          fmt("%.0f mismatches", eq->observed) + (cmp ? fmt(" over %.0f coefficients", cmp->observed) : "") +
              ", 1000 samples, h in B_2"};
}

Outcome c7() {
  auto r = run_pipeline("support", parse_config(kZ));
  auto hit = tally(r, {"support.level"}), all = tally(r, {"support."});
  return {all.ok() && hit.ok(), "hit/symdiff/covers " + hit.str() + ", all support " + all.str()};
}

Outcome c8() {
  auto cfg = parse_config(R"({"seed": 20240517, "group": {"kind": "integers"}, "model": {"stages": 4},
                              "orbit": {"steps": 10000, "level": 1}})");
  auto r = run_pipeline("orbit", cfg);
  const auto* fr = find(r, "orbit.frequency");
  const auto* co = find(r, "orbit.consistency");
  if (!fr || !co) return {false, "missing orbit records"};
  std::string d = fmt("frequency CI lower %.4f", fr->observed);
  if (fr->ci) d += fmt(" [%.4f,", fr->ci->lo) + fmt(" %.4f]", fr->ci->hi);
  d += co->pass ? ", consistent with mu(phi in U_1)" : ", inconsistent with mu(phi in U_1)";
  return {fr->pass && fr->observed > 0 && co->pass, d};
}

Outcome c9() {
  auto cfg = parse_config(R"({"seed": 20240517, "group": {"kind": "integers"},
                              "feldman": {"points": 1000, "depth": 30, "tolerance": 1e-12}})");
  auto r = run_pipeline("feldman", cfg);
  const auto* c = find(r, "feldman.conjugacy");
  if (!c) return {false, "no conjugacy record"};
  return {c->pass && c->observed < 1e-12 && tally(r, {"feldman."}).ok(),
          fmt("max conjugacy error %.3g", c->observed) + " over 1000 points, 30 coordinates"};
}

Outcome c10() {
  auto cfg = parse_config(R"({"seed": 11, "group": {"kind": "locally_finite"},
                              "continuous": {"k": 1, "ell": 2, "grid_step": 0.001, "quad_points": 10000}})");
  auto r = run_pipeline("continuous", cfg);
  const auto* q = find(r, "continuous.psi_quadrature");
  const auto* u = find(r, "continuous.u");
  const auto* D = find(r, "continuous.D");
  const auto* w = find(r, "continuous.window_domination");
  if (!q || !u || !D || !w) return {false, "missing records"};
  bool ok = q->pass && q->observed < 1e-6 && u->pass && std::abs(u->observed - 1) < 1e-12 && D->pass &&
            std::abs(D->observed - 2) < 1e-12 && w->pass && w->observed == 0;
  return {ok, fmt("quadrature error %.2g", q->observed) + fmt(", u = %.6g", u->observed) +
                  fmt(", D = %.6g", D->observed) + fmt(", grid violations %.0f", w->observed)};
}

Outcome c11() {
  auto cfg = parse_config(R"({"seed": 11, "group": {"kind": "locally_finite"},
                              "continuous": {"chain_n_max": 10, "g0_samples": 20}})");
  auto r = run_pipeline("continuous", cfg);
  const auto* lam = find(r, "continuous.chain_lambda");
  const auto* dom = find(r, "continuous.chain_domination");
  const auto* cor = find(r, "continuous.chain_domination_corrected");
  if (!lam || !dom) return {false, "missing records"};
  std::string d = fmt("lambda identity max error %.2g", lam->observed) +
                  fmt(", violations of C_g0 = 1/p_1 + [K_m0:K_1] on K_10: %.0f", dom->observed);
  if (cor) d += fmt(" (corrected constant: %.0f)", cor->observed);
  return {lam->pass && dom->pass && dom->observed == 0, d};
}

std::map<std::string, std::string> read_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string body = ss.str();
    if (e.path().filename() == "report.json") {
      auto j = nlohmann::ordered_json::parse(body);
      j["metadata"].erase("wall_time");
      body = j.dump(2);
    }
    files[e.path().filename().string()] = body;
  }
  return files;
}

Outcome c12() {
  auto cfg = parse_config(kZ);
  const auto base = std::filesystem::temp_directory_path() /
                    ("hypercyc_determinism_" + std::to_string(::getpid()));
  std::filesystem::remove_all(base);
  const int hw = omp_get_max_threads();
  omp_set_num_threads(1);
  run_and_write("all", cfg, (base / "a").string());
  omp_set_num_threads(std::max(2, hw));
  run_and_write("all", cfg, (base / "b").string());
  omp_set_num_threads(hw);
  auto a = read_dir(base / "a"), b = read_dir(base / "b");
  std::size_t differ = 0;
  std::string first;
  for (const auto& [name, body] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != body) {
      ++differ;
      if (first.empty()) first = name;
    }
  }
  differ += b.size() > a.size() ? b.size() - a.size() : 0;
  std::filesystem::remove_all(base);
  std::string d = std::to_string(a.size()) + " files compared, 1 vs " + std::to_string(std::max(2, hw)) +
                  " threads, " + std::to_string(differ) + " differ";
  if (!first.empty()) d += " (first: " + first + ")";
  return {differ == 0 && a.size() > 1, d};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> cs = {
      {"operator-norm bound on Z and F2", c1},
      {"weight-ratio bounds for |b| <= 3", c2},
      {"averaging-operator convergence", c3},
      {"tower validity", c4},
      {"model stage invariants", c5},
      {"equivariance", c6},
      {"full support and isomorphism approximation", c7},
      {"orbit visit frequency", c8},
      {"circle-rotation baseline", c9},
      {"domination on the real line", c10},
      {"domination on the locally finite chain", c11},
      {"determinism", c12},
  };
  return cs;
}

bool run_one(std::size_t i) {
  const auto& c = criteria()[i - 1];
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i, c.title, o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> which;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      long n = std::strtol(argv[++i], nullptr, 10);
      if (n < 1 || n > static_cast<long>(criteria().size())) {
        std::fprintf(stderr, "criterion must be 1..%zu\n", criteria().size());
        return 2;
      }
      which.push_back(static_cast<std::size_t>(n));
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  if (which.empty())
    for (std::size_t i = 1; i <= criteria().size(); ++i) which.push_back(i);
  bool ok = true;
  for (auto i : which) ok = run_one(i) && ok;
  return ok ? 0 : 1;
}
