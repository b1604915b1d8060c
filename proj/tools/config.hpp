#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypercyc/group.hpp"
#include "hypercyc/measure.hpp"
#include "hypercyc/model.hpp"

namespace hypercyc::app {

struct NormsSection {
  std::size_t trials = 10000;
  int ratio_max_len = 3;
  bool subgroup = true;  // Z -> F_2 restriction pipeline, free groups only
};

struct JrtSection {
  int rotation_steps = 20;
  int bernoulli_steps = 12;
  std::size_t samples = 2000;
  double ratio_tolerance = 0.05;
  double sigmas = 4.0;
};

struct TowerSection {
  int N = 3;
  double eta = 0.05;
  std::size_t samples = 100000;
  std::size_t conditional_samples = 10000;
  std::optional<int> marker;
};

struct SupportSection {
  std::size_t samples = 20000;
  std::size_t base_samples = 1000;
  std::size_t equivariance_samples = 1000;
  int shift_radius = 2;
  int N_trunc = 0;  // 0: largest stage N
};

struct OrbitSection {
  std::size_t steps = 10000;
  int level = 1;
  std::uint64_t draw = 0;
  std::size_t measure_samples = 20000;
};

struct FeldmanSection {
  double alpha = 0.41421356237309503;  // sqrt(2) - 1
  int depth = 30;
  std::size_t points = 1000;
  double tolerance = 1e-12;
};

struct ContinuousSection {
  double k = 1.0;
  double ell = 2.0;
  double grid_step = 1e-3;
  std::size_t quad_points = 10000;
  double C = 2.0;
  int chain_n_max = 10;
  std::size_t g0_samples = 20;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  GroupSpec group = GroupSpec::integers();
  WeightParams weight;
  std::string system = "bernoulli";  // or "rotation"
  std::vector<double> alpha;         // rotation angles, one per coordinate
  NormsSection norms;
  JrtSection jrt;
  TowerSection tower;
  ModelConfig model;
  std::string model_file;  // reuse a saved model for support/orbit
  SupportSection support;
  OrbitSection orbit;
  FeldmanSection feldman;
  ContinuousSection continuous;

  std::string canonical;  // normalized JSON, the input of the config hash
};

// throws ConfigError on unreadable files, unknown keys, bad ranges and a missing seed
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = {});

std::uint64_t fnv1a(const std::string& s);

}  // namespace hypercyc::app
