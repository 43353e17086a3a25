#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bregpower/cluster.hpp"
#include "bregpower/simulate.hpp"

namespace bregpower {

enum class Method { Lloyd, BregmanHard, Power, BregmanPower };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
bool is_annealed(Method method);

struct FamilySpec {
  MixtureFamily family = MixtureFamily::Gaussian;
  double parameter = 1.0;
};

/**
 * A simulation grid. Every combination of family, dimension and cluster size
 * is one setting; every setting runs `trials` independent datasets, and each
 * dataset is clustered by every method (annealed methods once per s0) from a
 * single shared initialization.
 */
struct ExperimentConfig {
  std::string id = "custom";
  std::vector<FamilySpec> families;
  std::vector<std::size_t> dimensions{2};
  std::vector<std::size_t> cluster_sizes{100};
  std::vector<double> s0_grid{-0.2};
  std::vector<Method> methods{Method::Lloyd, Method::BregmanHard, Method::Power,
                              Method::BregmanPower};
  // Planar prototype centers; embedded per dimension with scale_separation.
  Matrix prototype;
  std::size_t trials = 250;
  std::uint64_t seed = 0;
  double eta = 1.1;
  double rel_tol = 1e-6;
  std::size_t max_iter = 500;
  // Record the best permutation-matched divergence to the true centers.
  bool centroid_recovery = false;
  // Wall-clock timings are the only nondeterministic output; off unless asked for.
  bool record_timing = false;
  // 0 uses the hardware concurrency.
  std::size_t threads = 1;

  void validate() const;
};

// Presets for experiments 1-4 with the given trial count and seed.
ExperimentConfig experiment_preset(int id, std::size_t trials, std::uint64_t seed);

struct CellReport {
  std::string method;
  std::string setting;
  std::string family;
  double parameter = 0.0;
  std::size_t dimension = 0;
  std::size_t n_per_cluster = 0;
  std::optional<double> s0;
  double mean_ari = 0.0;
  double sd_ari = 0.0;  // standard deviation of the mean
  double mean_runtime_s = 0.0;
  std::size_t trials = 0;  // successful trials
  std::size_t failed = 0;
  std::optional<double> best_divergence;
};

struct TrialReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<CellReport> cells;
};

// Dataset and shared initialization for one trial of one setting. Exposed so
// callers can check the matched-initialization contract.
struct TrialInput {
  LabeledDataset sample;
  Matrix true_centers;
  Generator generator = Generator::squared_euclidean();
  Centroids init;
};

TrialInput prepare_trial(const ExperimentConfig& cfg, std::size_t setting, std::size_t trial);
std::size_t setting_count(const ExperimentConfig& cfg);

TrialReport run_experiment(const ExperimentConfig& cfg);

}  // namespace bregpower
