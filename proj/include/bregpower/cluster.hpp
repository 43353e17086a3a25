#pragma once

#include <cstdint>
#include <vector>

#include "bregpower/divergence.hpp"
#include "bregpower/matrix.hpp"
#include "bregpower/power_mean.hpp"

namespace bregpower {

// Column sums of MM weights below this are treated as underflowed; the
// center is then held in place for that iteration.
inline constexpr double kWeightFloor = 1e-300;

// Geometric schedule s_{m+1} = eta * s_m, clamped at min_exponent.
struct AnnealingSchedule {
  double s0 = -1.0;
  double eta = 1.1;
  double min_exponent = kMinExponent;

  void validate() const;
  double next(double s) const;
};

enum class InitStrategy { UniformRange, SamplePoints };

struct FitOptions {
  AnnealingSchedule schedule;
  std::size_t max_iter = 500;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  InitStrategy init = InitStrategy::UniformRange;

  void validate() const;
};

struct FitResult {
  Centroids centroids;
  Labels labels;
  // Entry 0 is the objective at the initial centers; entry m follows the
  // m-th update. Each value is measured at the exponent in s_trace.
  std::vector<double> objective_trace;
  std::vector<double> s_trace;
  std::size_t iterations = 0;
  double wall_time = 0.0;
};

Centroids init_centers(const Dataset& data, std::size_t k, std::uint64_t seed,
                       InitStrategy strategy, const Generator& gen = Generator::squared_euclidean());

// Rows are the gradients of M_s at each row of `div`. Entries of div must be
// positive (divergence_matrix floors them).
Matrix mm_weights(const Matrix& div, double s);

// Center j becomes sum_i w_ij x_i / sum_i w_ij. Throws DegenerateCluster if
// a column sum is below kWeightFloor.
Centroids update_centers(const Dataset& data, const Matrix& weights);

// Same update, but a center whose weight column underflowed keeps its value
// from `previous`.
Centroids update_centers(const Dataset& data, const Matrix& weights, const Centroids& previous);

// argmin_j d(x_i, theta_j), ties to the lowest index.
Labels assign(const Dataset& data, const Centroids& centers, const Generator& gen);

// sum_i M_s(d(x_i, theta_1), ..., d(x_i, theta_k)) on floored divergences.
double objective(const Dataset& data, const Centroids& centers, double s, const Generator& gen);

// sum_i min_j d(x_i, theta_j).
double hard_objective(const Dataset& data, const Centroids& centers, const Generator& gen);

// Bregman power k-means from explicit initial centers. With the squared
// Euclidean generator this is Euclidean power k-means.
FitResult fit_annealed(const Dataset& data, const Centroids& initial, const Generator& gen,
                       const FitOptions& opts);
FitResult fit_annealed(const Dataset& data, std::size_t k, const Generator& gen,
                       const FitOptions& opts);

// Bregman hard clustering; the squared Euclidean generator gives Lloyd's algorithm.
FitResult fit_hard(const Dataset& data, const Centroids& initial, const Generator& gen,
                   const FitOptions& opts);
FitResult fit_hard(const Dataset& data, std::size_t k, const Generator& gen,
                   const FitOptions& opts);

}  // namespace bregpower
