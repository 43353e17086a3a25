#pragma once

#include <span>
#include <vector>

#include "bregpower/divergence.hpp"
#include "bregpower/matrix.hpp"

namespace bregpower {

// Adjusted Rand index from the pair-counting contingency table. When the
// chance-corrected denominator vanishes the result is 1.0 for identical
// partitions (up to relabeling) and 0.0 otherwise.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

// A permutation sigma minimizing sum_j cost(j, sigma(j)) for a square cost
// matrix, together with that minimum.
struct Matching {
  std::vector<std::size_t> assignment;
  double cost = 0.0;
};

// Brute force over all k! permutations, first optimum in lexicographic order.
Matching match_exhaustive(const Matrix& cost);
// Hungarian method, O(k^3).
Matching match_hungarian(const Matrix& cost);
// Exhaustive for k <= 8, Hungarian beyond.
Matching match_min_cost(const Matrix& cost);

// min over row permutations P of |t1 - P t2|_F.
double centroid_dist(const Centroids& t1, const Centroids& t2);

// min over permutations sigma of sum_j d(t_true_j, t_fit_sigma(j)).
double centroid_divergence(const Generator& gen, const Centroids& t_true, const Centroids& t_fit);

// (1/n) sum_i d(x_i, mean).
double bregman_information(const Generator& gen, const Dataset& data);

}  // namespace bregpower
