#include "bregpower/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "bregpower/errors.hpp"

namespace bregpower {

namespace {

constexpr std::size_t kExhaustiveLimit = 8;

double choose2(double n) { return n * (n - 1.0) / 2.0; }

void check_square(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw ShapeMismatch("matching cost must be square");
}

void check_same_shape(const Centroids& a, const Centroids& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("centroid sets have shapes " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

}  // namespace

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("label vectors have lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows;
  std::map<std::size_t, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, n] : table) index += choose2(n);
  double sum_rows = 0.0;
  for (const auto& [key, n] : rows) sum_rows += choose2(n);
  double sum_cols = 0.0;
  for (const auto& [key, n] : cols) sum_cols += choose2(n);

  const double total = choose2(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) {
    // Identical partitions have one table cell per row and per column.
    const bool identical = table.size() == rows.size() && table.size() == cols.size();
    return identical ? 1.0 : 0.0;
  }
  return (index - expected) / denom;
}

Matching match_exhaustive(const Matrix& cost) {
  check_square(cost);
  const std::size_t k = cost.rows();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Matching best{perm, std::numeric_limits<double>::infinity()};
  do {
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += cost(j, perm[j]);
    if (total < best.cost) best = {perm, total};
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (k == 0) best.cost = 0.0;
  return best;
}

Matching match_hungarian(const Matrix& cost) {
  check_square(cost);
  const std::size_t k = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials-based shortest augmenting path; 1-based with a sentinel column 0.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0), minv(k + 1);
  std::vector<std::size_t> owner(k + 1, 0), way(k + 1, 0);
  std::vector<bool> used(k + 1);
  for (std::size_t row = 1; row <= k; ++row) {
    owner[0] = row;
    std::size_t col0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[col0] = true;
      const std::size_t r = owner[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= k; ++c) {
        if (used[c]) continue;
        const double reduced = cost(r - 1, c - 1) - u[r] - v[c];
        if (reduced < minv[c]) {
          minv[c] = reduced;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= k; ++c) {
        if (used[c]) {
          u[owner[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  Matching m;
  m.assignment.assign(k, 0);
  for (std::size_t c = 1; c <= k; ++c) m.assignment[owner[c] - 1] = c - 1;
  for (std::size_t j = 0; j < k; ++j) m.cost += cost(j, m.assignment[j]);
  return m;
}

Matching match_min_cost(const Matrix& cost) {
  return cost.rows() <= kExhaustiveLimit ? match_exhaustive(cost) : match_hungarian(cost);
}

double centroid_dist(const Centroids& t1, const Centroids& t2) {
  check_same_shape(t1, t2);
  Matrix cost(t1.rows(), t2.rows());
  for (std::size_t a = 0; a < t1.rows(); ++a) {
    for (std::size_t b = 0; b < t2.rows(); ++b) {
      double sq = 0.0;
      for (std::size_t c = 0; c < t1.cols(); ++c) {
        const double d = t1(a, c) - t2(b, c);
        sq += d * d;
      }
      cost(a, b) = sq;
    }
  }
  return std::sqrt(std::max(0.0, match_min_cost(cost).cost));
}

double centroid_divergence(const Generator& gen, const Centroids& t_true, const Centroids& t_fit) {
  check_same_shape(t_true, t_fit);
  Matrix cost(t_true.rows(), t_fit.rows());
  for (std::size_t a = 0; a < t_true.rows(); ++a) {
    for (std::size_t b = 0; b < t_fit.rows(); ++b) {
      cost(a, b) = gen.divergence(t_true.row(a), t_fit.row(b));
    }
  }
  return match_min_cost(cost).cost;
}

double bregman_information(const Generator& gen, const Dataset& data) {
  if (data.rows() == 0) throw DomainError("Bregman information of an empty dataset");
  std::vector<double> mean(data.cols(), 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t c = 0; c < data.cols(); ++c) mean[c] += data(i, c);
  }
  for (double& m : mean) m /= static_cast<double>(data.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) total += gen.divergence(data.row(i), mean);
  return total / static_cast<double>(data.rows());
}

}  // namespace bregpower
