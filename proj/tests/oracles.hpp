#pragma once

// Reference computations used only by tests. Nothing here calls into the
// library's clustering or metric code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Point = std::vector<double>;
using Points = std::vector<Point>;

inline double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return s;
}

struct LloydRun {
  std::vector<std::size_t> labels;
  Points centers;
  std::size_t iterations = 0;
  double sse = 0.0;
};

// Textbook Lloyd iteration: nearest center (lowest index on ties), then
// means. An empty cluster takes the point farthest from its own center.
inline LloydRun lloyd(const Points& x, Points centers, std::size_t max_iter) {
  const std::size_t n = x.size();
  const std::size_t k = centers.size();
  auto nearest = [&](const Points& ctr, std::vector<std::size_t>& lab, std::vector<double>& dist) {
    lab.assign(n, 0);
    dist.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = sq_dist(x[i], ctr[j]);
        if (d < best) {
          best = d;
          lab[i] = j;
        }
      }
      dist[i] = best;
    }
  };
  LloydRun run;
  std::vector<double> dist;
  nearest(centers, run.labels, dist);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    std::vector<std::size_t> members(k, 0);
    for (auto l : run.labels) members[l]++;
    for (std::size_t j = 0; j < k; ++j) {
      if (members[j] > 0) continue;
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (dist[i] > dist[far]) far = i;
      }
      members[run.labels[far]]--;
      run.labels[far] = j;
      members[j] = 1;
      dist[far] = 0.0;
    }
    Points fresh(k, Point(x[0].size(), 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < x[i].size(); ++c) fresh[run.labels[i]][c] += x[i][c];
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (double& v : fresh[j]) v /= static_cast<double>(members[j]);
    }
    centers = fresh;
    std::vector<std::size_t> next;
    nearest(centers, next, dist);
    run.iterations = it;
    const bool same = next == run.labels;
    run.labels = next;
    if (same) break;
  }
  run.centers = centers;
  run.sse = std::accumulate(dist.begin(), dist.end(), 0.0);
  return run;
}

// ARI from raw pair classification over all i < j.
inline double pair_count_ari(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  double both = 0, only_a = 0, only_b = 0, neither = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) both++;
      else if (sa) only_a++;
      else if (sb) only_b++;
      else neither++;
    }
  }
  const double num = 2.0 * (both * neither - only_a * only_b);
  const double den = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
  return num / den;
}

// Minimum of sum_j cost(j, sigma(j)) by recursive enumeration.
inline double enumerate_min(const std::function<double(std::size_t, std::size_t)>& cost,
                            std::size_t k) {
  std::vector<bool> used(k, false);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> go = [&](std::size_t row, double acc) {
    if (row == k) {
      best = std::min(best, acc);
      return;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (used[c]) continue;
      used[c] = true;
      go(row + 1, acc + cost(row, c));
      used[c] = false;
    }
  };
  go(0, 0.0);
  return best;
}

// Central finite difference of f at x along coordinate c.
inline double central_diff(const std::function<double(const Point&)>& f, Point x, std::size_t c,
                           double h) {
  const double x0 = x[c];
  x[c] = x0 + h;
  const double up = f(x);
  x[c] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

}  // namespace oracle
