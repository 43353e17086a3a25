#include "bregpower/cluster.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "bregpower/errors.hpp"

namespace bregpower {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_k(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) {
    throw InvalidK("k must satisfy 1 <= k <= n; got k = " + std::to_string(k) +
                   ", n = " + std::to_string(n));
  }
}

void check_inputs(const Dataset& data, const Centroids& centers, const Generator& gen) {
  check_k(data.rows(), centers.rows());
  if (data.cols() != centers.cols() || data.cols() == 0) {
    throw ShapeMismatch("data and centers must share a positive column count");
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (double v : data.row(i)) {
      if (!gen.in_data_domain(v)) {
        throw DomainError(gen.name() + ": data row " + std::to_string(i) + " outside domain");
      }
    }
  }
  for (std::size_t j = 0; j < centers.rows(); ++j) {
    for (double v : centers.row(j)) {
      if (!gen.in_interior(v)) {
        throw DomainError(gen.name() + ": center " + std::to_string(j) +
                          " outside domain interior");
      }
    }
  }
}

double relative_change(double before, double after) {
  return std::abs(before - after) / (1.0 + std::abs(before));
}

double objective_from(const Matrix& div, double s) {
  double total = 0.0;
  for (std::size_t i = 0; i < div.rows(); ++i) total += power_mean(div.row(i), s);
  return total;
}

double hard_objective_from(const Matrix& div) {
  double total = 0.0;
  for (std::size_t i = 0; i < div.rows(); ++i) {
    const auto row = div.row(i);
    total += *std::min_element(row.begin(), row.end());
  }
  return total;
}

Labels argmin_rows(const Matrix& div) {
  Labels labels(div.rows());
  for (std::size_t i = 0; i < div.rows(); ++i) {
    const auto row = div.row(i);
    labels[i] = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
  }
  return labels;
}

}  // namespace

void AnnealingSchedule::validate() const {
  if (!(s0 < 0.0)) throw InvalidExponent("s0 must be negative");
  if (!(eta > 1.0)) throw InvalidExponent("eta must exceed 1");
  if (!(min_exponent <= s0)) throw InvalidExponent("exponent cap must not exceed s0");
}

double AnnealingSchedule::next(double s) const { return std::max(eta * s, min_exponent); }

void FitOptions::validate() const {
  schedule.validate();
  if (max_iter < 1) throw InvalidSpec("max_iter must be at least 1");
  if (!(rel_tol > 0.0)) throw InvalidSpec("rel_tol must be positive");
}

Centroids init_centers(const Dataset& data, std::size_t k, std::uint64_t seed,
                       InitStrategy strategy, const Generator& gen) {
  check_k(data.rows(), k);
  std::mt19937_64 rng(seed);
  Centroids centers(k, data.cols());
  if (strategy == InitStrategy::SamplePoints) {
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, order.size() - 1);
      std::swap(order[j], order[pick(rng)]);
      std::copy_n(data.row(order[j]).begin(), data.cols(), centers.row(j).begin());
    }
    return centers;
  }
  std::vector<double> lo(data.cols(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(data.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      lo[c] = std::min(lo[c], data(i, c));
      hi[c] = std::max(hi[c], data(i, c));
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      std::uniform_real_distribution<double> draw(lo[c], hi[c]);
      centers(j, c) = gen.clamp_to_interior(draw(rng));
    }
  }
  return centers;
}

Matrix mm_weights(const Matrix& div, double s) {
  Matrix w(div.rows(), div.cols());
  for (std::size_t i = 0; i < div.rows(); ++i) power_mean_grad(div.row(i), s, w.row(i));
  return w;
}

namespace {

// Returns false for columns whose weight sum underflowed.
std::vector<bool> weighted_means(const Dataset& data, const Matrix& weights, Centroids& out) {
  if (weights.rows() != data.rows()) {
    throw ShapeMismatch("weights have " + std::to_string(weights.rows()) + " rows, data has " +
                        std::to_string(data.rows()));
  }
  const std::size_t k = weights.cols();
  const std::size_t p = data.cols();
  std::vector<double> sums(k, 0.0);
  Matrix acc(k, p);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const double w = weights(i, j);
      sums[j] += w;
      auto a = acc.row(j);
      for (std::size_t c = 0; c < p; ++c) a[c] += w * x[c];
    }
  }
  std::vector<bool> ok(k, true);
  for (std::size_t j = 0; j < k; ++j) {
    if (!(sums[j] >= kWeightFloor)) {
      ok[j] = false;
      continue;
    }
    for (std::size_t c = 0; c < p; ++c) out(j, c) = acc(j, c) / sums[j];
  }
  return ok;
}

}  // namespace

Centroids update_centers(const Dataset& data, const Matrix& weights) {
  Centroids out(weights.cols(), data.cols());
  const auto ok = weighted_means(data, weights, out);
  for (std::size_t j = 0; j < ok.size(); ++j) {
    if (!ok[j]) throw DegenerateCluster("weight column " + std::to_string(j) + " underflowed");
  }
  return out;
}

Centroids update_centers(const Dataset& data, const Matrix& weights, const Centroids& previous) {
  Centroids out = previous;
  weighted_means(data, weights, out);
  return out;
}

Labels assign(const Dataset& data, const Centroids& centers, const Generator& gen) {
  return argmin_rows(divergence_matrix(gen, data, centers));
}

double objective(const Dataset& data, const Centroids& centers, double s, const Generator& gen) {
  return objective_from(divergence_matrix(gen, data, centers), s);
}

double hard_objective(const Dataset& data, const Centroids& centers, const Generator& gen) {
  return hard_objective_from(divergence_matrix(gen, data, centers));
}

FitResult fit_annealed(const Dataset& data, const Centroids& initial, const Generator& gen,
                       const FitOptions& opts) {
  const auto start = Clock::now();
  opts.validate();
  check_inputs(data, initial, gen);

  FitResult result;
  result.centroids = initial;
  double s = opts.schedule.s0;
  Matrix div = divergence_matrix(gen, data, result.centroids);
  double f = objective_from(div, s);
  result.objective_trace.push_back(f);
  result.s_trace.push_back(s);

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    const Matrix w = mm_weights(div, s);
    result.centroids = update_centers(data, w, result.centroids);
    const double s_next = opts.schedule.next(s);
    div = divergence_matrix(gen, data, result.centroids);
    const double f_next = objective_from(div, s_next);
    result.objective_trace.push_back(f_next);
    result.s_trace.push_back(s_next);
    result.iterations = it;
    if (relative_change(f, f_next) < opts.rel_tol) break;
    f = f_next;
    s = s_next;
  }
  result.labels = argmin_rows(div);
  result.wall_time = seconds_since(start);
  return result;
}

FitResult fit_annealed(const Dataset& data, std::size_t k, const Generator& gen,
                       const FitOptions& opts) {
  return fit_annealed(data, init_centers(data, k, opts.seed, opts.init, gen), gen, opts);
}

FitResult fit_hard(const Dataset& data, const Centroids& initial, const Generator& gen,
                   const FitOptions& opts) {
  const auto start = Clock::now();
  if (opts.max_iter < 1) throw InvalidSpec("max_iter must be at least 1");
  check_inputs(data, initial, gen);

  const std::size_t n = data.rows();
  const std::size_t k = initial.rows();
  const std::size_t p = data.cols();

  FitResult result;
  result.centroids = initial;
  Matrix div = divergence_matrix(gen, data, result.centroids);
  Labels labels = argmin_rows(div);
  result.objective_trace.push_back(hard_objective_from(div));

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t l : labels) ++counts[l];

    // Empty clusters take the point farthest from its own center.
    std::vector<double> own(n);
    for (std::size_t i = 0; i < n; ++i) own[i] = div(i, labels[i]);
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] != 0) continue;
      const std::size_t far =
          static_cast<std::size_t>(std::max_element(own.begin(), own.end()) - own.begin());
      --counts[labels[far]];
      labels[far] = j;
      counts[j] = 1;
      own[far] = 0.0;
    }

    Centroids next(k, p);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = next.row(labels[i]);
      const auto x = data.row(i);
      for (std::size_t d = 0; d < p; ++d) c[d] += x[d];
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (double& v : next.row(j)) v /= static_cast<double>(counts[j]);
    }
    result.centroids = std::move(next);

    div = divergence_matrix(gen, data, result.centroids);
    Labels fresh = argmin_rows(div);
    result.objective_trace.push_back(hard_objective_from(div));
    result.iterations = it;
    const bool stable = fresh == labels;
    labels = std::move(fresh);
    if (stable) break;
  }
  result.labels = std::move(labels);
  result.wall_time = seconds_since(start);
  return result;
}

FitResult fit_hard(const Dataset& data, std::size_t k, const Generator& gen,
                   const FitOptions& opts) {
  return fit_hard(data, init_centers(data, k, opts.seed, opts.init, gen), gen, opts);
}

}  // namespace bregpower
