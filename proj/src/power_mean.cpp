#include "bregpower/power_mean.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bregpower/errors.hpp"

namespace bregpower {

namespace {

void validate(std::span<const double> y, double s) {
  if (s == 0.0 || !(s <= 1.0) || std::isnan(s)) {
    throw InvalidExponent("power mean exponent must satisfy s <= 1, s != 0; got " +
                          std::to_string(s));
  }
  if (y.empty()) throw DomainError("power mean of an empty vector");
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("power mean entries must be positive and finite");
    }
  }
}

// log((1/k) sum y_i^s) via shifted log-sum-exp of s log y_i.
double log_mean_power(std::span<const double> y, double s) {
  double shift = -INFINITY;
  for (double v : y) shift = std::max(shift, s * std::log(v));
  double acc = 0.0;
  for (double v : y) acc += std::exp(s * std::log(v) - shift);
  return shift + std::log(acc) - std::log(static_cast<double>(y.size()));
}

}  // namespace

double power_mean(std::span<const double> y, double s) {
  validate(y, s);
  return std::exp(log_mean_power(y, s) / s);
}

void power_mean_grad(std::span<const double> y, double s, std::span<double> out) {
  validate(y, s);
  if (out.size() != y.size()) throw LengthMismatch("gradient buffer size mismatch");
  const double log_k = std::log(static_cast<double>(y.size()));
  const double scale = (1.0 / s - 1.0) * log_mean_power(y, s) - log_k;
  for (std::size_t j = 0; j < y.size(); ++j) {
    out[j] = std::exp(scale + (s - 1.0) * std::log(y[j]));
  }
}

std::vector<double> power_mean_grad(std::span<const double> y, double s) {
  std::vector<double> g(y.size());
  power_mean_grad(y, s, g);
  return g;
}

}  // namespace bregpower
