#include "bregpower/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bregpower/errors.hpp"

namespace bregpower {

namespace {

// x log x with 0 log 0 = 0.
double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

// x log(x / y) with 0 log(0 / y) = 0.
double xlogxy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(x / y); }

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_same_size(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("divergence arguments have sizes " + std::to_string(x.size()) +
                         " and " + std::to_string(y.size()));
  }
}

}  // namespace

Generator Generator::squared_euclidean() { return {Family::SquaredEuclidean, 0.0}; }

Generator Generator::relative_entropy() { return {Family::RelativeEntropy, 0.0}; }

Generator Generator::bernoulli(double trials) {
  if (!(trials > 0.0) || !std::isfinite(trials)) {
    throw InvalidSpec("Bernoulli trial count must be positive, got " + describe(trials));
  }
  return {Family::Bernoulli, trials};
}

Generator Generator::gamma_shape(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidSpec("Gamma shape must be positive, got " + describe(alpha));
  }
  return {Family::GammaShape, alpha};
}

Domain Generator::domain() const noexcept {
  switch (family_) {
    case Family::SquaredEuclidean: return Domain::AllReals;
    case Family::RelativeEntropy: return Domain::StrictlyPositive;
    case Family::GammaShape: return Domain::StrictlyPositive;
    case Family::Bernoulli: return Domain::OpenInterval;
  }
  return Domain::AllReals;
}

std::string Generator::name() const {
  switch (family_) {
    case Family::SquaredEuclidean: return "squared_euclidean";
    case Family::RelativeEntropy: return "relative_entropy";
    case Family::Bernoulli: return "bernoulli(N=" + describe(param_) + ")";
    case Family::GammaShape: return "gamma(alpha=" + describe(param_) + ")";
  }
  return "unknown";
}

bool Generator::in_interior(double v) const noexcept {
  if (!std::isfinite(v)) return false;
  switch (family_) {
    case Family::SquaredEuclidean: return true;
    case Family::RelativeEntropy:
    case Family::GammaShape: return v > 0.0;
    case Family::Bernoulli: return v > 0.0 && v < param_;
  }
  return false;
}

bool Generator::in_data_domain(double v) const noexcept {
  if (!std::isfinite(v)) return false;
  switch (family_) {
    case Family::SquaredEuclidean: return true;
    case Family::RelativeEntropy: return v >= 0.0;
    case Family::GammaShape: return v > 0.0;
    case Family::Bernoulli: return v >= 0.0 && v <= param_;
  }
  return false;
}

double Generator::clamp_to_interior(double v) const noexcept {
  switch (family_) {
    case Family::SquaredEuclidean: return v;
    case Family::RelativeEntropy:
    case Family::GammaShape: return std::max(v, kDataFloor);
    case Family::Bernoulli: return std::clamp(v, kDataFloor, param_ - kDataFloor);
  }
  return v;
}

double Generator::phi_scalar(double x) const {
  switch (family_) {
    case Family::SquaredEuclidean: return x * x;
    case Family::RelativeEntropy: return xlogx(x) - x;
    case Family::Bernoulli: return xlogx(x) + xlogx(param_ - x);
    case Family::GammaShape: return -param_ * std::log(x);
  }
  return 0.0;
}

double Generator::grad_scalar(double x) const {
  switch (family_) {
    case Family::SquaredEuclidean: return 2.0 * x;
    case Family::RelativeEntropy: return std::log(x);
    case Family::Bernoulli: return std::log(x / (param_ - x));
    case Family::GammaShape: return -param_ / x;
  }
  return 0.0;
}

double Generator::divergence_scalar(double x, double y) const {
  switch (family_) {
    case Family::SquaredEuclidean: {
      const double d = x - y;
      return d * d;
    }
    case Family::RelativeEntropy: {
      if (x == 0.0) return y;
      // y * (r log r - (r - 1)) with r = x / y, written around log1p for r near 1.
      const double u = (x - y) / y;
      return std::max(0.0, y * ((1.0 + u) * std::log1p(u) - u));
    }
    case Family::Bernoulli: {
      const double n = param_;
      return std::max(0.0, xlogxy(x, y) + xlogxy(n - x, n - y));
    }
    case Family::GammaShape: {
      const double u = (x - y) / y;
      return std::max(0.0, param_ * (u - std::log1p(u)));
    }
  }
  return 0.0;
}

double Generator::phi(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (!in_data_domain(x[c])) {
      throw DomainError(name() + ": phi undefined at coordinate " + std::to_string(c) +
                        " = " + describe(x[c]));
    }
    total += phi_scalar(x[c]);
  }
  return total;
}

std::vector<double> Generator::grad(std::span<const double> x) const {
  std::vector<double> g(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (!in_interior(x[c])) {
      throw DomainError(name() + ": gradient undefined at coordinate " + std::to_string(c) +
                        " = " + describe(x[c]));
    }
    g[c] = grad_scalar(x[c]);
  }
  return g;
}

double Generator::divergence(std::span<const double> x, std::span<const double> y) const {
  check_same_size(x, y);
  double total = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (!in_data_domain(x[c])) {
      throw DomainError(name() + ": first argument outside domain at coordinate " +
                        std::to_string(c) + " = " + describe(x[c]));
    }
    if (!in_interior(y[c])) {
      throw DomainError(name() + ": second argument outside domain interior at coordinate " +
                        std::to_string(c) + " = " + describe(y[c]));
    }
    total += divergence_scalar(x[c], y[c]);
  }
  return total;
}

Matrix divergence_matrix(const Generator& gen, const Dataset& data, const Centroids& centers) {
  if (data.cols() != centers.cols()) {
    throw ShapeMismatch("data has " + std::to_string(data.cols()) + " columns, centers have " +
                        std::to_string(centers.cols()));
  }
  Matrix out(data.rows(), centers.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < centers.rows(); ++j) {
      try {
        out(i, j) = std::max(gen.divergence(data.row(i), centers.row(j)), kDivergenceFloor);
      } catch (const DomainError& e) {
        throw DomainError("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                          "): " + e.what());
      }
    }
  }
  return out;
}

Dataset preprocess(const Generator& gen, Dataset data) {
  for (double& v : data.values()) {
    const bool below = gen.domain() != Domain::AllReals && v < 0.0;
    const bool above = gen.family() == Family::Bernoulli && v > gen.parameter();
    if (!std::isfinite(v) || below || above) {
      throw DomainError(gen.name() + ": data value " + describe(v) + " outside domain");
    }
    v = gen.clamp_to_interior(v);
  }
  return data;
}

}  // namespace bregpower
