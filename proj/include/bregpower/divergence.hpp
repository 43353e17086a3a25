#pragma once

#include <span>
#include <string>
#include <vector>

#include "bregpower/matrix.hpp"

namespace bregpower {

// Divergence values are floored at this level inside divergence_matrix so
// that negative powers stay finite.
inline constexpr double kDivergenceFloor = 1e-10;

// Zero-valued count data are lifted to this level before clustering.
inline constexpr double kDataFloor = 1e-8;

enum class Family { SquaredEuclidean, RelativeEntropy, Bernoulli, GammaShape };

enum class Domain { AllReals, StrictlyPositive, OpenInterval };

/**
 * A separable Bregman generator phi together with its gradient and the
 * closed-form divergence it induces.
 *
 *   SquaredEuclidean  phi(x) = |x|^2                      d = |x - y|^2
 *   RelativeEntropy   phi(x) = sum x log x - x            d = sum x log(x/y) - (x - y)
 *   Bernoulli(N)      phi(x) = sum x log x + (N-x) log(N-x)
 *                     d = sum x log(x/y) + (N-x) log((N-x)/(N-y))
 *   GammaShape(a)     phi(x) = -a sum log x               d = a sum log(y/x) + x/y - 1
 *
 * Wherever x enters only as x log x the convention 0 log 0 = 0 applies, so
 * the closed forms extend to the boundary in their first argument.
 * Generators are immutable and may be shared across threads.
 */
class Generator {
 public:
  static Generator squared_euclidean();
  static Generator relative_entropy();
  static Generator bernoulli(double trials);
  static Generator gamma_shape(double alpha);

  Family family() const noexcept { return family_; }
  Domain domain() const noexcept;
  // Trial count N for Bernoulli, shape alpha for GammaShape, 0 otherwise.
  double parameter() const noexcept { return param_; }
  std::string name() const;

  double phi(std::span<const double> x) const;
  std::vector<double> grad(std::span<const double> x) const;
  double divergence(std::span<const double> x, std::span<const double> y) const;

  // Strict interior, where the gradient is finite.
  bool in_interior(double v) const noexcept;
  // Closure points the first divergence argument may take.
  bool in_data_domain(double v) const noexcept;

  // Pulls a value into the interior using the data floor. Identity for AllReals.
  double clamp_to_interior(double v) const noexcept;

  bool operator==(const Generator&) const = default;

 private:
  Generator(Family family, double param) : family_(family), param_(param) {}

  double phi_scalar(double x) const;
  double grad_scalar(double x) const;
  double divergence_scalar(double x, double y) const;

  Family family_;
  double param_;
};

inline double phi_value(const Generator& gen, std::span<const double> x) { return gen.phi(x); }

inline std::vector<double> phi_grad(const Generator& gen, std::span<const double> x) {
  return gen.grad(x);
}

inline double divergence(const Generator& gen, std::span<const double> x,
                         std::span<const double> y) {
  return gen.divergence(x, y);
}

// Entry (i, j) is max(d(x_i, theta_j), kDivergenceFloor). Throws DomainError
// naming the offending (i, j) pair.
Matrix divergence_matrix(const Generator& gen, const Dataset& data, const Centroids& centers);

// Lifts every entry into the generator's interior (x <- max(x, kDataFloor) for
// positive families, also capped at N - kDataFloor for Bernoulli).
Dataset preprocess(const Generator& gen, Dataset data);

}  // namespace bregpower
