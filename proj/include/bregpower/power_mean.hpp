#pragma once

#include <span>
#include <vector>

namespace bregpower {

// Lowest exponent the annealing schedule will reach.
inline constexpr double kMinExponent = -150.0;

// Power mean M_s(y) = ((1/k) sum y_i^s)^(1/s), evaluated in log space.
// Requires every y_i > 0 and finite, s != 0, s <= 1. The exponent cap is not
// enforced here; callers may probe far below kMinExponent.
double power_mean(std::span<const double> y, double s);

// Gradient of M_s with respect to y:
//   dM/dy_j = (1/k) y_j^(s-1) ((1/k) sum y_i^s)^(1/s - 1)
void power_mean_grad(std::span<const double> y, double s, std::span<double> out);
std::vector<double> power_mean_grad(std::span<const double> y, double s);

}  // namespace bregpower
