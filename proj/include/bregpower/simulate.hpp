#pragma once

#include <cstdint>
#include <string>

#include "bregpower/divergence.hpp"
#include "bregpower/matrix.hpp"

namespace bregpower {

enum class MixtureFamily { Gaussian, Binomial, Poisson, Gamma };

std::string to_string(MixtureFamily family);
MixtureFamily mixture_family_from_string(const std::string& name);

// Coordinate-wise exponential-family mixture. `parameter` is the variance
// sigma^2 (Gaussian), trial count N (Binomial) or shape alpha (Gamma); it is
// unused for Poisson.
struct MixtureSpec {
  MixtureFamily family = MixtureFamily::Gaussian;
  double parameter = 1.0;
  Matrix centers;
  std::size_t n_per_cluster = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

// Draws n_per_cluster points per center, cluster by cluster, each coordinate
// independently: Normal(mean, sigma^2), Binomial(N, mean / N), Poisson(mean),
// Gamma(shape alpha, scale mean / alpha).
LabeledDataset sample_mixture(const MixtureSpec& spec);

// The divergence matched to a mixture family.
Generator matched_generator(MixtureFamily family, double parameter);

// Embeds a q-dimensional prototype (usually planar) in p dimensions:
// coordinate c copies prototype coordinate c mod q, scaled by sqrt(q / p).
// Gaps between centers shrink by the same factor, and for mean-dependent
// noise (Poisson) the per-coordinate spread shrinks with them.
Matrix scale_separation(const Matrix& prototype, std::size_t p);

// Deterministic child seed for stream `index` of `parent` (splitmix64 mixing).
std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index);

}  // namespace bregpower
