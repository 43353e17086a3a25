#include "bregpower/simulate.hpp"

#include <cmath>
#include <random>

#include "bregpower/errors.hpp"

namespace bregpower {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string to_string(MixtureFamily family) {
  switch (family) {
    case MixtureFamily::Gaussian: return "gaussian";
    case MixtureFamily::Binomial: return "binomial";
    case MixtureFamily::Poisson: return "poisson";
    case MixtureFamily::Gamma: return "gamma";
  }
  return "unknown";
}

MixtureFamily mixture_family_from_string(const std::string& name) {
  if (name == "gaussian") return MixtureFamily::Gaussian;
  if (name == "binomial") return MixtureFamily::Binomial;
  if (name == "poisson") return MixtureFamily::Poisson;
  if (name == "gamma") return MixtureFamily::Gamma;
  throw InvalidSpec("unknown mixture family '" + name + "'");
}

void MixtureSpec::validate() const {
  if (centers.rows() == 0 || centers.cols() == 0) throw InvalidSpec("mixture has no centers");
  if (n_per_cluster == 0) throw InvalidSpec("n_per_cluster must be positive");
  if (!std::isfinite(parameter)) throw InvalidSpec("mixture parameter must be finite");
  switch (family) {
    case MixtureFamily::Gaussian:
      if (parameter < 0.0) throw InvalidSpec("Gaussian variance must be nonnegative");
      break;
    case MixtureFamily::Binomial:
      if (!(parameter >= 1.0) || parameter != std::floor(parameter)) {
        throw InvalidSpec("Binomial trial count must be a positive integer");
      }
      break;
    case MixtureFamily::Gamma:
      if (!(parameter > 0.0)) throw InvalidSpec("Gamma shape must be positive");
      break;
    case MixtureFamily::Poisson: break;
  }
  for (double m : centers.values()) {
    if (!std::isfinite(m)) throw InvalidSpec("mixture means must be finite");
    if (family == MixtureFamily::Gaussian) continue;
    if (!(m > 0.0)) throw InvalidSpec("mixture means must be positive for " + to_string(family));
    if (family == MixtureFamily::Binomial && !(m < parameter)) {
      throw InvalidSpec("Binomial means must be below the trial count");
    }
  }
}

LabeledDataset sample_mixture(const MixtureSpec& spec) {
  spec.validate();
  const std::size_t k = spec.centers.rows();
  const std::size_t p = spec.centers.cols();
  std::mt19937_64 rng(spec.seed);
  LabeledDataset out{Dataset(k * spec.n_per_cluster, p), Labels(k * spec.n_per_cluster)};

  auto draw = [&](double mean) -> double {
    switch (spec.family) {
      case MixtureFamily::Gaussian: {
        if (spec.parameter == 0.0) return mean;
        std::normal_distribution<double> d(mean, std::sqrt(spec.parameter));
        return d(rng);
      }
      case MixtureFamily::Binomial: {
        const auto trials = static_cast<long long>(spec.parameter);
        std::binomial_distribution<long long> d(trials, mean / spec.parameter);
        return static_cast<double>(d(rng));
      }
      case MixtureFamily::Poisson: {
        std::poisson_distribution<long long> d(mean);
        return static_cast<double>(d(rng));
      }
      case MixtureFamily::Gamma: {
        std::gamma_distribution<double> d(spec.parameter, mean / spec.parameter);
        return d(rng);
      }
    }
    return mean;
  };

  std::size_t i = 0;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < spec.n_per_cluster; ++r, ++i) {
      for (std::size_t c = 0; c < p; ++c) out.data(i, c) = draw(spec.centers(j, c));
      out.labels[i] = j;
    }
  }
  return out;
}

Generator matched_generator(MixtureFamily family, double parameter) {
  switch (family) {
    case MixtureFamily::Gaussian: return Generator::squared_euclidean();
    case MixtureFamily::Binomial: return Generator::bernoulli(parameter);
    case MixtureFamily::Poisson: return Generator::relative_entropy();
    case MixtureFamily::Gamma: return Generator::gamma_shape(parameter);
  }
  return Generator::squared_euclidean();
}

Matrix scale_separation(const Matrix& prototype, std::size_t p) {
  const std::size_t k = prototype.rows();
  const std::size_t q = prototype.cols();
  if (q == 0 || p == q) return q == 0 ? Matrix(k, p) : prototype;
  const double shrink = std::sqrt(static_cast<double>(q) / static_cast<double>(p));
  Matrix out(k, p);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < p; ++c) out(j, c) = prototype(j, c % q) * shrink;
  }
  return out;
}

std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace bregpower
