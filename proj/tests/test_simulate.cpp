#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bregpower/errors.hpp"
#include "bregpower/experiment.hpp"
#include "bregpower/simulate.hpp"

using namespace bregpower;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments column_moments(const Dataset& d, std::size_t c) {
  Moments m;
  for (std::size_t i = 0; i < d.rows(); ++i) m.mean += d(i, c);
  m.mean /= static_cast<double>(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) m.var += (d(i, c) - m.mean) * (d(i, c) - m.mean);
  m.var /= static_cast<double>(d.rows() - 1);
  return m;
}

}  // namespace

TEST(SampleMixture, MomentsMatchFamily) {
  const std::size_t n = 100000;
  struct Case {
    MixtureFamily family;
    double parameter;
    double mean;
    double var;
    double kurt_excess;  // fourth-moment term for the SE of the sample variance
  };
  const Case cases[] = {
      {MixtureFamily::Gaussian, 16.0, 10.0, 16.0, 0.0},
      {MixtureFamily::Binomial, 200.0, 40.0, 40.0 * (1 - 0.2), (1 - 6 * 0.2 * 0.8) / (200 * 0.2 * 0.8)},
      {MixtureFamily::Poisson, 0.0, 20.0, 20.0, 1.0 / 20.0},
      {MixtureFamily::Gamma, 15.0, 30.0, 30.0 * 30.0 / 15.0, 6.0 / 15.0},
  };
  for (const Case& c : cases) {
    const MixtureSpec spec{c.family, c.parameter, Matrix{{c.mean}}, n, 123};
    const LabeledDataset s = sample_mixture(spec);
    ASSERT_EQ(s.data.rows(), n);
    const Moments m = column_moments(s.data, 0);
    const double se_mean = std::sqrt(c.var / n);
    const double se_var = c.var * std::sqrt((2.0 + c.kurt_excess) / n);
    EXPECT_LE(std::abs(m.mean - c.mean), 5 * se_mean) << to_string(c.family);
    EXPECT_LE(std::abs(m.var - c.var), 5 * se_var) << to_string(c.family);
  }
}

TEST(SampleMixture, ZeroVarianceGaussianReturnsCenters) {
  const MixtureSpec spec{MixtureFamily::Gaussian, 0.0, Matrix{{1, 2}, {3, 4}}, 3, 1};
  const LabeledDataset s = sample_mixture(spec);
  EXPECT_EQ(s.data, (Matrix{{1, 2}, {1, 2}, {1, 2}, {3, 4}, {3, 4}, {3, 4}}));
  EXPECT_EQ(s.labels, (Labels{0, 0, 0, 1, 1, 1}));
}

TEST(SampleMixture, DeterministicAndSeedSensitive) {
  const MixtureSpec a{MixtureFamily::Poisson, 0.0, Matrix{{10, 10}, {40, 40}}, 50, 9};
  MixtureSpec b = a;
  b.seed = 10;
  EXPECT_EQ(sample_mixture(a).data, sample_mixture(a).data);
  EXPECT_NE(sample_mixture(a).data, sample_mixture(b).data);
}

TEST(SampleMixture, InvalidSpecs) {
  EXPECT_THROW(sample_mixture({MixtureFamily::Binomial, 10, Matrix{{11}}, 5, 1}), InvalidSpec);
  EXPECT_THROW(sample_mixture({MixtureFamily::Poisson, 0, Matrix{{-1}}, 5, 1}), InvalidSpec);
  EXPECT_THROW(sample_mixture({MixtureFamily::Gamma, 0, Matrix{{1}}, 5, 1}), InvalidSpec);
  EXPECT_THROW(sample_mixture({MixtureFamily::Gaussian, -1, Matrix{{1}}, 5, 1}), InvalidSpec);
  EXPECT_THROW(mixture_family_from_string("cauchy"), InvalidSpec);
}

TEST(MatchedGenerator, PairsFamilies) {
  EXPECT_EQ(matched_generator(MixtureFamily::Gaussian, 4).family(), Family::SquaredEuclidean);
  EXPECT_EQ(matched_generator(MixtureFamily::Poisson, 0).family(), Family::RelativeEntropy);
  EXPECT_EQ(matched_generator(MixtureFamily::Binomial, 200).parameter(), 200.0);
  EXPECT_EQ(matched_generator(MixtureFamily::Gamma, 15).parameter(), 15.0);
}

TEST(ScaleSeparation, Examples) {
  const Matrix proto{{40, 40}, {50, 50}, {60, 60}};
  EXPECT_EQ(scale_separation(proto, 2), proto);
  const Matrix wide = scale_separation(proto, 8);
  ASSERT_EQ(wide.cols(), 8u);
  for (std::size_t c = 0; c < 8; ++c) {
    EXPECT_DOUBLE_EQ(wide(0, c), 20.0);
    EXPECT_DOUBLE_EQ(wide(2, c), 30.0);
  }
  // Total squared separation is preserved.
  const Matrix mid = scale_separation(proto, 5);
  double gap = 0.0;
  for (std::size_t c = 0; c < 5; ++c) gap += (mid(2, c) - mid(0, c)) * (mid(2, c) - mid(0, c));
  EXPECT_NEAR(gap, 2.0 * 20.0 * 20.0, 1e-9);
}

TEST(ChildSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(child_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(child_seed(7, 3), child_seed(7, 3));
  EXPECT_NE(child_seed(7, 3), child_seed(8, 3));
}

TEST(Experiment, PresetGridSizes) {
  EXPECT_EQ(setting_count(experiment_preset(1, 2, 1)), 4u);
  EXPECT_EQ(setting_count(experiment_preset(2, 2, 1)), 20u);
  EXPECT_EQ(setting_count(experiment_preset(3, 2, 1)), 5u);
  EXPECT_EQ(setting_count(experiment_preset(4, 2, 1)), 6u);
  EXPECT_THROW(experiment_preset(5, 2, 1), InvalidSpec);
}

TEST(Experiment, SharedInitializationIsInteriorAndMatched) {
  const ExperimentConfig cfg = experiment_preset(1, 3, 11);
  for (std::size_t setting = 0; setting < setting_count(cfg); ++setting) {
    const TrialInput in = prepare_trial(cfg, setting, 1);
    EXPECT_EQ(in.init.rows(), 3u);
    EXPECT_EQ(in.sample.data.rows(), 300u);
    for (std::size_t j = 0; j < in.init.rows(); ++j) {
      for (double v : in.init.row(j)) EXPECT_TRUE(in.generator.in_interior(v));
    }
    const TrialInput again = prepare_trial(cfg, setting, 1);
    EXPECT_EQ(in.init, again.init);
    EXPECT_EQ(in.sample.data, again.sample.data);
  }
}

TEST(Experiment, NoiselessGaussianRecoversEverything) {
  ExperimentConfig cfg;
  cfg.families = {{MixtureFamily::Gaussian, 0.0}};
  cfg.prototype = Matrix{{0, 0}, {50, 50}};
  cfg.cluster_sizes = {10};
  cfg.trials = 5;
  cfg.seed = 3;
  cfg.s0_grid = {-1.0};
  const TrialReport rep = run_experiment(cfg);
  ASSERT_EQ(rep.cells.size(), 4u);
  for (const auto& cell : rep.cells) {
    EXPECT_EQ(cell.failed, 0u) << cell.method;
    EXPECT_DOUBLE_EQ(cell.mean_ari, 1.0) << cell.method;
    EXPECT_EQ(cell.mean_runtime_s, 0.0);
  }
}

TEST(Experiment, ReportRowsAndDeterminism) {
  ExperimentConfig cfg = experiment_preset(3, 2, 5);
  cfg.dimensions = {2, 5};
  const TrialReport a = run_experiment(cfg);
  EXPECT_EQ(a.cells.size(), 2u * (2 + 2 * 4));
  cfg.threads = 3;
  const TrialReport b = run_experiment(cfg);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].method, b.cells[i].method);
    EXPECT_EQ(a.cells[i].setting, b.cells[i].setting);
    EXPECT_EQ(a.cells[i].mean_ari, b.cells[i].mean_ari);
    EXPECT_EQ(a.cells[i].sd_ari, b.cells[i].sd_ari);
  }
}

TEST(Experiment, CentroidRecoveryRecorded) {
  ExperimentConfig cfg = experiment_preset(4, 2, 5);
  cfg.cluster_sizes = {8};
  const TrialReport rep = run_experiment(cfg);
  ASSERT_EQ(rep.cells.size(), 1u);
  ASSERT_TRUE(rep.cells[0].best_divergence.has_value());
  EXPECT_GT(*rep.cells[0].best_divergence, 0.0);
}
