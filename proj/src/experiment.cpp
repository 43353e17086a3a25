#include "bregpower/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "bregpower/errors.hpp"
#include "bregpower/metrics.hpp"

namespace bregpower {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Setting {
  FamilySpec family;
  std::size_t dimension;
  std::size_t n_per_cluster;
  std::string label;
};

std::vector<Setting> expand(const ExperimentConfig& cfg) {
  std::vector<Setting> out;
  bool mixed_types = false;
  for (const auto& f : cfg.families) mixed_types |= f.family != cfg.families.front().family;
  for (const auto& f : cfg.families) {
    for (std::size_t p : cfg.dimensions) {
      for (std::size_t n : cfg.cluster_sizes) {
        std::vector<std::string> parts;
        if (cfg.families.size() > 1) {
          if (mixed_types) {
            parts.push_back(to_string(f.family));
          } else if (f.family == MixtureFamily::Gamma) {
            parts.push_back("alpha=" + shortest(f.parameter));
          } else {
            parts.push_back(to_string(f.family) + "=" + shortest(f.parameter));
          }
        }
        if (cfg.dimensions.size() > 1) parts.push_back("p=" + std::to_string(p));
        if (cfg.cluster_sizes.size() > 1) parts.push_back("n=" + std::to_string(n));
        if (parts.empty()) parts.push_back(to_string(f.family));
        std::string label = parts.front();
        for (std::size_t i = 1; i < parts.size(); ++i) label += ";" + parts[i];
        out.push_back({f, p, n, std::move(label)});
      }
    }
  }
  return out;
}

struct Run {
  Method method;
  std::optional<double> s0;
  std::string label;
};

std::vector<Run> expand_methods(const ExperimentConfig& cfg) {
  std::vector<Run> runs;
  for (Method m : cfg.methods) {
    if (!is_annealed(m)) runs.push_back({m, std::nullopt, to_string(m)});
  }
  for (double s0 : cfg.s0_grid) {
    for (Method m : cfg.methods) {
      if (!is_annealed(m)) continue;
      std::string label = to_string(m);
      if (cfg.s0_grid.size() > 1) label += "(s0=" + shortest(s0) + ")";
      runs.push_back({m, s0, std::move(label)});
    }
  }
  return runs;
}

struct Outcome {
  bool ok = false;
  double ari = 0.0;
  double runtime = 0.0;
  double divergence = 0.0;
};

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Lloyd: return "lloyd";
    case Method::BregmanHard: return "bregman_hard";
    case Method::Power: return "power";
    case Method::BregmanPower: return "bregman_power";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "lloyd") return Method::Lloyd;
  if (name == "bregman_hard") return Method::BregmanHard;
  if (name == "power") return Method::Power;
  if (name == "bregman_power") return Method::BregmanPower;
  throw InvalidSpec("unknown method '" + name + "'");
}

bool is_annealed(Method method) {
  return method == Method::Power || method == Method::BregmanPower;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidSpec("trials must be at least 1");
  if (families.empty()) throw InvalidSpec("experiment needs at least one family");
  if (dimensions.empty() || cluster_sizes.empty()) {
    throw InvalidSpec("dimension and cluster-size grids must be nonempty");
  }
  if (methods.empty()) throw InvalidSpec("experiment needs at least one method");
  if (prototype.rows() == 0 || prototype.cols() == 0) throw InvalidSpec("no prototype centers");
  for (std::size_t p : dimensions) {
    if (p == 0) throw InvalidSpec("dimensions must be positive");
  }
  for (std::size_t n : cluster_sizes) {
    if (n == 0) throw InvalidSpec("cluster sizes must be positive");
  }
  const bool any_annealed = std::any_of(methods.begin(), methods.end(), is_annealed);
  if (any_annealed && s0_grid.empty()) throw InvalidSpec("annealed methods need an s0 grid");
  for (double s0 : s0_grid) AnnealingSchedule{s0, eta, kMinExponent}.validate();
  if (max_iter < 1) throw InvalidSpec("max_iter must be at least 1");
  if (!(rel_tol > 0.0)) throw InvalidSpec("tol must be positive");
  for (const auto& f : families) {
    MixtureSpec probe{f.family, f.parameter, scale_separation(prototype, dimensions.front()), 1, 0};
    probe.validate();
    matched_generator(f.family, f.parameter);
  }
}

ExperimentConfig experiment_preset(int id, std::size_t trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.id = std::to_string(id);
  cfg.trials = trials;
  cfg.seed = seed;
  const Matrix planar{{10, 10}, {20, 20}, {40, 40}};
  const Matrix shifted{{40, 40}, {50, 50}, {60, 60}};
  switch (id) {
    case 1:
      cfg.families = {{MixtureFamily::Gaussian, 16.0},
                      {MixtureFamily::Binomial, 200.0},
                      {MixtureFamily::Poisson, 0.0},
                      {MixtureFamily::Gamma, 15.0}};
      cfg.prototype = planar;
      break;
    case 2:
      for (int a = 1; a <= 20; ++a) cfg.families.push_back({MixtureFamily::Gamma, double(a)});
      cfg.dimensions = {20};
      cfg.prototype = planar;
      break;
    case 3:
      cfg.families = {{MixtureFamily::Poisson, 0.0}};
      cfg.dimensions = {2, 5, 10, 20, 50};
      cfg.s0_grid = {-0.2, -1.0, -3.0, -9.0};
      cfg.prototype = shifted;
      break;
    case 4:
      cfg.families = {{MixtureFamily::Poisson, 0.0}};
      cfg.dimensions = {5};
      cfg.cluster_sizes = {4, 8, 16, 32, 64, 128};
      cfg.s0_grid = {-1.0};
      cfg.methods = {Method::BregmanPower};
      cfg.prototype = shifted;
      cfg.centroid_recovery = true;
      break;
    default:
      throw InvalidSpec("experiment id must be 1, 2, 3 or 4; got " + std::to_string(id));
  }
  return cfg;
}

std::size_t setting_count(const ExperimentConfig& cfg) {
  return cfg.families.size() * cfg.dimensions.size() * cfg.cluster_sizes.size();
}

namespace {

TrialInput prepare(const ExperimentConfig& cfg, const Setting& setting, std::size_t setting_index,
                   std::size_t trial) {
  const std::uint64_t trial_seed = child_seed(child_seed(cfg.seed, setting_index), trial);
  TrialInput in;
  in.true_centers = scale_separation(cfg.prototype, setting.dimension);
  MixtureSpec spec{setting.family.family, setting.family.parameter, in.true_centers,
                   setting.n_per_cluster, child_seed(trial_seed, 0)};
  in.sample = sample_mixture(spec);
  in.generator = matched_generator(setting.family.family, setting.family.parameter);
  in.sample.data = preprocess(in.generator, std::move(in.sample.data));
  in.init = init_centers(in.sample.data, cfg.prototype.rows(), child_seed(trial_seed, 1),
                         InitStrategy::UniformRange, in.generator);
  return in;
}

}  // namespace

TrialInput prepare_trial(const ExperimentConfig& cfg, std::size_t setting, std::size_t trial) {
  const auto settings = expand(cfg);
  if (setting >= settings.size()) throw InvalidSpec("setting index out of range");
  return prepare(cfg, settings[setting], setting, trial);
}

TrialReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto settings = expand(cfg);
  const auto runs = expand_methods(cfg);
  const std::size_t per_setting = cfg.trials * runs.size();
  std::vector<Outcome> outcomes(settings.size() * per_setting);

  auto work = [&](std::size_t task) {
    const std::size_t si = task / cfg.trials;
    const std::size_t trial = task % cfg.trials;
    Outcome* row = &outcomes[si * per_setting + trial * runs.size()];
    TrialInput in;
    try {
      in = prepare(cfg, settings[si], si, trial);
    } catch (const Error&) {
      return;  // every run of this trial counts as failed
    }
    const Generator euclid = Generator::squared_euclidean();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const Run& run = runs[r];
      const Generator& gen =
          (run.method == Method::Lloyd || run.method == Method::Power) ? euclid : in.generator;
      FitOptions opts;
      opts.max_iter = cfg.max_iter;
      opts.rel_tol = cfg.rel_tol;
      opts.schedule = {run.s0.value_or(-1.0), cfg.eta, kMinExponent};
      try {
        const FitResult fit = is_annealed(run.method)
                                  ? fit_annealed(in.sample.data, in.init, gen, opts)
                                  : fit_hard(in.sample.data, in.init, gen, opts);
        Outcome o;
        o.ok = true;
        o.ari = adjusted_rand_index(fit.labels, in.sample.labels);
        o.runtime = fit.wall_time;
        if (cfg.centroid_recovery) {
          o.divergence = centroid_divergence(in.generator, in.true_centers, fit.centroids);
        }
        row[r] = o;
      } catch (const Error&) {
        row[r] = Outcome{};
      }
    }
  };

  const std::size_t tasks = settings.size() * cfg.trials;
  std::size_t workers = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  workers = std::clamp<std::size_t>(workers, 1, tasks);
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
          try {
            work(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  TrialReport report;
  report.experiment = cfg.id;
  report.seed = cfg.seed;
  report.trials = cfg.trials;
  for (std::size_t si = 0; si < settings.size(); ++si) {
    const Setting& setting = settings[si];
    for (std::size_t r = 0; r < runs.size(); ++r) {
      CellReport cell;
      cell.method = runs[r].label;
      cell.setting = setting.label;
      cell.family = to_string(setting.family.family);
      cell.parameter = setting.family.parameter;
      cell.dimension = setting.dimension;
      cell.n_per_cluster = setting.n_per_cluster;
      cell.s0 = runs[r].s0;
      double sum = 0.0, sum_sq = 0.0, time = 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const Outcome& o = outcomes[si * per_setting + t * runs.size() + r];
        if (!o.ok) {
          ++cell.failed;
          continue;
        }
        ++cell.trials;
        sum += o.ari;
        sum_sq += o.ari * o.ari;
        time += o.runtime;
        best = std::min(best, o.divergence);
      }
      if (cell.trials > 0) {
        const double m = static_cast<double>(cell.trials);
        cell.mean_ari = sum / m;
        if (cell.trials > 1) {
          const double var = std::max(0.0, (sum_sq - m * cell.mean_ari * cell.mean_ari) / (m - 1.0));
          cell.sd_ari = std::sqrt(var / m);
        }
        cell.mean_runtime_s = cfg.record_timing ? time / m : 0.0;
        if (cfg.centroid_recovery) cell.best_divergence = best;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace bregpower
