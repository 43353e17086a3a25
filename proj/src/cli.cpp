#include "bregpower/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "bregpower/csv_loader.hpp"
#include "bregpower/errors.hpp"
#include "bregpower/metrics.hpp"

namespace bregpower::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Schema helpers

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number_at(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError("'" + key + "' must be a number");
  return j[key].get<double>();
}

std::uint64_t unsigned_at(const json& j, const std::string& key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned()) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  return j[key].get<std::uint64_t>();
}

bool bool_at(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return j[key].get<bool>();
}

std::string string_at(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ConfigError("'" + key + "' must be a string");
  }
  return j[key].get<std::string>();
}

std::vector<std::size_t> sizes_at(const json& j, const std::string& key) {
  if (!j[key].is_array()) throw ConfigError("'" + key + "' must be an array of integers");
  std::vector<std::size_t> out;
  for (const auto& v : j[key]) {
    if (!v.is_number_unsigned()) throw ConfigError("'" + key + "' must hold positive integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

// Refuses to write a result over its own config file.
void check_output(const fs::path& config, const fs::path& output) {
  std::error_code ec;
  if (fs::equivalent(config, output, ec)) {
    throw ConfigError("output '" + output.string() + "' would overwrite the config file");
  }
}

Method method_at(const json& j) {
  try {
    return method_from_string(string_at(j, "method"));
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
}

Generator generator_from(const json& j) {
  reject_unknown(j, {"family", "alpha", "trials"}, "divergence");
  const std::string family = string_at(j, "family");
  const auto only = [&](const std::set<std::string>& keys) {
    std::set<std::string> allowed = keys;
    allowed.insert("family");
    reject_unknown(j, allowed, "divergence '" + family + "'");
  };
  if (family == "squared_euclidean") {
    only({});
    return Generator::squared_euclidean();
  }
  if (family == "relative_entropy") {
    only({});
    return Generator::relative_entropy();
  }
  if (family == "bernoulli") {
    only({"trials"});
    return Generator::bernoulli(number_at(j, "trials", 1.0));
  }
  if (family == "gamma") {
    only({"alpha"});
    if (!j.contains("alpha")) throw ConfigError("gamma divergence needs 'alpha'");
    return Generator::gamma_shape(number_at(j, "alpha", 1.0));
  }
  throw ConfigError("unknown divergence family '" + family + "'");
}

ColumnRef column_ref(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("columns are named by index or header string");
}

int exit_code_for(const std::exception_ptr& ep, std::ostream& err) {
  try {
    std::rethrow_exception(ep);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidSpec& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidK& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidExponent& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const EmptyAfterFilter& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "fit failure: " << e.what() << '\n';
    return kFitError;
  }
  return kFitError;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError(where + " must be a nonempty array of rows");
  }
  Matrix m(j.size(), j.front().size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != m.cols()) throw ConfigError(where + " is ragged");
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!j[i][c].is_number()) throw ConfigError(where + " must hold numbers");
      m(i, c) = j[i][c].get<double>();
    }
  }
  return m;
}

FamilySpec family_spec_from(const json& j) {
  reject_unknown(j, {"family", "sigma2", "trials", "alpha"}, "family entry");
  FamilySpec f;
  try {
    f.family = mixture_family_from_string(string_at(j, "family"));
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  switch (f.family) {
    case MixtureFamily::Gaussian: f.parameter = number_at(j, "sigma2", 1.0); break;
    case MixtureFamily::Binomial: f.parameter = number_at(j, "trials", 1.0); break;
    case MixtureFamily::Gamma: f.parameter = number_at(j, "alpha", 1.0); break;
    case MixtureFamily::Poisson: f.parameter = 0.0; break;
  }
  return f;
}

std::string csv_path_for(const json& doc, const fs::path& base, const fs::path& json_out) {
  if (doc.contains("csv_output")) return resolve(base, string_at(doc, "csv_output")).string();
  fs::path p = json_out;
  p.replace_extension(".csv");
  return p.string();
}

// ---------------------------------------------------------------------------
// Report (de)serialization

std::optional<double> optional_number(const json& j, const std::string& key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw ConfigError("report field '" + key + "' must be a number");
  return j[key].get<double>();
}

TrialReport report_from_json(const json& doc) {
  require_object(doc, "report");
  if (!doc.contains("schema_version") || doc["schema_version"] != kSchemaVersion) {
    throw ConfigError("report schema_version must be " + std::to_string(kSchemaVersion));
  }
  TrialReport report;
  report.experiment = string_at(doc, "experiment");
  report.seed = unsigned_at(doc, "seed", 0);
  report.trials = unsigned_at(doc, "trials", 0);
  if (!doc.contains("cells") || !doc["cells"].is_array()) {
    throw ConfigError("report has no 'cells' array");
  }
  for (const auto& c : doc["cells"]) {
    require_object(c, "report cell");
    CellReport cell;
    cell.method = string_at(c, "method");
    cell.setting = string_at(c, "setting");
    cell.family = string_at(c, "family");
    cell.parameter = number_at(c, "parameter", 0.0);
    cell.dimension = unsigned_at(c, "dimension", 0);
    cell.n_per_cluster = unsigned_at(c, "n_per_cluster", 0);
    cell.s0 = optional_number(c, "s0");
    cell.mean_ari = number_at(c, "mean_ari", 0.0);
    cell.sd_ari = number_at(c, "sd_ari", 0.0);
    cell.mean_runtime_s = number_at(c, "mean_runtime_s", 0.0);
    cell.trials = unsigned_at(c, "trials", 0);
    cell.failed = unsigned_at(c, "failed", 0);
    cell.best_divergence = optional_number(c, "best_divergence");
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move result into '" + path.string() + "': " + ec.message());
  }
}

json report_to_json(const TrialReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json cell = {
        {"method", c.method},
        {"setting", c.setting},
        {"family", c.family},
        {"parameter", c.parameter},
        {"dimension", c.dimension},
        {"n_per_cluster", c.n_per_cluster},
        {"s0", c.s0 ? json(*c.s0) : json(nullptr)},
        {"mean_ari", c.mean_ari},
        {"sd_ari", c.sd_ari},
        {"mean_runtime_s", c.mean_runtime_s},
        {"trials", c.trials},
        {"failed", c.failed},
    };
    if (c.best_divergence) cell["best_divergence"] = *c.best_divergence;
    cells.push_back(std::move(cell));
  }
  return {
      {"schema_version", kSchemaVersion},
      {"experiment", report.experiment},
      {"seed", report.seed},
      {"trials", report.trials},
      {"cells", std::move(cells)},
  };
}

std::string report_to_csv(const TrialReport& report) {
  const bool divergence = std::any_of(report.cells.begin(), report.cells.end(),
                                      [](const CellReport& c) { return c.best_divergence.has_value(); });
  std::string out = "method,setting,mean_ari,sd_ari,mean_runtime_s,trials";
  if (divergence) out += ",best_divergence";
  out += '\n';
  for (const auto& c : report.cells) {
    out += c.method + ',' + c.setting + ',' + format_number(c.mean_ari) + ',' +
           format_number(c.sd_ari) + ',' + format_number(c.mean_runtime_s) + ',' +
           std::to_string(c.trials);
    if (divergence) out += ',' + (c.best_divergence ? format_number(*c.best_divergence) : "");
    out += '\n';
  }
  return out;
}

ExperimentConfig parse_experiment_config(const json& doc) {
  reject_unknown(doc,
                 {"input", "methods", "s0", "eta", "tol", "max_iter", "trials", "seed", "threads",
                  "record_timing", "output", "csv_output"},
                 "experiment config");
  if (!doc.contains("input")) throw ConfigError("missing 'input' section");
  const json& input = doc["input"];
  reject_unknown(input, {"experiment", "families", "dimensions", "cluster_sizes", "centers",
                         "centroid_recovery"},
                 "input");
  if (!input.contains("experiment")) throw ConfigError("input needs 'experiment'");

  const std::size_t trials = unsigned_at(doc, "trials", 0);
  const std::uint64_t seed = unsigned_at(doc, "seed", 0);
  ExperimentConfig cfg;
  const json& id = input["experiment"];
  if (id.is_number_integer()) {
    const auto n = id.get<long long>();
    if (n < 1 || n > 4) throw ConfigError("experiment id must be 1-4 or \"custom\"");
    cfg = experiment_preset(static_cast<int>(n), trials ? trials : (n == 4 ? 100 : 250), seed);
    if (input.contains("families")) throw ConfigError("preset experiments fix their families");
    if (input.contains("centers")) throw ConfigError("preset experiments fix their centers");
  } else if (id == "custom") {
    cfg.id = "custom";
    cfg.trials = trials ? trials : 250;
    cfg.seed = seed;
    if (!input.contains("families") || !input["families"].is_array()) {
      throw ConfigError("custom experiments need a 'families' array");
    }
    for (const auto& f : input["families"]) cfg.families.push_back(family_spec_from(f));
    if (!input.contains("centers")) throw ConfigError("custom experiments need 'centers'");
    cfg.prototype = matrix_from_json(input["centers"], "centers");
  } else {
    throw ConfigError("experiment id must be 1-4 or \"custom\"");
  }
  if (doc.contains("trials") && trials == 0) throw ConfigError("trials must be at least 1");

  if (input.contains("dimensions")) cfg.dimensions = sizes_at(input, "dimensions");
  if (input.contains("cluster_sizes")) cfg.cluster_sizes = sizes_at(input, "cluster_sizes");
  cfg.centroid_recovery = bool_at(input, "centroid_recovery", cfg.centroid_recovery);
  if (doc.contains("methods")) {
    if (!doc["methods"].is_array()) throw ConfigError("'methods' must be an array");
    cfg.methods.clear();
    for (const auto& m : doc["methods"]) {
      if (!m.is_string()) throw ConfigError("methods are strings");
      try {
        cfg.methods.push_back(method_from_string(m.get<std::string>()));
      } catch (const InvalidSpec& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (doc.contains("s0")) {
    const json& s0 = doc["s0"];
    cfg.s0_grid.clear();
    if (s0.is_number()) {
      cfg.s0_grid.push_back(s0.get<double>());
    } else if (s0.is_array()) {
      for (const auto& v : s0) {
        if (!v.is_number()) throw ConfigError("'s0' entries must be numbers");
        cfg.s0_grid.push_back(v.get<double>());
      }
    } else {
      throw ConfigError("'s0' must be a number or an array of numbers");
    }
  }
  cfg.eta = number_at(doc, "eta", cfg.eta);
  cfg.rel_tol = number_at(doc, "tol", cfg.rel_tol);
  cfg.max_iter = unsigned_at(doc, "max_iter", cfg.max_iter);
  cfg.threads = unsigned_at(doc, "threads", cfg.threads);
  cfg.record_timing = bool_at(doc, "record_timing", cfg.record_timing);
  cfg.validate();
  return cfg;
}

int cmd_cluster(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json doc = read_json(config);
    reject_unknown(doc,
                   {"input", "method", "divergence", "k", "s0", "eta", "tol", "max_iter", "seed",
                    "init", "record_timing", "output"},
                   "cluster config");
    const fs::path base = config.parent_path();
    if (!doc.contains("input")) throw ConfigError("missing 'input' section");
    const json& input = doc["input"];
    reject_unknown(input, {"csv", "columns", "label_column", "positive_only"}, "input");
    const fs::path csv = resolve(base, string_at(input, "csv"));
    ColumnSpec spec;
    if (input.contains("columns")) {
      if (!input["columns"].is_array()) throw ConfigError("'columns' must be an array");
      for (const auto& c : input["columns"]) spec.columns.push_back(column_ref(c));
    }
    if (input.contains("label_column")) spec.label_column = column_ref(input["label_column"]);
    spec.positive_only = bool_at(input, "positive_only", false);

    const Method method = method_at(doc);
    const Generator bregman = doc.contains("divergence") ? generator_from(doc["divergence"])
                                                         : Generator::squared_euclidean();
    const Generator gen = (method == Method::Lloyd || method == Method::Power)
                              ? Generator::squared_euclidean()
                              : bregman;
    if (!doc.contains("k")) throw ConfigError("missing 'k'");
    const std::size_t k = unsigned_at(doc, "k", 0);

    FitOptions opts;
    opts.schedule.s0 = number_at(doc, "s0", opts.schedule.s0);
    opts.schedule.eta = number_at(doc, "eta", opts.schedule.eta);
    opts.rel_tol = number_at(doc, "tol", opts.rel_tol);
    opts.max_iter = unsigned_at(doc, "max_iter", opts.max_iter);
    opts.seed = unsigned_at(doc, "seed", 0);
    if (doc.contains("init")) {
      const std::string init = string_at(doc, "init");
      if (init == "uniform_range") {
        opts.init = InitStrategy::UniformRange;
      } else if (init == "sample_points") {
        opts.init = InitStrategy::SamplePoints;
      } else {
        throw ConfigError("unknown init '" + init + "'");
      }
    }
    opts.validate();
    const bool timing = bool_at(doc, "record_timing", false);
    const fs::path output = resolve(base, string_at(doc, "output"));
    check_output(config, output);

    out << "seed: " << opts.seed << '\n';
    CsvData loaded = load_csv(csv, spec);
    const Dataset data = preprocess(bregman, std::move(loaded.data));
    if (k < 1 || k > data.rows()) {
      throw InvalidK("k = " + std::to_string(k) + " but the data has " +
                     std::to_string(data.rows()) + " rows");
    }
    const Centroids init = init_centers(data, k, opts.seed, opts.init, bregman);
    const FitResult fit = is_annealed(method) ? fit_annealed(data, init, gen, opts)
                                              : fit_hard(data, init, gen, opts);

    json metrics = json::object();
    if (loaded.labels) metrics["ari"] = adjusted_rand_index(fit.labels, *loaded.labels);
    json result = {
        {"schema_version", kSchemaVersion},
        {"command", "cluster"},
        {"method", to_string(method)},
        {"divergence", gen.name()},
        {"k", k},
        {"n", data.rows()},
        {"p", data.cols()},
        {"rows_dropped", loaded.dropped},
        {"seed", opts.seed},
        {"s0", is_annealed(method) ? json(opts.schedule.s0) : json(nullptr)},
        {"eta", is_annealed(method) ? json(opts.schedule.eta) : json(nullptr)},
        {"iterations", fit.iterations},
        {"labels", fit.labels},
        {"centroids", matrix_to_json(fit.centroids)},
        {"objective_trace", fit.objective_trace},
        {"s_trace", fit.s_trace},
        {"wall_time_s", timing ? fit.wall_time : 0.0},
        {"metrics", metrics},
    };
    write_atomic(output, result.dump(2) + "\n");
    out << "wrote " << output.string() << '\n';
    return int{kOk};
  });
}

int cmd_experiment(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json doc = read_json(config);
    const ExperimentConfig cfg = parse_experiment_config(doc);
    const fs::path base = config.parent_path();
    const fs::path json_out = resolve(base, string_at(doc, "output"));
    const fs::path csv_out = csv_path_for(doc, base, json_out);
    check_output(config, json_out);
    check_output(config, csv_out);
    out << "seed: " << cfg.seed << '\n';
    const TrialReport report = run_experiment(cfg);
    write_atomic(json_out, report_to_json(report).dump(2) + "\n");
    write_atomic(csv_out, report_to_csv(report));
    out << "wrote " << json_out.string() << " and " << csv_out.string() << '\n';
    return int{kOk};
  });
}

int cmd_plotdata(const fs::path& report_path, const std::string& plot, const fs::path& out_path,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (plot != "fig2" && plot != "fig3") {
      throw ConfigError("unknown plot id '" + plot + "' (expected fig2 or fig3)");
    }
    if (!fs::exists(report_path)) throw IoError("no report at '" + report_path.string() + "'");
    const TrialReport report = report_from_json(read_json(report_path));
    std::string csv;
    if (plot == "fig2") {
      if (report.experiment != "2") {
        throw ConfigError("fig2 needs an experiment 2 report, got experiment " + report.experiment);
      }
      csv = "x,y,series\n";
      for (const auto& c : report.cells) {
        csv += format_number(c.parameter) + ',' + format_number(c.mean_ari) + ',' + c.method + '\n';
      }
    } else {
      if (report.experiment != "4") {
        throw ConfigError("fig3 needs an experiment 4 report, got experiment " + report.experiment);
      }
      std::vector<const CellReport*> cells;
      for (const auto& c : report.cells) {
        if (!c.best_divergence) throw ConfigError("experiment 4 cell without best_divergence");
        cells.push_back(&c);
      }
      std::stable_sort(cells.begin(), cells.end(), [](const CellReport* a, const CellReport* b) {
        return a->n_per_cluster < b->n_per_cluster;
      });
      csv = "x,y\n";
      for (const CellReport* c : cells) {
        csv += std::to_string(c->n_per_cluster) + ',' + format_number(*c->best_divergence) + '\n';
      }
    }
    write_atomic(out_path, csv);
    out << "wrote " << out_path.string() << '\n';
    return int{kOk};
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Bregman power k-means: clustering runs and simulation experiments"};
  app.require_subcommand(1);

  std::string cluster_config;
  auto* cluster = app.add_subcommand("cluster", "Cluster CSV data as described by a JSON config");
  cluster->add_option("--config", cluster_config, "JSON run configuration")->required();

  std::string experiment_config;
  auto* experiment = app.add_subcommand("experiment", "Run a simulation experiment grid");
  experiment->add_option("--config", experiment_config, "JSON experiment configuration")->required();

  std::string report, plot, plot_out;
  auto* plotdata = app.add_subcommand("plotdata", "Extract figure series from a report");
  plotdata->add_option("--report", report, "Report JSON written by 'experiment'")->required();
  plotdata->add_option("--plot", plot, "Plot id: fig2 or fig3")->required();
  plotdata->add_option("--out", plot_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (*cluster) return cmd_cluster(cluster_config, std::cout, std::cerr);
  if (*experiment) return cmd_experiment(experiment_config, std::cout, std::cerr);
  return cmd_plotdata(report, plot, plot_out, std::cout, std::cerr);
}

}  // namespace bregpower::cli
