#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bregpower/errors.hpp"
#include "bregpower/experiment.hpp"

namespace bregpower::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kFitError = 4,
};

inline constexpr int kSchemaVersion = 1;

// Raised for malformed or schema-violating configuration and report files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// `breg-anneal cluster --config <file>`: fits one method to CSV data and
// writes a JSON result. Relative paths in the config resolve against the
// config file's directory.
int cmd_cluster(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

// `breg-anneal experiment --config <file>`: runs a simulation grid and writes
// the report as JSON plus a flat CSV.
int cmd_experiment(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

// `breg-anneal plotdata --report <file> --plot fig2|fig3 --out <file>`.
int cmd_plotdata(const std::filesystem::path& report, const std::string& plot,
                 const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
nlohmann::json report_to_json(const TrialReport& report);
std::string report_to_csv(const TrialReport& report);

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace bregpower::cli
