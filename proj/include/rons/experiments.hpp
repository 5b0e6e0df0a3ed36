#ifndef RONS_EXPERIMENTS_HPP
#define RONS_EXPERIMENTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace rons::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = RONS_VERSION;
inline constexpr int kSchemaVersion = 1;

enum ExitCode { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

struct ExperimentInfo {
  std::string name;
  std::string description;
  // Every key the experiment accepts, with its default value.
  Json defaults;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo& find_experiment(const std::string& name);

// Merges a flat user config over the experiment defaults. Unknown keys,
// nested objects and type mismatches raise ValidationError.
Json resolve_config(const Json& user);

struct RunRecord {
  std::filesystem::path directory;
  Json summary;
  int exit_code = kExitOk;
};

// RONS_OUT_DIR if set, otherwise "runs".
std::filesystem::path output_root();

// Runs one experiment and writes its files under root / output_dir.
// `config_text` is snapshotted verbatim when given. Library errors never
// escape: they land in the summary with status "failed".
RunRecord run_experiment(const Json& user_config, const std::filesystem::path& root,
                         const std::string& config_text = {});

// Reads and runs a config file.
RunRecord run_config_file(const std::filesystem::path& path, const std::filesystem::path& root);

// "summary.json#series" -> aligned comparison of the two series.
Json compare(const std::string& spec_a, const std::string& spec_b);

struct SweepResult {
  std::vector<RunRecord> runs;
  int exit_code = kExitOk;
};

// One run per value, with `param` overridden and output_dir suffixed by
// "/<param>=<value>". Runs execute on up to `workers` threads.
SweepResult sweep(const Json& config_template, const std::string& param,
                  const std::vector<std::string>& values, const std::filesystem::path& root,
                  int workers);

// The published summary schema and a validator for the subset of JSON
// Schema it uses. Returns one message per violation.
const Json& summary_schema();
std::vector<std::string> validate_against_schema(const Json& document, const Json& schema);

// Parses a command-line value as JSON when possible, else as a string.
Json parse_value(const std::string& text);

}  // namespace rons::cli

#endif  // RONS_EXPERIMENTS_HPP
