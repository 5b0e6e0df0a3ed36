#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rons/errors.hpp"
#include "rons/experiments.hpp"

namespace cli = rons::cli;

namespace {

cli::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rons::ValidationError("cannot read " + path);
  cli::Json doc = cli::Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw rons::ValidationError(path + " is not valid JSON");
  return doc;
}

void report(const cli::RunRecord& r) {
  std::cout << r.directory.string() << ": " << r.summary.value("status", std::string("failed"));
  if (r.summary.contains("error") && r.summary["error"].is_object()) {
    std::cout << " (" << r.summary["error"]["category"].get<std::string>() << ": "
              << r.summary["error"]["message"].get<std::string>() << ")";
  }
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order nonlinear solutions: experiment runner"};
  app.set_version_flag("--version", std::string(cli::kVersion));
  app.require_subcommand(1);

  std::string out_root;
  auto root = [&] { return out_root.empty() ? cli::output_root() : std::filesystem::path(out_root); };

  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config file");
  std::string config_path;
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_root, "output root (default: $RONS_OUT_DIR or ./runs)");

  auto* list = app.add_subcommand("list", "List the registered experiments");
  bool list_json = false;
  list->add_flag("--json", list_json, "print names, descriptions and defaults as JSON");

  auto* defaults = app.add_subcommand("defaults", "Print the default config of an experiment");
  std::string experiment;
  defaults->add_option("experiment", experiment, "experiment name")->required();

  auto* compare = app.add_subcommand("compare", "Compare two run series (summary.json[#series])");
  std::string spec_a, spec_b, compare_out;
  compare->add_option("a", spec_a, "first summary")->required();
  compare->add_option("b", spec_b, "second summary")->required();
  compare->add_option("--output,-o", compare_out, "also write the comparison to this file");

  auto* sweep = app.add_subcommand("sweep", "Run a config template once per parameter value");
  std::string template_path, param;
  std::vector<std::string> values;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  sweep->add_option("template", template_path, "config template")->required();
  sweep->add_option("param", param, "key to override")->required();
  sweep->add_option("values", values, "values, parsed as JSON when possible")->required();
  sweep->add_option("--workers,-j", workers, "parallel runs");
  sweep->add_option("--out", out_root, "output root (default: $RONS_OUT_DIR or ./runs)");

  auto* validate = app.add_subcommand("validate", "Check a summary against the published schema");
  std::string summary_path;
  validate->add_option("summary", summary_path, "summary.json")->required();

  auto* schema = app.add_subcommand("schema", "Print the summary schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitValidation;
  }

  try {
    if (*run) {
      const auto record = cli::run_config_file(config_path, root());
      report(record);
      return record.exit_code;
    }
    if (*list) {
      if (list_json) {
        cli::Json out = cli::Json::array();
        for (const auto& e : cli::registry()) {
          out.push_back({{"name", e.name}, {"description", e.description}, {"defaults", e.defaults}});
        }
        std::cout << out.dump(2) << "\n";
      } else {
        for (const auto& e : cli::registry()) std::cout << e.name << "\t" << e.description << "\n";
      }
      return cli::kExitOk;
    }
    if (*defaults) {
      std::cout << cli::find_experiment(experiment).defaults.dump(2) << "\n";
      return cli::kExitOk;
    }
    if (*compare) {
      const cli::Json result = cli::compare(spec_a, spec_b);
      std::cout << result.dump(2) << "\n";
      if (!compare_out.empty()) {
        std::ofstream file(compare_out);
        file << result.dump(2) << "\n";
        if (!file) throw rons::ValidationError("cannot write " + compare_out);
      }
      return cli::kExitOk;
    }
    if (*sweep) {
      const auto result = cli::sweep(read_json(template_path), param, values, root(), workers);
      for (const auto& r : result.runs) report(r);
      return result.exit_code;
    }
    if (*validate) {
      const auto errors = cli::validate_against_schema(read_json(summary_path), cli::summary_schema());
      for (const auto& e : errors) std::cerr << e << "\n";
      if (errors.empty()) std::cout << summary_path << ": valid\n";
      return errors.empty() ? cli::kExitOk : cli::kExitValidation;
    }
    if (*schema) {
      std::cout << cli::summary_schema().dump(2) << "\n";
      return cli::kExitOk;
    }
  } catch (const rons::Error& e) {
    std::cerr << "error (" << e.category() << "): " << e.what() << "\n";
    return e.category() == "validation" ? cli::kExitValidation : cli::kExitNumerical;
  }
  return cli::kExitValidation;
}
