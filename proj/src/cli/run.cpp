#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "internal.hpp"
#include "rons/errors.hpp"

namespace rons::cli {
namespace {

const detail::ExperimentEntry& entry_for(const std::string& name) {
  for (const auto& e : detail::entries()) {
    if (e.info.name == name) return e;
  }
  throw ValidationError("unknown experiment \"" + name + "\"");
}

int exit_code_for(const std::string& category) {
  return category == "validation" ? kExitValidation : kExitNumerical;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ValidationError("cannot write " + path.string());
}

}  // namespace

std::filesystem::path output_root() {
  const char* env = std::getenv("RONS_OUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

RunRecord run_experiment(const Json& user_config, const std::filesystem::path& root,
                         const std::string& config_text) {
  const Json config = resolve_config(user_config);
  const auto& entry = entry_for(config["experiment"].get<std::string>());
  const std::filesystem::path dir = root / config["output_dir"].get<std::string>();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "config.json", config_text.empty() ? user_config.dump(2) + "\n" : config_text);

  detail::RunContext ctx(config, dir);
  ctx.register_file("config", "config.json");
  const auto start = std::chrono::steady_clock::now();
  Json error = nullptr;
  int exit_code = kExitOk;
  auto fail = [&](const std::string& category, const std::string& message) {
    error = {{"category", category}, {"message", message}};
    exit_code = exit_code_for(category);
  };
  try {
    entry.body(ctx);
  } catch (const IntegrationAborted& e) {
    fail(e.category(), e.what());
    if (!ctx.files().contains("trajectory") && e.partial().size() > 0) {
      try {
        ctx.write_trajectory("trajectory", "trajectory.csv", e.partial());
      } catch (const Error& inner) {
        ctx.warn(std::string("could not write the partial trajectory: ") + inner.what());
      }
    }
  } catch (const Error& e) {
    fail(e.category(), e.what());
  } catch (const Json::exception& e) {
    fail("validation", e.what());
  } catch (const std::exception& e) {
    fail("internal", e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ctx.register_file("summary", "summary.json");

  Json warnings = Json::array();
  for (const auto& w : ctx.warnings()) warnings.push_back(w);
  Json summary = {{"schema_version", kSchemaVersion},
                  {"version", kVersion},
                  {"experiment", entry.info.name},
                  {"status", exit_code == kExitOk ? "ok" : "failed"},
                  {"error", error},
                  {"exit_code", exit_code},
                  {"wall_time_seconds", wall},
                  {"config", config},
                  {"files", ctx.files()},
                  {"series", ctx.series()},
                  {"primary_series", entry.primary_series.empty() || !ctx.series().contains(entry.primary_series)
                                         ? Json(nullptr)
                                         : Json(entry.primary_series)},
                  {"metrics", ctx.metrics()},
                  {"warnings", warnings}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return {dir, std::move(summary), exit_code};
}

RunRecord run_config_file(const std::filesystem::path& path, const std::filesystem::path& root) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  Json parsed = Json::parse(text, nullptr, false);
  if (parsed.is_discarded()) throw ValidationError(path.string() + " is not valid JSON");
  return run_experiment(parsed, root, text);
}

SweepResult sweep(const Json& config_template, const std::string& param,
                  const std::vector<std::string>& values, const std::filesystem::path& root,
                  int workers) {
  if (!config_template.is_object()) throw ValidationError("sweep template must be a JSON object");
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  if (workers < 1) throw ValidationError("workers must be positive");
  // Validate the template and the parameter name before starting anything.
  const Json base = resolve_config(config_template);
  if (!base.contains(param) || param == "experiment" || param == "output_dir") {
    throw ValidationError("cannot sweep \"" + param + "\"");
  }

  std::vector<Json> configs;
  for (const std::string& v : values) {
    Json c = config_template;
    c[param] = parse_value(v);
    std::string tag = param + "=" + v;
    for (char& ch : tag) {
      if (ch == '/' || ch == '\\') ch = '_';
    }
    c["output_dir"] = base["output_dir"].get<std::string>() + "/" + tag;
    configs.push_back(std::move(c));
  }

  SweepResult result;
  result.runs.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        result.runs[i] = run_experiment(configs[i], root);
      } catch (const Error& e) {
        RunRecord r;
        r.summary = {{"status", "failed"},
                     {"error", {{"category", e.category()}, {"message", e.what()}}},
                     {"config", configs[i]}};
        r.exit_code = exit_code_for(e.category());
        result.runs[i] = std::move(r);
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(workers, static_cast<int>(configs.size()));
  for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& r : result.runs) result.exit_code = std::max(result.exit_code, r.exit_code);
  return result;
}

}  // namespace rons::cli
