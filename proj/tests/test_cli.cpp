#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <set>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "../src/cli/internal.hpp"
#include "rons/errors.hpp"
#include "rons/experiments.hpp"

using namespace rons;
using namespace rons::cli;
namespace fs = std::filesystem;

namespace {

// A fresh directory per test case, removed afterwards.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("rons_test_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Json quick(const std::string& experiment, Json overrides = Json::object()) {
  overrides["experiment"] = experiment;
  return overrides;
}

void check_record(const RunRecord& r) {
  INFO(r.summary.dump(2));
  const auto errors = validate_against_schema(r.summary, summary_schema());
  for (const auto& e : errors) INFO(e);
  CHECK(errors.empty());
  for (const auto& [role, file] : r.summary["files"].items()) {
    const fs::path p = r.directory / file.get<std::string>();
    CHECK_MESSAGE(fs::exists(p), role);
    if (p.extension() == ".csv") {
      const auto table = rons::cli::detail::read_csv(p);
      CHECK(!table.header.empty());
    } else {
      CHECK(!Json::parse(slurp(p), nullptr, false).is_discarded());
    }
  }
}

}  // namespace

TEST_CASE("registry") {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"advdiff-exact", "nlse-focusing", "nlse-defocusing", "nlse-unconstrained",
                                          "euler-dipole", "euler-pair", "euler-leapfrog", "galerkin-equivalence",
                                          "appendixA-instability", "fit-demo"});

  const Json& leap = find_experiment("euler-leapfrog").defaults;
  CHECK(leap["L"] == Json({0.3, 0.3, 0.3, 0.3}));
  CHECK(leap["A"] == Json({1.0, -1.0, 1.0, -1.0}));
  for (const auto& key : {"x", "y"}) {
    for (const auto& v : leap[key]) CHECK(std::abs(v.get<double>()) == 0.5);
  }
  const Json& defocus = find_experiment("nlse-defocusing").defaults;
  CHECK(defocus["A0"] == 0.2);
  CHECK(defocus["L0"] == 5.0);
  CHECK(defocus["V0"] == 0.0);
  CHECK(defocus["phi0"] == 0.0);
  const Json& focus = find_experiment("nlse-focusing").defaults;
  CHECK(focus["L0"] == 20.0);
  CHECK(focus["V0"] == -0.05);
  CHECK(focus["dns_modes"] == 512);
  CHECK(focus["dns_dt"] == 0.025);
  const Json& dipole = find_experiment("euler-dipole").defaults;
  CHECK(dipole["L"] == Json({0.75, 0.75}));
  CHECK(dipole["x"] == Json({-3.0, -3.0}));
  CHECK(dipole["y"] == Json({0.5, -0.5}));
  CHECK_THROWS_AS(find_experiment("nlse"), ValidationError);
}

TEST_CASE("config resolution") {
  const Json r = resolve_config(quick("advdiff-exact", {{"nu", 0.2}, {"quadrature_nodes", 32}, {"t_end", 5}}));
  CHECK(r["nu"] == 0.2);
  CHECK(r["quadrature_nodes"] == 32);
  CHECK(r["t_end"].is_number_float());
  CHECK(r["output_dir"] == "advdiff-exact");
  CHECK(r["c"] == 1.0);

  CHECK_THROWS_AS(resolve_config(quick("advdiff-exact", {{"bogus", 1}})), ValidationError);
  CHECK_THROWS_AS(resolve_config(quick("advdiff-exact", {{"nu", "0.1"}})), ValidationError);
  CHECK_THROWS_AS(resolve_config(quick("advdiff-exact", {{"quadrature_nodes", 32.5}})), ValidationError);
  CHECK_THROWS_AS(resolve_config(quick("advdiff-exact", {{"nu", {{"value", 1}}}})), ValidationError);
  CHECK_THROWS_AS(resolve_config(quick("euler-pair", {{"A", {1.0, "x"}}})), ValidationError);
  CHECK_THROWS_AS(resolve_config(quick("no-such-thing")), ValidationError);
  CHECK_THROWS_AS(resolve_config(Json::array()), ValidationError);
  CHECK_THROWS_AS(resolve_config(Json{{"nu", 1.0}}), ValidationError);
}

TEST_CASE("parse_value") {
  CHECK(parse_value("0.5") == 0.5);
  CHECK(parse_value("3").is_number_integer());
  CHECK(parse_value("true") == true);
  CHECK(parse_value("[1, 2]") == Json({1, 2}));
  CHECK(parse_value("rk4-fixed") == "rk4-fixed");
}

TEST_CASE("output root") {
  ::setenv("RONS_OUT_DIR", "/tmp/elsewhere", 1);
  CHECK(output_root() == fs::path("/tmp/elsewhere"));
  ::unsetenv("RONS_OUT_DIR");
  CHECK(output_root() == fs::path("runs"));
}

TEST_CASE("run writes a complete record") {
  TempDir tmp;
  const std::string text = "{\"experiment\": \"advdiff-exact\",\n \"output_dir\": \"a\"}\n";
  std::ofstream(tmp.path / "cfg.json") << text;
  const RunRecord r = run_config_file(tmp.path / "cfg.json", tmp.path / "out");
  CHECK(r.exit_code == kExitOk);
  CHECK(r.directory == tmp.path / "out" / "a");
  CHECK(r.summary["status"] == "ok");
  CHECK(r.summary["error"].is_null());
  CHECK(r.summary["version"] == kVersion);
  CHECK(slurp(r.directory / "config.json") == text);
  CHECK(r.summary["metrics"]["max_relative_error_A"].get<double>() <= 1e-6);
  check_record(r);

  const auto traj = rons::cli::detail::read_csv(r.directory / "trajectory.csv");
  CHECK(traj.header == std::vector<std::string>{"t", "A", "L", "phi", "J", "J_raw", "I1", "I2", "cond_M", "cond_C"});
  CHECK(std::isnan(traj.rows[0][traj.column("I1")]));
  CHECK(std::isnan(traj.rows[0][traj.column("cond_C")]));
  CHECK(traj.rows[0][traj.column("cond_M")] >= 1.0);
  CHECK(traj.rows.back()[0] == 10.0);
}

TEST_CASE("every experiment writes a schema-valid record") {
  TempDir tmp;
  // Short horizons keep this a smoke test; the acceptance binary runs the defaults.
  const std::vector<Json> configs = {
      quick("advdiff-exact"),
      quick("nlse-focusing", {{"t_end", 4.0}, {"dns_modes", 128}}),
      quick("nlse-defocusing", {{"t_end", 4.0}, {"dns_modes", 128}}),
      quick("nlse-unconstrained", {{"t_end", 4.0}}),
      quick("euler-dipole", {{"t_end", 1.0}}),
      quick("euler-pair", {{"t_end", 1.0}}),
      quick("euler-leapfrog", {{"t_end", 0.2}}),
      quick("galerkin-equivalence"),
      quick("appendixA-instability"),
      quick("fit-demo", {{"t_end", 2.0}}),
  };
  for (const Json& c : configs) {
    const RunRecord r = run_experiment(c, tmp.path);
    CHECK(r.exit_code == kExitOk);
    check_record(r);
  }
}

TEST_CASE("identical configs give byte-identical CSVs") {
  TempDir tmp;
  for (const Json& c : {quick("euler-dipole", {{"t_end", 2.0}}), quick("nlse-defocusing", {{"t_end", 5.0}, {"dns_modes", 128}}),
                        quick("appendixA-instability")}) {
    Json first = c, second = c;
    first["output_dir"] = "first";
    second["output_dir"] = "second";
    const RunRecord a = run_experiment(first, tmp.path);
    const RunRecord b = run_experiment(second, tmp.path);
    int compared = 0;
    for (const auto& [role, file] : a.summary["files"].items()) {
      const std::string name = file.get<std::string>();
      if (fs::path(name).extension() != ".csv") continue;
      CHECK_MESSAGE(slurp(a.directory / name) == slurp(b.directory / name), name);
      ++compared;
    }
    CHECK(compared >= 2);
  }
}

TEST_CASE("failures land in the summary") {
  TempDir tmp;
  SUBCASE("validation inside the run") {
    const RunRecord r = run_experiment(quick("advdiff-exact", {{"L0", -1.0}}), tmp.path);
    CHECK(r.exit_code == kExitValidation);
    CHECK(r.summary["status"] == "failed");
    CHECK(r.summary["error"]["category"] == "validation");
    check_record(r);
  }
  SUBCASE("numerical abort") {
    // Two coincident identical vortices have dependent tangents.
    const RunRecord r = run_experiment(quick("euler-pair", {{"x", {0.0, 0.0}}, {"t_end", 1.0}}), tmp.path);
    CHECK(r.exit_code == kExitNumerical);
    CHECK(r.summary["error"]["category"] == "immersion");
    check_record(r);
  }
  SUBCASE("abort keeps the partial trajectory") {
    const RunRecord r = run_experiment(quick("advdiff-exact", {{"max_steps", 3}}), tmp.path);
    CHECK(r.exit_code == kExitNumerical);
    CHECK(r.summary["error"]["category"] == "blowup");
    REQUIRE(r.summary["files"].contains("trajectory"));
    const auto traj = rons::cli::detail::read_csv(r.directory / "trajectory.csv");
    CHECK(!traj.rows.empty());
    CHECK(traj.rows.back()[0] < 10.0);
    check_record(r);
  }
  SUBCASE("config errors are raised before anything is written") {
    CHECK_THROWS_AS(run_experiment(quick("advdiff-exact", {{"bogus", 1}}), tmp.path), ValidationError);
    CHECK(fs::is_empty(tmp.path));
  }
}

TEST_CASE("compare") {
  TempDir tmp;
  const RunRecord defocus = run_experiment(quick("nlse-defocusing", {{"t_end", 10.0}}), tmp.path);
  const std::string summary = (defocus.directory / "summary.json").string();

  SUBCASE("identical records give zero metrics") {
    const Json c = compare(summary, summary);
    CHECK(c["columns"]["abs_u0"]["sup_gap"] == 0.0);
    CHECK(c["columns"]["abs_u0"]["peak_gap"] == 0.0);
    CHECK(c["columns"]["abs_u0"]["peak_time_gap"] == 0.0);
    CHECK(c["samples"] == 101);
  }
  SUBCASE("RONS against DNS") {
    const Json c = compare(summary, summary + "#dns_origin");
    const double gap = c["columns"]["abs_u0"]["sup_gap"].get<double>();
    CHECK(gap > 0.0);
    CHECK(gap == doctest::Approx(defocus.summary["metrics"]["origin_sup_gap"].get<double>()).epsilon(1e-6));
  }
  SUBCASE("vortex tracks") {
    const RunRecord pair = run_experiment(quick("euler-pair", {{"t_end", 5.0}, {"pv_circulation", "core"}}), tmp.path);
    const std::string s = (pair.directory / "summary.json").string();
    const Json same = compare(s, s);
    CHECK(same["angular_velocity"]["gap"] == 0.0);
    const Json c = compare(s, s + "#point_vortex_centers");
    CHECK(c["angular_velocity"]["a"].get<double>() ==
          doctest::Approx(pair.summary["metrics"]["angular_velocity"].get<double>()).epsilon(1e-3));
    CHECK(c["angular_velocity"]["b"].get<double>() ==
          doctest::Approx(pair.summary["metrics"]["core_circulation_angular_velocity"].get<double>()).epsilon(1e-6));
    CHECK(c["angular_velocity"]["relative_gap"].is_number());
  }
  SUBCASE("mismatched experiments") {
    const RunRecord adv = run_experiment(quick("advdiff-exact"), tmp.path);
    CHECK_THROWS_AS(compare(summary, (adv.directory / "summary.json").string()), ValidationError);
    CHECK_THROWS_AS(compare(summary, summary + "#nope"), ValidationError);
    CHECK_THROWS_AS(compare(summary, (tmp.path / "missing.json").string()), ValidationError);
  }
}

TEST_CASE("sweep") {
  TempDir tmp;
  const Json base = quick("advdiff-exact", {{"t_end", 2.0}});
  const SweepResult s = sweep(base, "nu", {"0.05", "0.1", "0.2"}, tmp.path, 2);
  CHECK(s.exit_code == kExitOk);
  REQUIRE(s.runs.size() == 3);
  std::set<fs::path> dirs;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s.runs[i].summary["config"]["nu"] == std::vector<double>{0.05, 0.1, 0.2}[i]);
    dirs.insert(s.runs[i].directory);
    check_record(s.runs[i]);
  }
  CHECK(dirs.size() == 3);
  CHECK(s.runs[0].directory == tmp.path / "advdiff-exact" / "nu=0.05");

  const SweepResult mixed = sweep(base, "L0", {"1.0", "-1.0"}, tmp.path, 2);
  CHECK(mixed.exit_code == kExitValidation);
  CHECK(sweep(base, "nu", {"\"fast\""}, tmp.path, 1).exit_code == kExitValidation);
  CHECK_THROWS_AS(sweep(base, "bogus", {"1"}, tmp.path, 1), ValidationError);
  CHECK_THROWS_AS(sweep(base, "nu", {}, tmp.path, 1), ValidationError);
}

TEST_CASE("schema validator") {
  const Json& schema = summary_schema();
  CHECK(schema["required"].size() == 13);
  TempDir tmp;
  Json good = run_experiment(quick("galerkin-equivalence"), tmp.path).summary;
  CHECK(validate_against_schema(good, schema).empty());

  Json missing = good;
  missing.erase("metrics");
  CHECK(validate_against_schema(missing, schema).size() == 1);
  Json wrong_status = good;
  wrong_status["status"] = "done";
  CHECK(!validate_against_schema(wrong_status, schema).empty());
  Json extra = good;
  extra["surprise"] = 1;
  CHECK(!validate_against_schema(extra, schema).empty());
  Json nested = good;
  nested["metrics"]["deep"] = {{"a", 1}};
  CHECK(!validate_against_schema(nested, schema).empty());
  Json bad_error = good;
  bad_error["error"] = {{"category", "x"}};
  CHECK(!validate_against_schema(bad_error, schema).empty());
  Json negative = good;
  negative["wall_time_seconds"] = -1.0;
  CHECK(!validate_against_schema(negative, schema).empty());
}

TEST_CASE("CSV formatting") {
  CHECK(rons::cli::detail::format_number(0.1) == "0.10000000000000001");
  CHECK(rons::cli::detail::format_number(std::nan("")) == "nan");
  CHECK(rons::cli::detail::format_number(-INFINITY) == "-inf");
  CHECK(rons::cli::detail::format_number(3.0) == "3");
  TempDir tmp;
  rons::cli::detail::write_csv(tmp.path / "x.csv", {"t", "v"}, {{0.0, 0.1}, {1.0, std::nan("")}});
  CHECK(slurp(tmp.path / "x.csv") == "t,v\n0,0.10000000000000001\n1,nan\n");
  const auto back = rons::cli::detail::read_csv(tmp.path / "x.csv");
  CHECK(back.rows[0][1] == 0.1);
  CHECK(std::isnan(back.rows[1][1]));
  CHECK_THROWS_AS(rons::cli::detail::write_csv(tmp.path / "y.csv", {"t"}, {{0.0, 1.0}}), AlignmentError);
}
