// Pieces shared by the experiment bodies and the runner.
#ifndef RONS_CLI_INTERNAL_HPP
#define RONS_CLI_INTERNAL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "rons/engine.hpp"
#include "rons/experiments.hpp"
#include "rons/integrate.hpp"

namespace rons::cli::detail {

using Row = std::vector<double>;

// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double value);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<Row>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Index of a column, or -1.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// What an experiment body sees: its resolved config, the run directory and
// the summary fields it fills in.
class RunContext {
 public:
  RunContext(Json config, std::filesystem::path directory);

  const Json& config() const { return config_; }
  const std::filesystem::path& directory() const { return directory_; }

  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  Json& metrics() { return metrics_; }
  const Json& metrics() const { return metrics_; }
  const Json& files() const { return files_; }
  const Json& series() const { return series_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  void warn(const std::string& message);

  // Writes a CSV into the run directory and lists it under `files`.
  void write_file(const std::string& role, const std::string& filename,
                  const std::vector<std::string>& header, const std::vector<Row>& rows);
  // The same, additionally listed under `series` for compare.
  void write_series(const std::string& name, const std::string& filename,
                    const std::vector<std::string>& header, const std::vector<Row>& rows);
  // t, q labels, J, J_raw, I1, I2, cond_M, cond_C.
  void write_trajectory(const std::string& role, const std::string& filename,
                        const Trajectory& trajectory);
  void register_file(const std::string& role, const std::string& filename);

  // Integrator settings from scheme, dt, rtol, atol, t_end, diagnostic_stride, max_steps.
  IntegratorConfig integrator() const;
  // Tracking rule settings from tracking_margin, tracking_spacing, tracking_min_nodes.
  RuleProvider tracking_rules() const;
  AssemblyOptions assembly() const;

 private:
  const Json& at(const std::string& key) const;

  Json config_;
  std::filesystem::path directory_;
  Json metrics_ = Json::object();
  Json files_ = Json::object();
  Json series_ = Json::object();
  std::vector<std::string> warnings_;
};

using ExperimentBody = void (*)(RunContext&);

struct ExperimentEntry {
  ExperimentInfo info;
  ExperimentBody body;
  std::string primary_series;  // default series for compare, may be empty
};

const std::vector<ExperimentEntry>& entries();

// Bodies, one per registered experiment.
void run_advdiff_exact(RunContext& ctx);
void run_nlse_focusing(RunContext& ctx);
void run_nlse_defocusing(RunContext& ctx);
void run_nlse_unconstrained(RunContext& ctx);
void run_euler_dipole(RunContext& ctx);
void run_euler_pair(RunContext& ctx);
void run_euler_leapfrog(RunContext& ctx);
void run_galerkin_equivalence(RunContext& ctx);
void run_appendix_instability(RunContext& ctx);
void run_fit_demo(RunContext& ctx);

// Shared trajectory metrics: drifts, worst conditioning, constraint violation,
// step counts and Cholesky failure count (always zero for a finished run).
void record_trajectory_metrics(RunContext& ctx, const Trajectory& trajectory,
                               const std::string& prefix = {});

// Fitted angular velocity of the line through two tracked points, from the
// unwrapped angle by least squares.
double fit_angular_velocity(const std::vector<double>& t, const std::vector<double>& x1,
                            const std::vector<double>& y1, const std::vector<double>& x2,
                            const std::vector<double>& y2);

// Least-squares slope of y against t.
double fit_slope(const std::vector<double>& t, const std::vector<double>& y);

// Uniform sample times 0, dt, 2 dt, ..., always ending at t_end.
std::vector<double> sample_times(double t_end, double dt);

}  // namespace rons::cli::detail

#endif  // RONS_CLI_INTERNAL_HPP
