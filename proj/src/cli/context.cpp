#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "internal.hpp"
#include "rons/errors.hpp"

namespace rons::cli::detail {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<Row>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const Row& row : rows) {
    if (row.size() != header.size()) {
      throw AlignmentError(path.filename().string() + ": row has " + std::to_string(row.size()) +
                           " values for " + std::to_string(header.size()) + " columns");
    }
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw ValidationError("failed writing " + path.string());
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + " is empty");
  std::stringstream head(line);
  for (std::string cell; std::getline(head, cell, ',');) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row row;
    std::stringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) {
      // strtod understands nan and inf, which the writer emits.
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw ValidationError(path.string() + ": not a number: \"" + cell + "\"");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw ValidationError(path.string() + ": ragged row");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RunContext::RunContext(Json config, std::filesystem::path directory)
    : config_(std::move(config)), directory_(std::move(directory)) {}

const Json& RunContext::at(const std::string& key) const {
  if (!config_.contains(key)) throw ValidationError("missing config key \"" + key + "\"");
  return config_[key];
}

double RunContext::number(const std::string& key) const { return at(key).get<double>(); }
long RunContext::integer(const std::string& key) const { return at(key).get<long>(); }
bool RunContext::flag(const std::string& key) const { return at(key).get<bool>(); }
std::string RunContext::text(const std::string& key) const { return at(key).get<std::string>(); }
std::vector<double> RunContext::numbers(const std::string& key) const {
  return at(key).get<std::vector<double>>();
}

void RunContext::warn(const std::string& message) { warnings_.push_back(message); }

void RunContext::register_file(const std::string& role, const std::string& filename) {
  files_[role] = filename;
}

void RunContext::write_file(const std::string& role, const std::string& filename,
                            const std::vector<std::string>& header, const std::vector<Row>& rows) {
  write_csv(directory_ / filename, header, rows);
  register_file(role, filename);
}

void RunContext::write_series(const std::string& name, const std::string& filename,
                              const std::vector<std::string>& header,
                              const std::vector<Row>& rows) {
  write_file("series:" + name, filename, header, rows);
  series_[name] = filename;
}

void RunContext::write_trajectory(const std::string& role, const std::string& filename,
                                  const Trajectory& trajectory) {
  std::vector<std::string> header{"t"};
  header.insert(header.end(), trajectory.labels.begin(), trajectory.labels.end());
  for (const char* column : {"J", "J_raw", "I1", "I2", "cond_M", "cond_C"}) header.emplace_back(column);

  const double nan = std::nan("");
  std::vector<Row> rows(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    Row& row = rows[i];
    row.push_back(trajectory.times[i]);
    for (Eigen::Index k = 0; k < trajectory.states[i].size(); ++k) row.push_back(trajectory.states[i](k));
    row.insert(row.end(), 6, nan);
  }
  const std::size_t base = 1 + trajectory.labels.size();
  for (const StepDiagnostics& d : trajectory.diagnostics) {
    Row& row = rows[d.step];
    row[base] = d.J;
    row[base + 1] = d.J_raw;
    if (d.quantities.size() > 0) row[base + 2] = d.quantities(0);
    if (d.quantities.size() > 1) row[base + 3] = d.quantities(1);
    row[base + 4] = d.condition_M;
    if (trajectory.constrained) row[base + 5] = d.condition_C;
  }
  write_file(role, filename, header, rows);
}

IntegratorConfig RunContext::integrator() const {
  IntegratorConfig c;
  c.scheme = scheme_from_string(text("scheme"));
  c.dt = number("dt");
  c.rtol = number("rtol");
  c.atol = number("atol");
  c.t_end = number("t_end");
  c.diagnostic_stride = static_cast<int>(integer("diagnostic_stride"));
  c.max_steps = integer("max_steps");
  validate(c);
  return c;
}

RuleProvider RunContext::tracking_rules() const {
  RuleProvider::Tracking t;
  t.margin = number("tracking_margin");
  t.spacing = number("tracking_spacing");
  t.min_nodes = static_cast<int>(integer("tracking_min_nodes"));
  return RuleProvider::tracking(t);
}

AssemblyOptions RunContext::assembly() const {
  AssemblyOptions o;
  o.jitter = number("jitter");
  if (o.jitter < 0.0) throw ValidationError("jitter must be nonnegative");
  return o;
}

void record_trajectory_metrics(RunContext& ctx, const Trajectory& trajectory,
                               const std::string& prefix) {
  Json& m = ctx.metrics();
  double worst_M = 0.0, worst_C = 0.0;
  for (const auto& d : trajectory.diagnostics) {
    worst_M = std::max(worst_M, d.condition_M);
    worst_C = std::max(worst_C, d.condition_C);
  }
  m[prefix + "accepted_steps"] = trajectory.size() - 1;
  m[prefix + "rejected_steps"] = trajectory.stats.rejected;
  m[prefix + "rhs_evaluations"] = trajectory.stats.evaluations;
  m[prefix + "max_condition_M"] = worst_M;
  m[prefix + "max_condition_C"] = trajectory.constrained ? Json(worst_C) : Json(nullptr);
  // Every accepted step factored M (and C when constrained); a failed
  // factorization aborts the run instead of reaching this point.
  m[prefix + "cholesky_failures"] = 0;
  m[prefix + "spd_checked_steps"] = trajectory.diagnostics.size();
  m[prefix + "constrained"] = trajectory.constrained;
  if (!trajectory.quantity_names.empty()) {
    const Eigen::VectorXd drift = trajectory.max_relative_drift();
    Json names = Json::array(), drifts = Json::array();
    for (std::size_t k = 0; k < trajectory.quantity_names.size(); ++k) {
      names.push_back(trajectory.quantity_names[k]);
      drifts.push_back(drift(static_cast<Eigen::Index>(k)));
    }
    m[prefix + "quantities"] = names;
    m[prefix + "max_relative_drift"] = drifts;
    m[prefix + "max_constraint_violation"] = trajectory.max_constraint_violation();
  }
  for (const auto& d : trajectory.diagnostics) {
    if (!std::isfinite(d.J)) {
      ctx.warn(prefix + "non-finite residual at t = " + format_number(d.t));
      break;
    }
  }
}

double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw ValidationError("slope fit needs two samples");
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= static_cast<double>(t.size());
  my /= static_cast<double>(t.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  if (den == 0.0) throw ValidationError("slope fit needs distinct times");
  return num / den;
}

double fit_angular_velocity(const std::vector<double>& t, const std::vector<double>& x1,
                            const std::vector<double>& y1, const std::vector<double>& x2,
                            const std::vector<double>& y2) {
  std::vector<double> angle(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    angle[i] = std::atan2(y2[i] - y1[i], x2[i] - x1[i]);
    if (i > 0) {
      const double two_pi = 2.0 * std::acos(-1.0);
      angle[i] -= two_pi * std::round((angle[i] - angle[i - 1]) / two_pi);
    }
  }
  return fit_slope(t, angle);
}

std::vector<double> sample_times(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ValidationError("sample spacing and horizon must be positive");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor(t_end / dt + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(std::min(t_end, static_cast<double>(i) * dt));
  if (out.back() < t_end) out.push_back(t_end);
  return out;
}

}  // namespace rons::cli::detail
