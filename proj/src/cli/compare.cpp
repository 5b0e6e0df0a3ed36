#include <algorithm>
#include <cmath>
#include <fstream>

#include "internal.hpp"
#include "rons/errors.hpp"

namespace rons::cli {
namespace {

using detail::CsvTable;
using detail::Row;

struct SeriesRef {
  std::filesystem::path summary_path;
  Json summary;
  std::string series;
  CsvTable table;
};

SeriesRef load(const std::string& spec) {
  SeriesRef ref;
  const auto hash = spec.find('#');
  ref.summary_path = spec.substr(0, hash);
  if (std::filesystem::is_directory(ref.summary_path)) ref.summary_path /= "summary.json";
  std::ifstream in(ref.summary_path);
  if (!in) throw ValidationError("cannot read " + ref.summary_path.string());
  ref.summary = Json::parse(in, nullptr, false);
  if (ref.summary.is_discarded() || !ref.summary.is_object()) {
    throw ValidationError(ref.summary_path.string() + " is not a run summary");
  }
  const Json& series = ref.summary.value("series", Json::object());
  if (hash != std::string::npos) {
    ref.series = spec.substr(hash + 1);
  } else if (ref.summary.value("primary_series", Json(nullptr)).is_string()) {
    ref.series = ref.summary["primary_series"].get<std::string>();
  } else {
    throw ValidationError(ref.summary_path.string() + " has no default series; use summary.json#name");
  }
  if (!series.contains(ref.series)) {
    throw ValidationError(ref.summary_path.string() + " has no series \"" + ref.series + "\"");
  }
  ref.table = detail::read_csv(ref.summary_path.parent_path() / series[ref.series].get<std::string>());
  if (ref.table.column("t") != 0 || ref.table.rows.empty()) {
    throw ValidationError("series \"" + ref.series + "\" has no leading t column");
  }
  for (std::size_t i = 1; i < ref.table.rows.size(); ++i) {
    if (!(ref.table.rows[i][0] > ref.table.rows[i - 1][0])) {
      throw ValidationError("series \"" + ref.series + "\" times are not increasing");
    }
  }
  return ref;
}

std::string group_of(const Json& summary) {
  const std::string name = summary.value("experiment", std::string());
  return name.substr(0, name.find('-'));
}

// Linear interpolation of column c at time t; t must lie inside the table.
double interpolate(const CsvTable& table, int c, double t) {
  const auto& rows = table.rows;
  if (rows.size() == 1) return rows[0][c];
  std::size_t hi = 1;
  while (hi + 1 < rows.size() && rows[hi][0] < t) ++hi;
  const Row& a = rows[hi - 1];
  const Row& b = rows[hi];
  const double s = (t - a[0]) / (b[0] - a[0]);
  return a[c] + std::clamp(s, 0.0, 1.0) * (b[c] - a[c]);
}

Json describe(const SeriesRef& ref) {
  return {{"summary", ref.summary_path.string()},
          {"experiment", ref.summary.value("experiment", std::string())},
          {"series", ref.series}};
}

bool has_pair_tracks(const CsvTable& t) {
  for (const char* c : {"x1", "y1", "x2", "y2"}) {
    if (t.column(c) < 0) return false;
  }
  return true;
}

double angular_velocity_on(const CsvTable& t, double from, double to) {
  std::vector<double> time, x1, y1, x2, y2;
  for (const Row& r : t.rows) {
    if (r[0] < from - 1e-12 || r[0] > to + 1e-12) continue;
    time.push_back(r[0]);
    x1.push_back(r[t.column("x1")]);
    y1.push_back(r[t.column("y1")]);
    x2.push_back(r[t.column("x2")]);
    y2.push_back(r[t.column("y2")]);
  }
  return detail::fit_angular_velocity(time, x1, y1, x2, y2);
}

}  // namespace

Json compare(const std::string& spec_a, const std::string& spec_b) {
  const SeriesRef a = load(spec_a), b = load(spec_b);
  if (group_of(a.summary) != group_of(b.summary)) {
    throw ValidationError("mismatched experiments: " + a.summary.value("experiment", std::string("?")) + " vs " +
                          b.summary.value("experiment", std::string("?")));
  }
  std::vector<std::string> shared;
  for (std::size_t c = 1; c < a.table.header.size(); ++c) {
    if (b.table.column(a.table.header[c]) >= 0) shared.push_back(a.table.header[c]);
  }
  if (shared.empty()) throw ValidationError("mismatched experiments: the series share no columns");

  const double from = std::max(a.table.rows.front()[0], b.table.rows.front()[0]);
  const double to = std::min(a.table.rows.back()[0], b.table.rows.back()[0]);
  if (from > to) throw ValidationError("the series do not overlap in time");

  std::vector<const Row*> samples;
  for (const Row& r : a.table.rows) {
    if (r[0] >= from && r[0] <= to) samples.push_back(&r);
  }
  if (samples.empty()) throw ValidationError("no samples of the first series fall inside the overlap");

  Json columns = Json::object();
  for (const std::string& name : shared) {
    const int ca = a.table.column(name), cb = b.table.column(name);
    double sup = 0.0, peak_a = -1.0, peak_b = -1.0, t_a = 0.0, t_b = 0.0;
    for (const Row* r : samples) {
      const double va = (*r)[ca], vb = interpolate(b.table, cb, (*r)[0]);
      sup = std::max(sup, std::abs(va - vb));
      if (std::abs(va) > peak_a) {
        peak_a = std::abs(va);
        t_a = (*r)[0];
      }
    }
    for (const Row& r : b.table.rows) {
      if (r[0] < from || r[0] > to) continue;
      if (std::abs(r[cb]) > peak_b) {
        peak_b = std::abs(r[cb]);
        t_b = r[0];
      }
    }
    columns[name] = {{"sup_gap", sup},       {"peak_a", peak_a},           {"peak_b", peak_b},
                     {"peak_gap", peak_a - peak_b}, {"peak_time_a", t_a}, {"peak_time_b", t_b},
                     {"peak_time_gap", t_a - t_b}};
  }

  Json out = {{"a", describe(a)},
              {"b", describe(b)},
              {"t_start", from},
              {"t_end", to},
              {"samples", samples.size()},
              {"columns", columns}};
  if (has_pair_tracks(a.table) && has_pair_tracks(b.table) && to > from) {
    const double wa = angular_velocity_on(a.table, from, to), wb = angular_velocity_on(b.table, from, to);
    out["angular_velocity"] = {{"a", wa},
                               {"b", wb},
                               {"gap", wa - wb},
                               {"relative_gap", wb != 0.0 ? Json(std::abs(wa - wb) / std::abs(wb)) : Json(nullptr)}};
  }
  return out;
}

}  // namespace rons::cli
