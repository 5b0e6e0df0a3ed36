#include <cmath>
#include <numbers>

#include "internal.hpp"
#include "rons/errors.hpp"

namespace rons::cli {
namespace {

using detail::ExperimentEntry;

Json integration(double t_end) {
  return {{"scheme", "rk45-adaptive"}, {"dt", 0.01},           {"rtol", 1e-8},
          {"atol", 1e-10},             {"t_end", t_end},       {"diagnostic_stride", 1},
          {"max_steps", 10000000},     {"jitter", 0.0}};
}

Json tracking() {
  return {{"tracking_margin", 6.0}, {"tracking_spacing", 0.25}, {"tracking_min_nodes", 16}};
}

Json merged(std::initializer_list<Json> parts) {
  Json out = Json::object();
  for (const Json& part : parts) {
    for (const auto& [key, value] : part.items()) out[key] = value;
  }
  return out;
}

Json header(const std::string& name) { return {{"experiment", name}, {"output_dir", ""}}; }

Json nlse_keys(double L0, double V0, double t_end, bool with_dns) {
  Json keys = {{"A0", 0.2},
               {"L0", L0},
               {"V0", V0},
               {"phi0", 0.0},
               {"invariants", "closed-form"},
               {"series_dt", 0.1},
               {"snapshot_count", 5},
               {"field_points", 512},
               {"field_half_width", 100.0}};
  if (with_dns) {
    keys["constrained"] = true;
    keys["monotone_from"] = 1.0;
    keys["dns"] = true;
    keys["dns_modes"] = 512;
    keys["dns_length"] = 64.0 * std::numbers::sqrt2 * std::numbers::pi;
    keys["dns_dt"] = 0.025;
    keys["dns_contour_points"] = 32;
    keys["dns_refinement_check"] = false;
  }
  return merged({keys, integration(t_end), tracking()});
}

Json euler_keys(std::vector<double> A, std::vector<double> L, std::vector<double> x,
                std::vector<double> y, double t_end, double field_half_width) {
  return merged({{{"A", A},
                  {"L", L},
                  {"x", x},
                  {"y", y},
                  {"nu", 0.0},
                  {"constrained", true},
                  {"point_vortex", true},
                  {"pv_circulation", "quadrature"},
                  {"circulation_half_width", 8.0},
                  {"circulation_nodes", 200},
                  {"series_dt", 0.05},
                  {"snapshot_count", 5},
                  {"field_points", 64},
                  {"field_half_width", field_half_width}},
                 integration(t_end), tracking()});
}

std::vector<ExperimentEntry> build() {
  std::vector<ExperimentEntry> out;
  auto add = [&](std::string name, std::string description, Json keys, detail::ExperimentBody body,
                 std::string primary) {
    out.push_back({{name, std::move(description), merged({header(name), keys})}, body, std::move(primary)});
  };

  add("advdiff-exact",
      "Sine ansatz under advection-diffusion against the exact solution.",
      merged({{{"A0", 1.0},
               {"L0", 1.0},
               {"phi0", 0.0},
               {"c", 1.0},
               {"nu", 0.1},
               {"quadrature_nodes", 64},
               {"series_dt", 0.1},
               {"snapshot_count", 5},
               {"field_points", 256}},
              integration(10.0)}),
      detail::run_advdiff_exact, "amplitude");

  add("nlse-focusing",
      "Chirped Gaussian under the focusing NLSE, constrained RONS against pseudospectral DNS.",
      nlse_keys(20.0, -0.05, 80.0, true), detail::run_nlse_focusing, "origin");

  add("nlse-defocusing",
      "Wide Gaussian under the NLSE that disperses, constrained RONS against pseudospectral DNS.",
      nlse_keys(5.0, 0.0, 40.0, true), detail::run_nlse_defocusing, "origin");

  add("nlse-unconstrained",
      "The focusing case with and without mass and energy constraints.",
      nlse_keys(20.0, -0.05, 80.0, false), detail::run_nlse_unconstrained, "origin");

  add("euler-dipole", "Counter-rotating Gaussian vortex pair translating as a dipole.",
      euler_keys({1.0, -1.0}, {0.75, 0.75}, {-3.0, -3.0}, {0.5, -0.5}, 10.0, 4.0),
      detail::run_euler_dipole, "centers");

  add("euler-pair", "Co-rotating Gaussian vortex pair.",
      euler_keys({1.0, 1.0}, {1.0, 1.0}, {-1.0, 1.0}, {0.0, 0.0}, 40.0, 4.0),
      detail::run_euler_pair, "centers");

  add("euler-leapfrog", "Two opposite-signed vortex pairs leapfrogging each other.",
      euler_keys({1.0, -1.0, 1.0, -1.0}, {0.3, 0.3, 0.3, 0.3}, {0.5, 0.5, -0.5, -0.5},
                 {0.5, -0.5, 0.5, -0.5}, 20.0, 2.0),
      detail::run_euler_leapfrog, "centers");

  add("galerkin-equivalence",
      "RONS rate against the Galerkin projection on an orthonormal Fourier family.",
      merged({{{"modes", 5},
               {"period", 2.0 * std::numbers::pi},
               {"c", 1.0},
               {"nu", 0.1},
               {"states", 100},
               {"seed", 7},
               {"quadrature_nodes", 32}},
              integration(1.0)}),
      detail::run_galerkin_equivalence, "");

  add("appendixA-instability",
      "Euler-Lagrange minimizers of the time-integrated residual against the Galerkin decay.",
      merged({{{"lambdas", {0.5, 1.0, 2.0}},
               {"extra_lambdas", {0.7, 1.3}},
               {"generic_horizon", 10.0},
               {"stable_horizon", 40.0},
               {"decay_horizon", 10.0},
               {"fit_fraction", 0.5},
               {"quadrature_nodes", 32}},
              integration(1.0)}),
      detail::run_appendix_instability, "");

  add("fit-demo", "Fit the Gaussian ansatz to an NLSE soliton, then evolve it.",
      merged({{{"target_amplitude", 0.3},
               {"A_guess", 0.25},
               {"L_guess", 8.0},
               {"V_guess", 0.0},
               {"phi_guess", 0.0},
               {"fit_half_width", 80.0},
               {"fit_nodes", 1024},
               {"fit_max_iterations", 200},
               {"fit_starts", 1},
               {"constrained", true},
               {"invariants", "closed-form"},
               {"series_dt", 0.1},
               {"snapshot_count", 5},
               {"field_points", 512},
               {"field_half_width", 60.0}},
              integration(20.0), tracking()}),
      detail::run_fit_demo, "origin");
  return out;
}

bool same_kind(const Json& value, const Json& reference) {
  if (reference.is_boolean()) return value.is_boolean();
  if (reference.is_string()) return value.is_string();
  if (reference.is_number_integer()) return value.is_number_integer();
  if (reference.is_number()) return value.is_number();
  if (reference.is_array()) {
    if (!value.is_array()) return false;
    for (const Json& v : value) {
      if (!v.is_number()) return false;
    }
    return true;
  }
  return false;
}

std::string kind_name(const Json& reference) {
  if (reference.is_boolean()) return "a boolean";
  if (reference.is_string()) return "a string";
  if (reference.is_number_integer()) return "an integer";
  if (reference.is_number()) return "a number";
  if (reference.is_array()) return "an array of numbers";
  return "a scalar";
}

}  // namespace

namespace detail {

const std::vector<ExperimentEntry>& entries() {
  static const std::vector<ExperimentEntry> table = build();
  return table;
}

}  // namespace detail

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& e : detail::entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& info : registry()) {
    if (info.name == name) return info;
  }
  std::string known;
  for (const auto& info : registry()) known += (known.empty() ? "" : ", ") + info.name;
  throw ValidationError("unknown experiment \"" + name + "\" (known: " + known + ")");
}

Json resolve_config(const Json& user) {
  if (!user.is_object()) throw ValidationError("config must be a JSON object");
  if (!user.contains("experiment") || !user["experiment"].is_string()) {
    throw ValidationError("config needs a string \"experiment\" key");
  }
  const ExperimentInfo& info = find_experiment(user["experiment"].get<std::string>());
  Json resolved = info.defaults;
  for (const auto& [key, value] : user.items()) {
    if (!info.defaults.contains(key)) {
      throw ValidationError("unknown key \"" + key + "\" for experiment " + info.name);
    }
    const Json& reference = info.defaults[key];
    if (!same_kind(value, reference)) {
      throw ValidationError("key \"" + key + "\" must be " + kind_name(reference));
    }
    // Integers are accepted where numbers are expected, but stored as numbers.
    resolved[key] = reference.is_number_float() ? Json(value.get<double>()) : value;
  }
  if (resolved["output_dir"].get<std::string>().empty()) resolved["output_dir"] = info.name;
  for (const auto& [key, value] : resolved.items()) {
    if (value.is_number_float() && !std::isfinite(value.get<double>())) {
      throw ValidationError("key \"" + key + "\" must be finite");
    }
  }
  return resolved;
}

Json parse_value(const std::string& text) {
  Json parsed = Json::parse(text, nullptr, false);
  if (parsed.is_discarded()) return Json(text);
  return parsed;
}

}  // namespace rons::cli
