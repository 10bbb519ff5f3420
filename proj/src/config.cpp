#include "metamorph/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "metamorph/errors.hpp"
#include "metamorph/io.hpp"

namespace metamorph {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path, msg);
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path.empty() ? "config" : path, "expected an object");
  if (!j.contains(key)) {
    fail(path.empty() ? std::string(key) : path + "." + key, "missing required field");
  }
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double number_field(const json& j, const std::string& path, const char* key) {
  return as_number(require(j, path, key), path + "." + key);
}

double number_or(const json& j, const std::string& path, const char* key,
                 double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), path + "." + key);
}

int int_field(const json& j, const std::string& path, const char* key) {
  const json& v = require(j, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

int int_or(const json& j, const std::string& path, const char* key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) fail(path + "." + key, "expected an integer");
  return j.at(key).get<int>();
}

bool bool_or(const json& j, const std::string& path, const char* key, bool fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(path + "." + key, "expected a boolean");
  return j.at(key).get<bool>();
}

std::string string_field(const json& j, const std::string& path, const char* key) {
  const json& v = require(j, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> vector_field(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// n x d matrix as array of arrays.
std::vector<double> matrix_field(const json& j, const std::string& path, int& n,
                                 int& d) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  n = static_cast<int>(j.size());
  std::vector<double> flat;
  d = -1;
  for (int i = 0; i < n; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    const std::vector<double> row = vector_field(j[i], row_path);
    if (d < 0) d = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != d || d == 0) {
      fail(row_path, "rows must be non-empty and of equal length");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

void check_file_exists(const std::string& file, const std::string& path) {
  if (!std::filesystem::exists(file)) fail(path, "referenced file not found: " + file);
}

KernelSpec parse_kernel(const json& j, const std::string& path) {
  KernelSpec spec;
  const std::string family = string_field(j, path, "family");
  if (family != "gaussian") fail(path + ".family", "unknown kernel family: " + family);
  spec.length_scale = number_field(j, path, "r");
  spec.amplitude = number_field(j, path, "g");
  if (!(spec.length_scale > 0.0)) fail(path + ".r", "must be positive");
  if (!(spec.amplitude > 0.0)) fail(path + ".g", "must be positive");
  return spec;
}

DeformationNoiseField parse_sigma_u_entry(const json& j, const std::string& path,
                                          int d) {
  DeformationNoiseField field;
  if (j.contains("constant")) {
    field.is_constant = true;
    field.amplitude = vector_field(j.at("constant"), path + ".constant");
  } else {
    field.center = vector_field(require(j, path, "center"), path + ".center");
    field.width = number_field(j, path, "width");
    field.amplitude = vector_field(require(j, path, "amplitude"), path + ".amplitude");
    if (!(field.width > 0.0)) fail(path + ".width", "must be positive");
    if (field.center.size() != field.amplitude.size()) {
      fail(path, "center and amplitude must have the same dimension");
    }
  }
  if (d > 0 && field.dim() != d) fail(path, "field dimension must match the system");
  return field;
}

Method parse_method(const json& j, const std::string& path) {
  const std::string name = string_field(j, path, "method");
  try {
    return method_from_string(name);
  } catch (const std::invalid_argument&) {
    fail(path + ".method", "must be \"heun\" or \"euler_maruyama_ito\"");
  }
}

IntegratorSpec parse_integrator(const json& root, const std::string& path) {
  const json& j = require(root, "", path.c_str());
  if (!j.is_object()) fail(path, "expected an object");
  IntegratorSpec spec;
  spec.method = j.contains("method") ? parse_method(j, path) : Method::heun;
  spec.T = number_field(j, path, "T");
  spec.steps = int_field(j, path, "steps");
  if (!(spec.T > 0.0)) fail(path + ".T", "must be positive");
  if (spec.steps < 1) fail(path + ".steps", "must be >= 1");
  return spec;
}

EnsembleBlock parse_ensemble(const json& root) {
  EnsembleBlock block;
  if (!root.contains("ensemble")) return block;
  const json& j = root.at("ensemble");
  const std::string path = "ensemble";
  if (j.contains("base_seed")) {
    const json& s = j.at("base_seed");
    if (!s.is_number_integer() && !s.is_number_unsigned()) {
      fail(path + ".base_seed", "expected an integer");
    }
    block.base_seed = s.get<std::uint64_t>();
  }
  block.realizations = int_or(j, path, "realizations", 1);
  if (block.realizations < 1) fail(path + ".realizations", "must be >= 1");
  block.store_trajectories = bool_or(j, path, "store_trajectories", false);
  block.failure_threshold = number_or(j, path, "failure_threshold", 0.01);
  if (block.failure_threshold < 0.0) fail(path + ".failure_threshold", "must be >= 0");
  return block;
}

OutputSpec parse_output(const json& root, double T) {
  OutputSpec spec;
  spec.times = {T};
  if (!root.contains("output")) return spec;
  const json& j = root.at("output");
  const std::string path = "output";
  if (j.contains("directory")) spec.directory = string_field(j, path, "directory");
  if (j.contains("times")) {
    spec.times = vector_field(j.at("times"), path + ".times");
    for (double t : spec.times) {
      if (t < 0.0 || t > T + 1e-12) fail(path + ".times", "times must lie in [0, T]");
    }
  }
  if (j.contains("formats")) {
    spec.csv = false;
    spec.json = false;
    const json& f = j.at("formats");
    if (!f.is_array()) fail(path + ".formats", "expected an array");
    for (const auto& v : f) {
      const std::string s = v.get<std::string>();
      if (s == "csv") spec.csv = true;
      else if (s == "json") spec.json = true;
      else fail(path + ".formats", "unknown format: " + s);
    }
  }
  return spec;
}

LandmarkScenarioCfg parse_landmark_system(const json& j, const std::string& path) {
  LandmarkScenarioCfg cfg;
  cfg.system.kernel = parse_kernel(require(j, path, "kernel"), path + ".kernel");
  cfg.system.lambda = number_field(j, path, "lambda");
  if (cfg.system.lambda < 0.0) fail(path + ".lambda", "must be >= 0");

  int n = 0, d = 0;
  cfg.initial.q = matrix_field(require(j, path, "q0"), path + ".q0", n, d);
  cfg.initial.n = n;
  cfg.initial.d = d;
  int np = 0, dp = 0;
  cfg.initial.p = matrix_field(require(j, path, "p0"), path + ".p0", np, dp);
  if (np != n || dp != d) fail(path + ".p0", "shape must match q0");
  cfg.initial.validate();

  if (j.contains("noise")) {
    const json& noise = j.at("noise");
    const std::string npath = path + ".noise";
    if (noise.contains("sigma_u")) {
      const json& su = noise.at("sigma_u");
      if (!su.is_array()) fail(npath + ".sigma_u", "expected an array");
      for (std::size_t l = 0; l < su.size(); ++l) {
        cfg.system.sigma_u.push_back(parse_sigma_u_entry(
            su[l], npath + ".sigma_u[" + std::to_string(l) + "]", d));
      }
    }
    if (noise.contains("sigma_nu")) {
      const json& snu = noise.at("sigma_nu");
      const std::string spath = npath + ".sigma_nu";
      if (!snu.contains("per_landmark")) {
        fail(spath, "landmark systems need sigma_nu.per_landmark");
      }
      int nn = 0, nd = 0;
      const std::vector<double> flat =
          matrix_field(snu.at("per_landmark"), spath + ".per_landmark", nn, nd);
      if (nn != n || nd != d) fail(spath + ".per_landmark", "shape must match q0");
      cfg.system.sigma_nu.per_landmark.resize(n);
      for (int i = 0; i < n; ++i) {
        cfg.system.sigma_nu.per_landmark[i].assign(flat.begin() + i * d,
                                                   flat.begin() + (i + 1) * d);
      }
    }
  }

  if (j.contains("tracers")) {
    int m = 0, dt_ = 0;
    cfg.tracers.x = matrix_field(j.at("tracers"), path + ".tracers", m, dt_);
    if (dt_ != d) fail(path + ".tracers", "tracer dimension must match q0");
    cfg.tracers.m = m;
    cfg.tracers.d = d;
  }

  try {
    cfg.system.validate(n, d);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return cfg;
}

// Grid function forms for CH2 fields: bump (periodic distance), constant,
// sine, or a CSV column.
std::vector<double> parse_grid_function(const json& j, const std::string& path,
                                        const Grid1D& grid) {
  const int N = grid.N;
  std::vector<double> values(N, 0.0);
  const std::vector<double> x = grid.nodes();
  if (j.contains("constant")) {
    const double c = as_number(j.at("constant"), path + ".constant");
    values.assign(N, c);
  } else if (j.contains("sine")) {
    const json& s = j.at("sine");
    const std::string spath = path + ".sine";
    const double a = number_field(s, spath, "amplitude");
    const int mode = int_field(s, spath, "mode");
    const double phase = number_or(s, spath, "phase", 0.0);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < N; ++i) {
      values[i] = a * std::sin(two_pi * mode * x[i] / grid.L + phase);
    }
  } else if (j.contains("grid_values_file")) {
    const std::string file = j.at("grid_values_file").get<std::string>();
    check_file_exists(file, path + ".grid_values_file");
    const int column = int_or(j, path, "column", 0);
    const auto table = read_csv_table(file);
    if (static_cast<int>(table.size()) != N) {
      fail(path + ".grid_values_file", "expected one row per grid node");
    }
    for (int i = 0; i < N; ++i) {
      if (column >= static_cast<int>(table[i].size())) {
        fail(path + ".column", "column out of range in " + file);
      }
      values[i] = table[i][column];
    }
  } else if (j.contains("center") || j.contains("width") || j.contains("amplitude")) {
    const double c = number_field(j, path, "center");
    const double w = number_field(j, path, "width");
    double a = 0.0;
    const json& amp = require(j, path, "amplitude");
    if (amp.is_array()) {
      const std::vector<double> av = vector_field(amp, path + ".amplitude");
      if (av.size() != 1) fail(path + ".amplitude", "expected one component in 1D");
      a = av[0];
    } else {
      a = as_number(amp, path + ".amplitude");
    }
    if (!(w > 0.0)) fail(path + ".width", "must be positive");
    for (int i = 0; i < N; ++i) {
      double dist = std::fmod(std::abs(x[i] - c), grid.L);
      if (dist > 0.5 * grid.L) dist = grid.L - dist;
      values[i] = a * std::exp(-0.5 * dist * dist / (w * w));
    }
  } else {
    fail(path, "expected constant, sine, bump, or grid_values_file");
  }
  return values;
}

Ch2ScenarioCfg parse_ch2_system(const json& root, const IntegratorSpec& integrator,
                                std::vector<std::string>& warnings) {
  const json& j = require(root, "", "system");
  const std::string path = "system";
  Ch2ScenarioCfg cfg;
  const json& gj = require(j, path, "grid");
  cfg.grid.L = number_field(gj, path + ".grid", "L");
  cfg.grid.N = int_field(gj, path + ".grid", "N");
  try {
    cfg.grid.validate();
  } catch (const std::invalid_argument& e) {
    fail(path + ".grid", e.what());
  }
  cfg.initial.alpha = number_field(j, path, "alpha");
  if (!(cfg.initial.alpha > 0.0)) fail(path + ".alpha", "must be positive");

  const json& m0 = require(j, path, "m0");
  if (m0.contains("peakon")) {
    const json& pk = m0.at("peakon");
    const double c = number_field(pk, path + ".m0.peakon", "c");
    const double x0 = number_field(pk, path + ".m0.peakon", "x0");
    const Ch2State peakon = peakon_init(c, x0, cfg.initial.alpha, cfg.grid);
    cfg.initial.m = peakon.m;
  } else if (m0.contains("values_file")) {
    json alias = m0;
    alias["grid_values_file"] = m0.at("values_file");
    alias.erase("values_file");
    check_file_exists(alias.at("grid_values_file").get<std::string>(), path + ".m0");
    cfg.initial.m = parse_grid_function(alias, path + ".m0", cfg.grid);
  } else {
    cfg.initial.m = parse_grid_function(m0, path + ".m0", cfg.grid);
  }

  if (j.contains("rho0")) {
    cfg.initial.rho = parse_grid_function(j.at("rho0"), path + ".rho0", cfg.grid);
  } else {
    cfg.initial.rho.assign(cfg.grid.N, 0.0);
  }

  if (j.contains("noise")) {
    const json& noise = j.at("noise");
    const std::string npath = path + ".noise";
    auto parse_list = [&](const char* key, std::vector<std::vector<double>>& out) {
      if (!noise.contains(key)) return;
      const json& arr = noise.at(key);
      if (arr.is_object() && arr.contains("grid_values_file")) {
        // one column per channel
        const std::string file = arr.at("grid_values_file").get<std::string>();
        check_file_exists(file, npath + "." + key + ".grid_values_file");
        const auto table = read_csv_table(file);
        if (static_cast<int>(table.size()) != cfg.grid.N) {
          fail(npath + "." + key, "expected one row per grid node");
        }
        const std::size_t cols = table[0].size();
        out.assign(cols, std::vector<double>(cfg.grid.N));
        for (int i = 0; i < cfg.grid.N; ++i) {
          if (table[i].size() != cols) fail(npath + "." + key, "ragged CSV");
          for (std::size_t c = 0; c < cols; ++c) out[c][i] = table[i][c];
        }
        return;
      }
      if (!arr.is_array()) fail(npath + "." + key, "expected an array");
      for (std::size_t l = 0; l < arr.size(); ++l) {
        out.push_back(parse_grid_function(
            arr[l], npath + "." + key + "[" + std::to_string(l) + "]", cfg.grid));
      }
    };
    parse_list("sigma_u", cfg.noise.sigma_u_fields);
    parse_list("sigma_nu", cfg.noise.sigma_nu_fields);
  }

  // Advective time-step guideline: dt <= 0.25 dx / max(|u|, |sigma_u|).
  const std::vector<double> u0 =
      helmholtz_invert(cfg.initial.m, cfg.initial.alpha, cfg.grid);
  double vmax = 0.0;
  for (double v : u0) vmax = std::max(vmax, std::abs(v));
  for (const auto& f : cfg.noise.sigma_u_fields) {
    for (double v : f) vmax = std::max(vmax, std::abs(v));
  }
  const double dt = integrator.T / integrator.steps;
  if (vmax > 0.0 && dt > 0.25 * cfg.grid.dx() / vmax) {
    warnings.push_back("integrator.steps: dt exceeds the advective guideline 0.25*dx/max(|u|,|sigma_u|)");
  }
  return cfg;
}

MatchScenarioCfg parse_match(const json& root, const IntegratorSpec& integrator) {
  const json& j = require(root, "", "match");
  const std::string path = "match";
  MatchScenarioCfg cfg;
  cfg.problem.system.kernel = parse_kernel(require(j, path, "kernel"), path + ".kernel");
  cfg.problem.system.lambda = number_field(j, path, "lambda");
  if (cfg.problem.system.lambda < 0.0) fail(path + ".lambda", "must be >= 0");
  int n = 0, d = 0;
  cfg.problem.q0 = matrix_field(require(j, path, "q0"), path + ".q0", n, d);
  int nt = 0, dt_ = 0;
  cfg.problem.q_target =
      matrix_field(require(j, path, "q_target"), path + ".q_target", nt, dt_);
  if (nt != n || dt_ != d) fail(path + ".q_target", "shape must match q0");
  cfg.problem.n = n;
  cfg.problem.d = d;
  cfg.problem.T = integrator.T;
  cfg.problem.steps = integrator.steps;
  cfg.problem.tol = number_or(j, path, "tol", 1e-6);
  if (!(cfg.problem.tol > 0.0)) fail(path + ".tol", "must be positive");
  cfg.problem.max_iterations = int_or(j, path, "max_iterations", 50);
  if (cfg.problem.max_iterations < 1) fail(path + ".max_iterations", "must be >= 1");
  cfg.problem.penalty_s = number_or(j, path, "penalty_s", 0.0);
  if (cfg.problem.penalty_s < 0.0) fail(path + ".penalty_s", "must be >= 0");
  return cfg;
}

FdaScenarioCfg parse_fda(const json& root, const IntegratorSpec& integrator) {
  const json& j = require(root, "", "fda");
  const std::string path = "fda";
  FdaScenarioCfg cfg;
  cfg.spec.T = integrator.T;
  cfg.spec.steps = integrator.steps;

  auto parse_bump = [&](const json& b, const std::string& bpath) {
    GaussianBump1D bump;
    bump.center = number_field(b, bpath, "center");
    bump.width = number_field(b, bpath, "width");
    bump.height = number_field(b, bpath, "height");
    if (!(bump.width > 0.0)) fail(bpath + ".width", "must be positive");
    return bump;
  };

  const json& tmpl = require(j, path, "template");
  const json& bumps = require(tmpl, path + ".template", "bumps");
  if (!bumps.is_array()) fail(path + ".template.bumps", "expected an array");
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    cfg.spec.template_bumps.push_back(
        parse_bump(bumps[i], path + ".template.bumps[" + std::to_string(i) + "]"));
  }

  if (j.contains("warp_noise")) {
    const json& w = j.at("warp_noise");
    if (!w.is_array()) fail(path + ".warp_noise", "expected an array");
    for (std::size_t i = 0; i < w.size(); ++i) {
      cfg.spec.warp_fields.push_back(
          parse_bump(w[i], path + ".warp_noise[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("amplitude_noise")) {
    const json& a = j.at("amplitude_noise");
    if (!a.is_array()) fail(path + ".amplitude_noise", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string apath = path + ".amplitude_noise[" + std::to_string(i) + "]";
      FdaSpec::AmplitudeField field;
      if (a[i].contains("constant")) {
        field.is_constant = true;
        field.constant = as_number(a[i].at("constant"), apath + ".constant");
      } else {
        field.is_constant = false;
        field.bump = parse_bump(a[i], apath);
      }
      cfg.spec.amplitude_fields.push_back(field);
    }
  }
  cfg.spec.epsilon = number_or(j, path, "epsilon", 0.0);
  if (cfg.spec.epsilon < 0.0) fail(path + ".epsilon", "must be >= 0");
  cfg.spec.samples_per_signal = int_or(j, path, "samples_per_signal", 101);
  if (cfg.spec.samples_per_signal < 2) fail(path + ".samples_per_signal", "must be >= 2");
  cfg.spec.num_signals = int_or(j, path, "num_signals", 1);
  if (cfg.spec.num_signals < 1) fail(path + ".num_signals", "must be >= 1");
  cfg.spec.u0 = number_or(j, path, "u0", 0.0);
  cfg.spec.nu0 = number_or(j, path, "nu0", 0.0);
  if (cfg.spec.u0 != 0.0 || cfg.spec.nu0 != 0.0) {
    fail(path + ".u0", "non-zero initial momenta are not supported in this build");
  }
  return cfg;
}

ConvergenceScenarioCfg parse_convergence(const json& root) {
  const json& j = require(root, "", "convergence");
  const std::string path = "convergence";
  ConvergenceScenarioCfg cfg;
  const LandmarkScenarioCfg sys =
      parse_landmark_system(require(j, path, "system"), path + ".system");
  cfg.system = sys.system;
  cfg.initial = sys.initial;
  const json& ladder = require(j, path, "steps_ladder");
  if (!ladder.is_array() || ladder.size() < 4) {
    fail(path + ".steps_ladder", "expected >= 4 dyadic levels");
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const std::string lpath = path + ".steps_ladder[" + std::to_string(i) + "]";
    if (!ladder[i].is_number_integer()) fail(lpath, "expected an integer");
    const int s = ladder[i].get<int>();
    if (s < 1) fail(lpath, "must be >= 1");
    cfg.steps_ladder.push_back(s);
  }
  cfg.paths = int_or(j, path, "paths", 100);
  if (cfg.paths < 1) fail(path + ".paths", "must be >= 1");
  return cfg;
}

}  // namespace

Scenario scenario_from_string(const std::string& name) {
  if (name == "landmark_sde") return Scenario::landmark_sde;
  if (name == "ch2_sde") return Scenario::ch2_sde;
  if (name == "landmark_match") return Scenario::landmark_match;
  if (name == "fda_generate") return Scenario::fda_generate;
  if (name == "convergence_study") return Scenario::convergence_study;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::landmark_sde: return "landmark_sde";
    case Scenario::ch2_sde: return "ch2_sde";
    case Scenario::landmark_match: return "landmark_match";
    case Scenario::fda_generate: return "fda_generate";
    case Scenario::convergence_study: return "convergence_study";
  }
  return "?";
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig config;
  config.raw = j;
  const std::string scenario_name = string_field(j, "", "scenario");
  try {
    config.scenario = scenario_from_string(scenario_name);
  } catch (const std::invalid_argument&) {
    fail("scenario", "unknown scenario: " + scenario_name);
  }

  config.integrator = parse_integrator(j, "integrator");
  config.ensemble = parse_ensemble(j);
  config.output = parse_output(j, config.integrator.T);

  switch (config.scenario) {
    case Scenario::landmark_sde:
      config.landmark = parse_landmark_system(require(j, "", "system"), "system");
      break;
    case Scenario::ch2_sde:
      config.ch2 = parse_ch2_system(j, config.integrator, config.warnings);
      break;
    case Scenario::landmark_match:
      config.match = parse_match(j, config.integrator);
      break;
    case Scenario::fda_generate:
      config.fda = parse_fda(j, config.integrator);
      break;
    case Scenario::convergence_study:
      config.convergence = parse_convergence(j);
      break;
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

std::string config_schema_json() {
  static const char* schema = R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "metamorph experiment configuration",
  "type": "object",
  "required": ["scenario", "integrator"],
  "properties": {
    "scenario": {
      "enum": ["landmark_sde", "ch2_sde", "landmark_match", "fda_generate", "convergence_study"]
    },
    "integrator": {
      "type": "object",
      "required": ["T", "steps"],
      "properties": {
        "method": {"enum": ["heun", "euler_maruyama_ito"], "default": "heun"},
        "T": {"type": "number", "exclusiveMinimum": 0},
        "steps": {"type": "integer", "minimum": 1}
      }
    },
    "ensemble": {
      "type": "object",
      "properties": {
        "base_seed": {"type": "integer", "minimum": 0},
        "realizations": {"type": "integer", "minimum": 1, "default": 1},
        "store_trajectories": {"type": "boolean", "default": false},
        "failure_threshold": {"type": "number", "minimum": 0, "default": 0.01}
      }
    },
    "output": {
      "type": "object",
      "properties": {
        "directory": {"type": "string", "default": "out"},
        "times": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "formats": {"type": "array", "items": {"enum": ["csv", "json"]}}
      }
    },
    "system": {
      "type": "object",
      "description": "landmark_sde / ch2_sde / convergence_study system block",
      "properties": {
        "kernel": {
          "type": "object",
          "required": ["family", "r", "g"],
          "properties": {
            "family": {"enum": ["gaussian"]},
            "r": {"type": "number", "exclusiveMinimum": 0},
            "g": {"type": "number", "exclusiveMinimum": 0}
          }
        },
        "lambda": {"type": "number", "minimum": 0},
        "q0": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "p0": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "noise": {
          "type": "object",
          "properties": {
            "sigma_u": {
              "type": "array",
              "items": {
                "type": "object",
                "properties": {
                  "center": {"type": "array", "items": {"type": "number"}},
                  "width": {"type": "number", "exclusiveMinimum": 0},
                  "amplitude": {"type": "array", "items": {"type": "number"}},
                  "constant": {"type": "array", "items": {"type": "number"}}
                }
              }
            },
            "sigma_nu": {
              "type": "object",
              "properties": {
                "per_landmark": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                "grid_values_file": {"type": "string"}
              }
            }
          }
        },
        "tracers": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "grid": {
          "type": "object",
          "required": ["L", "N"],
          "properties": {
            "L": {"type": "number", "exclusiveMinimum": 0},
            "N": {"type": "integer", "minimum": 2, "multipleOf": 2}
          }
        },
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "m0": {"type": "object"},
        "rho0": {"type": "object"}
      }
    },
    "match": {
      "type": "object",
      "required": ["kernel", "lambda", "q0", "q_target"],
      "properties": {
        "kernel": {"type": "object"},
        "lambda": {"type": "number", "minimum": 0},
        "q0": {"type": "array"},
        "q_target": {"type": "array"},
        "tol": {"type": "number", "exclusiveMinimum": 0, "default": 1e-6},
        "max_iterations": {"type": "integer", "minimum": 1, "default": 50},
        "penalty_s": {"type": "number", "minimum": 0, "default": 0}
      }
    },
    "fda": {
      "type": "object",
      "required": ["template"],
      "properties": {
        "template": {
          "type": "object",
          "required": ["bumps"],
          "properties": {
            "bumps": {
              "type": "array",
              "items": {
                "type": "object",
                "required": ["center", "width", "height"],
                "properties": {
                  "center": {"type": "number"},
                  "width": {"type": "number", "exclusiveMinimum": 0},
                  "height": {"type": "number"}
                }
              }
            }
          }
        },
        "warp_noise": {"type": "array"},
        "amplitude_noise": {"type": "array"},
        "epsilon": {"type": "number", "minimum": 0, "default": 0},
        "samples_per_signal": {"type": "integer", "minimum": 2, "default": 101},
        "num_signals": {"type": "integer", "minimum": 1, "default": 1},
        "u0": {"type": "number", "default": 0},
        "nu0": {"type": "number", "default": 0}
      }
    },
    "convergence": {
      "type": "object",
      "required": ["system", "steps_ladder"],
      "properties": {
        "system": {"type": "object"},
        "steps_ladder": {"type": "array", "minItems": 4, "items": {"type": "integer", "minimum": 1}},
        "paths": {"type": "integer", "minimum": 1, "default": 100}
      }
    }
  }
})";
  return schema;
}

}  // namespace metamorph
