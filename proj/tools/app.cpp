#include "app.hpp"

#include "increx/error.hpp"
#include "increx/extrapolation.hpp"
#include "increx/minimax.hpp"
#include "increx/montecarlo.hpp"
#include "increx/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

#ifndef INCREX_VERSION
#define INCREX_VERSION "0.0.0"
#endif

namespace increx::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Context {
  fs::path base;          // directory of the config file
  std::string hash_input;  // config bytes plus every referenced file
  std::vector<std::string> inputs;
  json diagnostics = json::object();
};

// Numeric rows of a CSV file; a non-numeric first line is a header.
std::vector<std::vector<double>> read_csv(Context& ctx, const std::string& name) {
  const fs::path path = ctx.base / name;
  const std::string text = read_file(path);
  ctx.hash_input += text;
  ctx.inputs.push_back(name);
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      config_error(name + ": non-numeric row '" + line + "'");
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd to_vector(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) config_error(std::string(what) + " must be a nonempty array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) config_error(std::string(what) + " must hold numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) config_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("field '") + key + "' has the wrong type");
  }
}

IncrementSpec read_spec(const json& cfg) {
  const json& s = require(cfg, "spec");
  const int n = value_or(s, "n", 1), mu = value_or(s, "mu", 1);
  if (n < 1 || n > 8) config_error("spec.n must lie in 1..8");
  if (mu < 1 || mu > 64) config_error("spec.mu must lie in 1..64");
  return {n, mu};
}

double poly_modulus2(const Eigen::VectorXd& p, double lambda) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index k = p.size() - 1; k >= 0; --k) acc = acc * std::polar(1.0, lambda) + p[k];
  return std::norm(acc);
}

DensityGrid read_density(Context& ctx, const json& d, const FrequencyGrid& grid, IncrementSpec spec) {
  if (d.is_number()) return DensityGrid::constant(grid, d.get<double>());
  if (d.is_string() && d.get<std::string>() == "inf") {
    return DensityGrid::constant(grid, std::numeric_limits<double>::infinity());
  }
  const std::string type = value_or<std::string>(d, "type", "");
  const double scale = value_or(d, "scale", 1.0);
  if (type == "constant") return DensityGrid::constant(grid, value_or(d, "value", 1.0));
  if (type == "rational" || type == "arima") {
    Eigen::VectorXd ma = d.contains("ma") ? to_vector(d["ma"], "density.ma") : Eigen::VectorXd::Ones(1);
    Eigen::VectorXd ar = d.contains("ar") ? to_vector(d["ar"], "density.ar") : Eigen::VectorXd::Ones(1);
    const bool arima = type == "arima";
    return DensityGrid::sample(grid, [&](double x) {
      double f = scale * poly_modulus2(ma, x) / poly_modulus2(ar, x);
      if (arima) f *= std::pow(x * x / std::norm(1.0 - std::polar(1.0, x)), spec.n);
      return f;
    });
  }
  if (type == "csv") {
    auto rows = read_csv(ctx, require(d, "path").get<std::string>());
    if (static_cast<int>(rows.size()) != grid.size()) {
      config_error("density csv must hold one row per grid node (" + std::to_string(grid.size()) + ")");
    }
    Eigen::VectorXd v(grid.size());
    for (int j = 0; j < grid.size(); ++j) v[j] = scale * rows[j].back();
    return DensityGrid(grid, v);
  }
  config_error("density.type must be constant, rational, arima or csv");
}

Eigen::VectorXd read_coefficients(Context& ctx, const json& fn) {
  if (fn.contains("a")) return to_vector(fn["a"], "functional.a");
  if (fn.contains("a_csv")) {
    auto rows = read_csv(ctx, fn["a_csv"].get<std::string>());
    if (rows.empty()) config_error("functional.a_csv is empty");
    int top = -1;
    for (const auto& r : rows) top = std::max(top, static_cast<int>(r.front()));
    Eigen::VectorXd a = Eigen::VectorXd::Zero(top + 1);
    for (const auto& r : rows) {
      if (r.size() < 2 || r[0] < 0) config_error("functional.a_csv rows must be k,a with k >= 0");
      a[static_cast<int>(r[0])] = r[1];
    }
    return a;
  }
  config_error("functional needs 'a' or 'a_csv'");
}

FunctionalCoefficients read_functional(Context& ctx, const json& cfg) {
  const json& fn = require(cfg, "functional");
  Eigen::VectorXd a = read_coefficients(ctx, fn);
  if (a.size() - 1 > 4096) config_error("functional horizon N must be <= 4096");
  if (value_or(fn, "finite", true)) return FunctionalCoefficients::finite(a);
  std::optional<TailBound> tail;
  if (fn.contains("tail")) {
    tail = TailBound{value_or(fn["tail"], "constant", 0.0), value_or(fn["tail"], "ratio", 0.0)};
  }
  return FunctionalCoefficients::truncated(a, tail);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  out << text;
}

void write_series(const fs::path& path, const std::string& header, const Eigen::VectorXd& v) {
  std::string s = header + "\n";
  for (Eigen::Index k = 0; k < v.size(); ++k) s += std::to_string(k) + "," + fmt(v[k]) + "\n";
  write_text(path, s);
}

void write_grid(const fs::path& path, const FrequencyGrid& grid, const std::string& header,
                const std::vector<const Eigen::VectorXd*>& cols) {
  std::string s = "lambda," + header + "\n";
  for (int j = 0; j < grid.size(); ++j) {
    s += fmt(grid.node(j));
    for (const auto* c : cols) s += "," + fmt((*c)[j]);
    s += "\n";
  }
  write_text(path, s);
}

json array(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

void write_characteristic(const fs::path& dir, const SpectralCharacteristic& h) {
  Eigen::VectorXd re = h.samples.real(), im = h.samples.imag();
  write_grid(dir / "characteristic.csv", h.grid, "re_h,im_h", {&re, &im});
}

json estimate_json(const EstimateResult& est) {
  json r;
  r["mse"] = est.mse;
  r["mse_quadrature"] = est.mse_quadrature;
  r["r"] = array(est.characteristic.r);
  r["b"] = array(est.characteristic.b);
  r["boundary_weights"] = array(est.boundary_weights);
  r["tail_energy"] = est.tail_energy;
  r["tail_warning"] = est.tail_warning;
  r["inversion_residual"] = est.inversion_residual;
  return r;
}

void write_weights(const fs::path& dir, const EstimateResult& est) {
  std::string s = "k,past_weight,boundary_weight\n";
  const double floor = 1e-14 * std::max(1.0, est.past_weights.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < est.past_weights.size(); ++k) {
    const double c = std::abs(est.past_weights[k]) < floor ? 0.0 : est.past_weights[k];
    const double v = k < est.boundary_weights.size() ? est.boundary_weights[k] : 0.0;
    s += std::to_string(-(k + 1)) + "," + fmt(c) + "," + fmt(v) + "\n";
  }
  write_text(dir / "weights.csv", s);
}

ExtrapolationOptions extrapolation_options(const json& cfg, const FrequencyGrid& grid) {
  ExtrapolationOptions o;
  o.horizon = value_or(cfg, "horizon", std::min(o.horizon, grid.size() / 4));
  o.factor.truncation = value_or(cfg, "truncation", std::min(o.factor.truncation, grid.size() / 2 - 1));
  o.factor.tolerance = value_or(cfg, "factor_tolerance", o.factor.tolerance);
  o.tolerance = value_or(cfg, "inversion_tolerance", o.tolerance);
  if (o.horizon < 1 || 2 * o.horizon >= grid.size()) config_error("horizon must lie in 1..grid/2 - 1");
  return o;
}

struct Estimate {
  EstimateResult est;
  TargetFunctional target;
};

Estimate estimate_from_config(Context& ctx, const json& cfg, const FrequencyGrid& grid, IncrementSpec spec,
                              const std::string& command) {
  const ExtrapolationOptions opts = extrapolation_options(cfg, grid);
  DensityGrid f = read_density(ctx, require(cfg, "density"), grid, spec);
  if (command == "predict" || (command == "simulate" && cfg.contains("predict"))) {
    const json& p = require(cfg, "predict");
    const std::string target = value_or<std::string>(p, "target", "increment");
    const int m = value_or(p, "m", 0);
    FactorOptions fo = opts.factor;
    CanonicalFactor phi = increment_density_factor(f, spec, fo);
    ctx.diagnostics["factor_route"] = phi.route;
    ctx.diagnostics["factor_reconstruction_error"] = phi.reconstruction_error;
    if (target == "increment") {
      auto est = predict_increment(m, spec, phi.coeffs, grid, opts);
      return {est, {FunctionalKind::Increments, Eigen::VectorXd::Unit(m + 1, m)}};
    }
    if (target == "value") {
      auto est = predict_value(m, spec, phi.coeffs, grid, opts);
      return {est, {FunctionalKind::Values, Eigen::VectorXd::Unit(m + 1, m)}};
    }
    config_error("predict.target must be increment or value");
  }
  FunctionalCoefficients a = read_functional(ctx, cfg);
  EstimateResult est = a.is_finite() ? estimate_functional_AN(a.values(), f, spec, a.horizon(), opts)
                                     : estimate_functional_A(a, f, spec, opts);
  return {est, {FunctionalKind::Values, a.values()}};
}

DensityClassSpec read_class(Context& ctx, const json& cfg, const FrequencyGrid& grid, IncrementSpec spec,
                            const std::optional<std::string>& override_type) {
  const json& c = require(cfg, "class");
  std::string type = override_type ? *override_type : value_or<std::string>(c, "type", "");
  for (auto& ch : type) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (type == "d0") return ClassD0{value_or(c, "P0", 1.0)};
  if (type == "dm") return ClassDM{to_vector(require(c, "rho"), "class.rho")};
  if (type == "dvu") {
    return ClassDvu{read_density(ctx, require(c, "v"), grid, spec), read_density(ctx, require(c, "u"), grid, spec),
                    value_or(c, "P0", 1.0)};
  }
  if (type == "deps") return ClassDeps{read_density(ctx, require(c, "v"), grid, spec), value_or(c, "eps", 0.0)};
  config_error("class.type must be d0, dm, dvu or deps");
}

MinimaxOptions minimax_options(const json& cfg) {
  MinimaxOptions o;
  const json m = cfg.contains("minimax") ? cfg["minimax"] : json::object();
  o.candidates = value_or(m, "candidates", o.candidates);
  o.damping = value_or(m, "damping", o.damping);
  o.max_iterations = value_or(m, "max_iterations", o.max_iterations);
  o.tolerance = value_or(m, "tolerance", o.tolerance);
  o.try_stationary = value_or(m, "try_stationary", o.try_stationary);
  o.truncation = value_or(m, "truncation", o.truncation);
  o.stability_tolerance = value_or(m, "stability_tolerance", o.stability_tolerance);
  return o;
}

json minimax_json(const LeastFavorableResult& res, const ExtremalProblem& problem, double P0) {
  json r;
  r["class"] = res.class_name;
  r["branch"] = to_string(res.branch);
  r["extremal_value"] = res.extremal_value;
  r["sigma_max"] = res.sigma_max;
  r["alpha"] = res.alpha;
  r["phi0"] = array(res.phi0);
  r["r0"] = array(res.r0);
  r["phi_mu"] = array(res.phi_mu);
  r["denominator"] = array(res.denominator);
  r["iterations"] = res.iterations;
  r["fixed_point_residual"] = res.fixed_point_residual;
  r["lower_clamped_fraction"] = res.lower_clamped_fraction;
  r["upper_clamped_fraction"] = res.upper_clamped_fraction;
  r["truncation_drift"] = res.truncation_drift;
  if (problem.finite && problem.dim() == 2 && res.spec.n == 1 && res.class_name == "D0") {
    try {
      auto cf = closed_form_two_term(problem.a[0], problem.a[1], res.spec, P0, problem.w[0], problem.w[1]);
      r["closed_form"] = {{"phi0", cf.phi0},   {"phi1", cf.phi1}, {"alpha", cf.alpha},
                          {"parameter", cf.parameter}, {"x", cf.x}, {"y", cf.y}};
    } catch (const Error& e) {
      r["closed_form"] = {{"error", e.what()}};
    }
  }
  return r;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int execute(const Options& opt, std::ostream& out) {
  Context ctx;
  const fs::path config_path(opt.config);
  const std::string text = read_file(config_path);
  ctx.base = config_path.parent_path();
  ctx.hash_input = text;
  ctx.inputs.push_back(config_path.filename().string());
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) config_error("config must be a JSON object");

  const std::string command = opt.command ? *opt.command : value_or<std::string>(cfg, "command", "");
  const IncrementSpec spec = read_spec(cfg);
  const int G = opt.grid ? *opt.grid : value_or(cfg, "grid", 4096);
  if (G < 16 || G > 65536) config_error("grid must lie in 16..65536");
  const std::uint64_t seed = opt.seed ? *opt.seed : value_or<std::uint64_t>(cfg, "seed", 0);
  const FrequencyGrid grid(G);

  const fs::path dir(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) config_error("cannot create output directory " + dir.string());

  json result;
  result["command"] = command;
  result["spec"] = {{"n", spec.n}, {"mu", spec.mu}};
  result["grid"] = G;
  int status = Success;

  if (command == "factorize") {
    DensityGrid f = read_density(ctx, require(cfg, "density"), grid, spec);
    FactorOptions fo;
    fo.truncation = value_or(cfg, "truncation", 64);
    fo.tolerance = value_or(cfg, "factor_tolerance", fo.tolerance);
    const bool incr = value_or(cfg, "increment", false);
    CanonicalFactor phi = incr ? increment_density_factor(f, spec, fo) : canonical_factorization(f, fo);
    result["increment"] = incr;
    result["route"] = phi.route;
    result["reconstruction_error"] = phi.reconstruction_error;
    result["floored_nodes"] = phi.floored_nodes;
    result["min_phase"] = is_minimum_phase(phi.coeffs);
    result["coeffs"] = array(phi.coeffs);
    ctx.diagnostics["factor_route"] = phi.route;
    write_series(dir / "factor.csv", "k,phi", phi.coeffs);
  } else if (command == "extrapolate" || command == "predict") {
    Estimate e = estimate_from_config(ctx, cfg, grid, spec, command);
    result["estimate"] = estimate_json(e.est);
    ctx.diagnostics["tail_warning"] = e.est.tail_warning;
    write_weights(dir, e.est);
    write_characteristic(dir, e.est.characteristic);
  } else if (command == "minimax" || command == "saddle-check") {
    DensityClassSpec cls = read_class(ctx, cfg, grid, spec, opt.density_class);
    FunctionalCoefficients a = read_functional(ctx, cfg);
    MinimaxOptions mo = minimax_options(cfg);
    ExtremalProblem problem = extremal_problem(a, spec, mo.truncation);
    LeastFavorableResult res = least_favorable(problem, cls, grid, mo);
    result["minimax"] = minimax_json(res, problem, class_power(cls));
    ctx.diagnostics["branch"] = to_string(res.branch);
    ctx.diagnostics["class"] = res.class_name;
    Eigen::VectorXd f0 = res.f0.values();
    write_grid(dir / "f0.csv", grid, "f0", {&f0});
    write_series(dir / "phi0.csv", "k,phi0", res.phi0);
    write_characteristic(dir, res.h0);
    if (command == "saddle-check") {
      const int probes = value_or(cfg, "probes", 200);
      if (probes < 1) config_error("probes must be positive");
      SaddleReport rep = saddle_check(res, cls, probes, seed, value_or(cfg, "saddle_tolerance", 1e-6));
      result["saddle"] = {{"base", rep.base},
                          {"max_right_violation", rep.max_right_violation},
                          {"min_left_gap", rep.min_left_gap},
                          {"left_base", rep.left_base},
                          {"tolerance", rep.tolerance},
                          {"right_ok", rep.right_ok},
                          {"left_ok", rep.left_ok},
                          {"probes", rep.probes.size()}};
      std::string s = "id,kind,delta\n";
      for (const auto& p : rep.probes) s += std::to_string(p.id) + "," + p.kind + "," + fmt(p.delta) + "\n";
      write_text(dir / "probes.csv", s);
      if (!rep.right_ok || !rep.left_ok) status = NumericalFailure;
    }
  } else if (command == "simulate") {
    const json sim = require(cfg, "simulate");
    SimulationConfig sc;
    sc.spec = spec;
    sc.length = value_or(sim, "length", 512);
    sc.trials = value_or(sim, "trials", 100);
    sc.burn_in = value_or(sim, "burn_in", -1);
    sc.seed = seed;
    if (sc.length < 1 || sc.trials < 1) config_error("simulate.length and simulate.trials must be positive");
    std::optional<Estimate> e;
    if (cfg.contains("functional") || cfg.contains("predict")) {
      e = estimate_from_config(ctx, cfg, grid, spec, command);
      sc.phi_mu = e->est.phi_mu;
    } else if (sim.contains("phi_mu")) {
      sc.phi_mu = to_vector(sim["phi_mu"], "simulate.phi_mu");
    } else {
      CanonicalFactor phi = increment_density_factor(read_density(ctx, require(cfg, "density"), grid, spec), spec,
                                                     extrapolation_options(cfg, grid).factor);
      sc.phi_mu = phi.coeffs;
    }
    Eigen::MatrixXd values = simulate_sequence(sc);
    result["simulate"] = {{"length", sc.length}, {"trials", sc.trials}, {"seed", seed}};
    if (e) {
      EmpiricalReport rep = empirical_mse(e->est, values, e->target, value_or(sim, "weight_scale", 1.0));
      result["report"] = {{"empirical_mse", rep.empirical_mse}, {"standard_error", rep.standard_error},
                          {"analytic_mse", rep.analytic_mse},   {"z_score", rep.z_score},
                          {"trials", rep.trials},               {"horizon", rep.horizon}};
    }
    if (value_or(sim, "dump_paths", false)) {
      std::string s;
      for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index t = 0; t < values.cols(); ++t) s += (t ? "," : "") + fmt(values(r, t));
        s += "\n";
      }
      write_text(dir / "paths.csv", s);
    }
  } else {
    config_error("command must be factorize, extrapolate, predict, minimax, saddle-check or simulate");
  }

  write_text(dir / "result.json", result.dump(2) + "\n");
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(ctx.hash_input)));
  json manifest;
  manifest["tool"] = "increx";
  manifest["version"] = INCREX_VERSION;
  manifest["command"] = command;
  manifest["inputs"] = ctx.inputs;
  manifest["inputs_hash"] = std::string("fnv1a64:") + hash;
  manifest["seed"] = seed;
  manifest["grid"] = G;
  manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  manifest["diagnostics"] = ctx.diagnostics;
  manifest["status"] = status;
  manifest["timestamp"] = timestamp();
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  if (!opt.quiet) out << result.dump(2) << "\n";
  return status;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(const Options& options, std::ostream& out, std::ostream& err) {
  try {
    const int status = execute(options, out);
    if (status == NumericalFailure) err << "error: saddle inequalities violated beyond tolerance\n";
    return status;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::DomainError ? ConfigFailure
                                                                                     : NumericalFailure;
  } catch (const json::exception& e) {
    err << "error: ConfigError: " << e.what() << "\n";
    return ConfigFailure;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App cli{"Extrapolation of sequences with stationary increments"};
  Options opt;
  std::string command;
  cli.add_option("command", command, "factorize, extrapolate, predict, minimax, saddle-check or simulate");
  cli.add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  cli.add_option("--out", opt.out, "output directory");
  std::uint64_t seed = 0;
  int grid = 0;
  std::string cls;
  auto* seed_opt = cli.add_option("--seed", seed, "random seed");
  auto* grid_opt = cli.add_option("--grid", grid, "frequency grid size");
  auto* cls_opt = cli.add_option("--class", cls, "density class: d0, dm, dvu or deps");
  cli.add_flag("--quiet", opt.quiet, "do not print the result");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? Success : ConfigFailure;
  }
  if (!command.empty()) opt.command = command;
  if (*seed_opt) opt.seed = seed;
  if (*grid_opt) opt.grid = grid;
  if (*cls_opt) opt.density_class = cls;
  return run(opt, std::cout, std::cerr);
}

}  // namespace increx::app
