#include "nsfde/config.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace nsfde {

namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw ConfigError(join(path, item.key()), "unknown field");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (v == nullptr) throw ConfigError(join(path, key), "required field is missing");
  return *v;
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  const json* v = find(obj, key);
  return v ? as_number(*v, join(path, key)) : fallback;
}

std::vector<double> as_vector(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::size_t as_count(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(field, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

template <class F>
auto guarded(const std::string& field, F&& make) {
  try {
    return make();
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  }
}

MarkSpaceSpec parse_jumps(const json* node) {
  if (node == nullptr) return {};
  const std::string path = "jumps";
  allow_keys(*node, path, {"jump_intensity", "mark_sampler"});
  MarkSpaceSpec spec;
  spec.total_intensity = number_or(*node, path, "jump_intensity", 0.0);
  if (const json* m = find(*node, "mark_sampler")) {
    const std::string mp = "jumps.mark_sampler";
    const std::string kind = as_string(require(*m, mp, "kind"), mp + ".kind");
    if (kind == "degenerate") {
      allow_keys(*m, mp, {"kind", "value"});
      spec.sampler = marks::Degenerate{as_number(require(*m, mp, "value"), mp + ".value")};
    } else if (kind == "uniform") {
      allow_keys(*m, mp, {"kind", "lo", "hi"});
      spec.sampler = marks::Uniform{as_number(require(*m, mp, "lo"), mp + ".lo"),
                                    as_number(require(*m, mp, "hi"), mp + ".hi")};
    } else if (kind == "gaussian") {
      allow_keys(*m, mp, {"kind", "mean", "sd"});
      spec.sampler = marks::Gaussian{number_or(*m, mp, "mean", 0.0), number_or(*m, mp, "sd", 1.0)};
    } else if (kind == "two_point") {
      allow_keys(*m, mp, {"kind", "z1", "p1", "z2"});
      spec.sampler = marks::TwoPoint{as_number(require(*m, mp, "z1"), mp + ".z1"),
                                     as_number(require(*m, mp, "p1"), mp + ".p1"),
                                     as_number(require(*m, mp, "z2"), mp + ".z2")};
    } else {
      throw ConfigError(mp + ".kind", "unknown mark sampler '" + kind + "'");
    }
  } else if (spec.total_intensity > 0.0) {
    throw ConfigError("jumps.mark_sampler", "required when jumps.jump_intensity > 0");
  }
  return spec;
}

NeutralGain parse_gain(const json& v, const std::string& path) {
  if (v.is_number()) return gains::Constant{as_number(v, path)};
  const std::string kind = as_string(require(v, path, "kind"), path + ".kind");
  if (kind == "constant") {
    allow_keys(v, path, {"kind", "value"});
    return gains::Constant{as_number(require(v, path, "value"), path + ".value")};
  }
  if (kind == "affine") {
    allow_keys(v, path, {"kind", "c0", "c1"});
    return gains::Affine{as_number(require(v, path, "c0"), path + ".c0"),
                         as_number(require(v, path, "c1"), path + ".c1")};
  }
  if (kind == "step") {
    allow_keys(v, path, {"kind", "before", "after", "at"});
    return gains::Step{as_number(require(v, path, "before"), path + ".before"),
                       as_number(require(v, path, "after"), path + ".after"),
                       as_number(require(v, path, "at"), path + ".at")};
  }
  throw ConfigError(path + ".kind", "unknown neutral gain kind '" + kind + "'");
}

Delay parse_delay(const json* v, const std::string& path) {
  if (v == nullptr) return Delay::constant(0.0);
  if (v->is_number()) return Delay::constant(as_number(*v, path));
  const std::string kind = as_string(require(*v, path, "kind"), path + ".kind");
  if (kind == "constant") {
    allow_keys(*v, path, {"kind", "value"});
    return Delay::constant(as_number(require(*v, path, "value"), path + ".value"));
  }
  if (kind == "sinusoidal") {
    allow_keys(*v, path, {"kind", "d0", "d1", "omega"});
    return Delay::sinusoidal(as_number(require(*v, path, "d0"), path + ".d0"),
                             as_number(require(*v, path, "d1"), path + ".d1"),
                             as_number(require(*v, path, "omega"), path + ".omega"));
  }
  throw ConfigError(path + ".kind", "unknown delay kind '" + kind + "'");
}

DelaySet parse_delays(const json* node, double tau) {
  DelaySet d;
  d.r = d.rho = d.theta = Delay::constant(0.0);
  d.tau = tau;
  if (!(d.tau > 0.0)) throw ConfigError("coefficients.tau", "must be positive");
  if (node == nullptr) return d;
  allow_keys(*node, "coefficients.delays", {"r", "rho", "theta"});
  d.r = parse_delay(find(*node, "r"), "coefficients.delays.r");
  d.rho = parse_delay(find(*node, "rho"), "coefficients.delays.rho");
  d.theta = parse_delay(find(*node, "theta"), "coefficients.delays.theta");
  for (const auto& [name, delay] : {std::pair{"r", d.r}, std::pair{"rho", d.rho}, std::pair{"theta", d.theta}}) {
    const double lo = delay.d0 - std::abs(delay.d1);
    const double hi = delay.d0 + std::abs(delay.d1);
    if (lo < 0.0 || hi > d.tau) throw ConfigError(std::string("coefficients.delays.") + name, "delay must stay within [0, tau]");
  }
  return d;
}

CoefficientSet parse_coefficients(const json& node, std::size_t dim) {
  const std::string path = "coefficients";
  allow_keys(node, path,
             {"drift_gains", "neutral_gain", "beta", "sigma0", "sigma_decay", "diffusion_diag", "jump_gain", "delays",
              "tau"});
  CoefficientSet c;
  if (const json* v = find(node, "drift_gains")) {
    c.drift_gains = as_vector(*v, "coefficients.drift_gains");
    if (c.drift_gains.size() != dim) throw ConfigError("coefficients.drift_gains", "need one gain per eigenvalue");
  } else {
    c.drift_gains.assign(dim, 0.0);
  }
  if (const json* v = find(node, "neutral_gain")) c.neutral_gain = parse_gain(*v, "coefficients.neutral_gain");
  c.beta = number_or(node, path, "beta", 0.5);
  c.sigma0 = number_or(node, path, "sigma0", 0.0);
  c.sigma_decay = number_or(node, path, "sigma_decay", 0.0);
  if (const json* v = find(node, "diffusion_diag")) c.diffusion_diag = as_vector(*v, "coefficients.diffusion_diag");
  c.jump_gain = number_or(node, path, "jump_gain", 0.0);
  c.delays = parse_delays(find(node, "delays"), number_or(node, path, "tau", 1.0));
  return c;
}

InitialDatum parse_initial(const json& node, std::size_t dim) {
  const std::string path = "initial";
  const std::string kind = node.contains("kind") ? as_string(node["kind"], "initial.kind") : "constant";
  HilbertVector v(as_vector(require(node, path, "vector"), "initial.vector"));
  if (v.size() != dim) throw ConfigError("initial.vector", "need one coefficient per eigenvalue");
  if (kind == "constant") {
    allow_keys(node, path, {"kind", "vector"});
    return InitialDatum::constant(std::move(v));
  }
  if (kind == "exponential") {
    allow_keys(node, path, {"kind", "vector", "kappa"});
    return InitialDatum::exponential(as_number(require(node, path, "kappa"), "initial.kappa"), std::move(v));
  }
  throw ConfigError("initial.kind", "unknown initial datum kind '" + kind + "'");
}

SolverConfig parse_solver(const json* node) {
  SolverConfig s;
  if (node == nullptr) return s;
  allow_keys(*node, "solver", {"step", "horizon", "scheme", "neutral_tol", "neutral_max_iter", "picard_tol",
                               "picard_max_iter"});
  s.step = number_or(*node, "solver", "step", s.step);
  s.horizon = number_or(*node, "solver", "horizon", s.horizon);
  s.neutral_tol = number_or(*node, "solver", "neutral_tol", s.neutral_tol);
  s.picard_tol = number_or(*node, "solver", "picard_tol", s.picard_tol);
  if (const json* v = find(*node, "neutral_max_iter"))
    s.neutral_max_iter = static_cast<int>(as_count(*v, "solver.neutral_max_iter"));
  if (const json* v = find(*node, "picard_max_iter"))
    s.picard_max_iter = static_cast<int>(as_count(*v, "solver.picard_max_iter"));
  if (const json* v = find(*node, "scheme")) {
    const std::string scheme = as_string(*v, "solver.scheme");
    if (scheme == "stepper")
      s.scheme = Scheme::stepper;
    else if (scheme == "picard")
      s.scheme = Scheme::picard;
    else
      throw ConfigError("solver.scheme", "expected 'stepper' or 'picard'");
  }
  guarded("solver.step", [&] { return s.grid(); });
  if (s.grid().n_steps() > FbmSampler::kDefaultMaxNodes)
    throw ConfigError("solver.step", "grid has more than " + std::to_string(FbmSampler::kDefaultMaxNodes) + " steps");
  return s;
}

OracleBlock parse_oracle(const json& node) {
  allow_keys(node, "oracle", {"points", "n_std_err", "rel_budget", "decay_rate", "decay_rel_tol", "note"});
  OracleBlock o;
  if (const json* pts = find(node, "points")) {
    if (!pts->is_array()) throw ConfigError("oracle.points", "expected an array");
    for (std::size_t i = 0; i < pts->size(); ++i) {
      const std::string p = "oracle.points[" + std::to_string(i) + "]";
      allow_keys((*pts)[i], p, {"t", "mean_sq"});
      o.points.push_back({as_number(require((*pts)[i], p, "t"), p + ".t"),
                          as_number(require((*pts)[i], p, "mean_sq"), p + ".mean_sq")});
    }
  }
  o.n_std_err = number_or(node, "oracle", "n_std_err", o.n_std_err);
  o.rel_budget = number_or(node, "oracle", "rel_budget", o.rel_budget);
  if (const json* v = find(node, "decay_rate")) o.decay_rate = as_number(*v, "oracle.decay_rate");
  o.decay_rel_tol = number_or(node, "oracle", "decay_rel_tol", o.decay_rel_tol);
  return o;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* version_string() noexcept { return NSFDE_VERSION; }

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  allow_keys(root, "", {"model", "jumps", "coefficients", "initial", "solver", "monte_carlo",
                        "certificate", "outputs", "oracle", "description"});

  const json& model_node = require(root, "", "model");
  allow_keys(model_node, "model", {"eigenvalues", "q_eigenvalues", "hurst"});
  const std::vector<double> mu = as_vector(require(model_node, "model", "eigenvalues"), "model.eigenvalues");
  SpectralModel model = guarded("model.eigenvalues", [&] { return SpectralModel(mu); });
  std::vector<double> lam;
  if (const json* v = find(model_node, "q_eigenvalues")) lam = as_vector(*v, "model.q_eigenvalues");
  QCovariance q = guarded("model.q_eigenvalues", [&] { return QCovariance(lam); });
  const double h = number_or(model_node, "model", "hurst", 0.75);
  HurstParameter hurst = guarded("model.hurst", [&] { return HurstParameter(h); });

  CoefficientSet coeffs;
  if (const json* v = find(root, "coefficients"))
    coeffs = parse_coefficients(*v, mu.size());
  else
    coeffs = parse_coefficients(json::object(), mu.size());

  InitialDatum initial = parse_initial(require(root, "", "initial"), mu.size());
  MarkSpaceSpec marks = parse_jumps(find(root, "jumps"));

  ExperimentConfig cfg(Problem{std::move(model), std::move(q), hurst, std::move(coeffs), marks, std::move(initial)},
                       parse_solver(find(root, "solver")));

  if (const json* mc = find(root, "monte_carlo")) {
    allow_keys(*mc, "monte_carlo", {"n_paths", "seed", "noise_paths"});
    if (const json* v = find(*mc, "n_paths")) cfg.n_paths = as_count(*v, "monte_carlo.n_paths");
    if (const json* v = find(*mc, "seed")) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw ConfigError("monte_carlo.seed", "expected a nonnegative integer");
      cfg.seed = v->get<std::uint64_t>();
    }
    if (const json* v = find(*mc, "noise_paths")) cfg.noise_paths = as_count(*v, "monte_carlo.noise_paths");
  }
  if (cfg.n_paths < 2) throw ConfigError("monte_carlo.n_paths", "need at least two paths");
  if (cfg.noise_paths == 0) cfg.noise_paths = cfg.n_paths;

  if (const json* c = find(root, "certificate")) {
    allow_keys(*c, "certificate", {"target_rate"});
    if (const json* v = find(*c, "target_rate")) {
      cfg.target_rate = as_number(*v, "certificate.target_rate");
      if (!(*cfg.target_rate > 0.0)) throw ConfigError("certificate.target_rate", "must be positive");
    }
  }
  if (const json* o = find(root, "outputs")) {
    allow_keys(*o, "outputs", {"directory", "path_dump"});
    if (const json* v = find(*o, "directory")) cfg.output_directory = as_string(*v, "outputs.directory");
    if (const json* v = find(*o, "path_dump")) {
      if (!v->is_boolean()) throw ConfigError("outputs.path_dump", "expected true or false");
      cfg.path_dump = v->get<bool>();
    }
  }
  if (const json* o = find(root, "oracle")) cfg.oracle = parse_oracle(*o);

  cfg.config_hash = fnv1a_hex(root.dump());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace nsfde
