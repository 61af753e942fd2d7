#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nsfde/cli.h"
#include "nsfde/config.h"
#include "nsfde/fractional_noise.h"
#include "nsfde/self_test.h"
#include "nsfde/stability.h"

namespace py = pybind11;
using namespace nsfde;

namespace {

py::dict table_dict(const MomentTable& t) {
  py::dict d;
  d["t"] = t.t;
  d["mean_sq"] = t.mean_sq;
  d["std_err"] = t.std_err;
  d["n_paths"] = t.n_paths;
  return d;
}

MomentTable table_from(const std::vector<double>& t, const std::vector<double>& m, const std::vector<double>& se) {
  if (t.size() != m.size() || t.size() != se.size()) throw DomainError("t, mean_sq and std_err differ in length");
  MomentTable table;
  table.t = t;
  table.mean_sq = m;
  table.std_err = se;
  return table;
}

ExperimentConfig parse_with_seed(const std::string& text, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = parse_config(text);
  if (seed) cfg.seed = *seed;
  cfg.problem.validate(cfg.solver.horizon);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_nsfde, m) {
  m.doc() = "Neutral stochastic functional equations driven by fBm and Poisson jumps";
  m.attr("__version__") = version_string();

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_RuntimeError);

  m.def("fbm_covariance", [](double s, double t, double h) { return fbm_covariance(s, t, HurstParameter(h)); },
        py::arg("s"), py::arg("t"), py::arg("hurst"));
  m.def("volterra_constant", [](double h) { return volterra_constant(HurstParameter(h)); }, py::arg("hurst"));
  m.def("volterra_kernel", [](double t, double s, double h) { return volterra_kernel(t, s, HurstParameter(h)); },
        py::arg("t"), py::arg("s"), py::arg("hurst"));
  m.def(
      "sample_fbm_paths",
      [](double horizon, std::size_t n_steps, double h, std::size_t n_paths, std::uint64_t seed) {
        const auto paths = sample_fbm_paths(TimeGrid::uniform(horizon, n_steps), HurstParameter(h), n_paths, seed);
        std::vector<std::vector<double>> out;
        out.reserve(paths.size());
        for (const auto& p : paths) out.push_back(p.values);
        return out;
      },
      py::arg("horizon"), py::arg("n_steps"), py::arg("hurst"), py::arg("n_paths"), py::arg("seed"));
  m.def(
      "rkhs_scalar_product",
      [](double horizon, const std::vector<double>& psi, const std::vector<double>& phi, double h) {
        const TimeGrid grid = TimeGrid::uniform(horizon, psi.size());
        return rkhs_scalar_product(StepFunction::on_grid(grid, psi), StepFunction::on_grid(grid, phi),
                                   HurstParameter(h));
      },
      py::arg("horizon"), py::arg("psi"), py::arg("phi"), py::arg("hurst"));

  m.def(
      "contraction_constant",
      [](double K1, double K2, double K3, double beta, double norm_inv_beta, double M, double lambda,
         double M_smoothing) {
        HypothesisConstants c;
        c.K1 = K1;
        c.K2 = K2;
        c.K3 = K3;
        c.beta = beta;
        c.norm_inv_beta = norm_inv_beta;
        const DecayCertificate cert = contraction_constant(c, SemigroupBounds{M, lambda, M_smoothing, lambda});
        py::dict d;
        d["theta"] = cert.theta;
        d["passes"] = cert.passes;
        d["neutral_static"] = cert.components.neutral_static;
        d["neutral_convolution"] = cert.components.neutral_convolution;
        d["drift"] = cert.components.drift;
        d["jump"] = cert.components.jump;
        return d;
      },
      py::arg("K1"), py::arg("K2"), py::arg("K3"), py::arg("beta"), py::arg("norm_inv_beta") = 1.0,
      py::arg("M") = 1.0, py::arg("lam") = 1.0, py::arg("M_smoothing") = 1.0);
  m.def(
      "gamma_identity_check",
      [](double alpha, double c) {
        const GammaIdentity g = gamma_identity_check(alpha, c);
        return py::make_tuple(g.lhs, g.rhs, g.rel_err);
      },
      py::arg("alpha"), py::arg("c"));
  m.def(
      "fit_decay_rate",
      [](const std::vector<double>& t, const std::vector<double>& m, const std::vector<double>& se) {
        const DecayFit f = fit_decay_rate(table_from(t, m, se));
        py::dict d;
        d["a_hat"] = f.a_hat;
        d["M_star_hat"] = f.M_star_hat;
        d["r_squared"] = f.r_squared;
        d["window"] = py::make_tuple(f.t_lo, f.t_hi);
        return d;
      },
      py::arg("t"), py::arg("mean_sq"), py::arg("std_err"));

  m.def(
      "simulate",
      [](const std::string& config_json, std::optional<std::uint64_t> seed, unsigned threads) {
        const ExperimentConfig cfg = parse_with_seed(config_json, seed);
        MomentTable table;
        {
          py::gil_scoped_release release;
          table = monte_carlo_moments(cfg.problem, cfg.solver, cfg.n_paths, cfg.seed, threads);
        }
        return table_dict(table);
      },
      py::arg("config_json"), py::arg("seed") = py::none(), py::arg("threads") = 1);
  m.def(
      "certify",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = parse_with_seed(config_json, std::nullopt);
        const DecayCertificate cert = certify(cfg.problem, cfg.solver.horizon, cfg.target_rate);
        return py::module_::import("json").attr("loads")(certificate_json(cert, cfg));
      },
      py::arg("config_json"));
  m.def(
      "self_test",
      [](unsigned threads) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& r : run_property_suite(threads)) out.emplace_back(r.name, r.passed, r.detail);
        return out;
      },
      py::arg("threads") = 1);
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
