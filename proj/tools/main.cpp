#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sbppml/boundary.hpp"
#include "sbppml/config.hpp"
#include "sbppml/diagnostics.hpp"
#include "sbppml/modal_analysis.hpp"
#include "sbppml/pml.hpp"
#include "sbppml/scenario.hpp"
#include "sbppml/sbp_operator.hpp"

using namespace sbppml;

namespace {

ScenarioConfig load_config(const std::string& path, const std::string& preset,
                           const std::vector<std::string>& overrides) {
  KeyValueConfig kv;
  if (!path.empty()) kv = KeyValueConfig::parse_file(path);
  if (!preset.empty()) kv.set("preset", preset);
  for (const auto& o : overrides) kv.apply_override(o);
  return ScenarioConfig::from_config(kv);
}

int cmd_run(const std::string& config, const std::string& preset,
            const std::vector<std::string>& overrides, const std::string& output) {
  ScenarioConfig cfg = load_config(config, preset, overrides);
  if (!output.empty()) cfg.output_dir = output;
  if (cfg.output_dir.empty()) cfg.output_dir = "sbppml_out";
  const TimeGrid tg = cfg.time_grid();
  std::printf("scenario %s, model %s (theta %g), order %d, h %g, dt %.6g, %zu steps\n",
              to_string(cfg.scenario).c_str(), to_string(cfg.model.kind).c_str(),
              cfg.model.theta, cfg.order, cfg.h, tg.dt, tg.n_steps);
  const RunArtifacts art = run_scenario(cfg);
  const auto& out = art.output;
  if (out.blowup_step) {
    std::printf("diverged at step %zu (t = %.6g); last finite state kept\n", *out.blowup_step,
                static_cast<double>(*out.blowup_step) * out.dt);
  } else {
    const auto& n = out.history.norms.back();
    std::printf("completed t = %.6g, |Ez| = %.6e, energy = %.6e\n", out.t_reached, n.ez,
                out.history.energies.back());
  }
  std::printf("wrote %s, %s, %s\n", art.history_csv.c_str(), art.snapshot.c_str(),
              art.params_echo.c_str());
  return 0;
}

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

SuiteResult verify_operators() {
  double worst_sbp = 0.0;
  bool ok = true;
  for (int order : {2, 4, 6}) {
    for (std::size_t n = 16; n <= 64; ++n) {
      const auto op = SbpOperator1D::build(order, n, 1.0 / static_cast<double>(n - 1));
      const OperatorReport r = operator_verification_report(op);
      worst_sbp = std::max(worst_sbp, r.sbp_residual);
      ok = ok && r.pass();
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "orders 2/4/6, n = 16..64, max SBP residual %.2e", worst_sbp);
  return {"operators", ok, buf};
}

SuiteResult verify_penalties(std::size_t samples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> g(1e-3, 10.0), tb(0.0, 10.0);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double gamma = g(rng), theta_bar = tb(rng);
    Eigen::Matrix2d m;
    m << gamma, -theta_bar * gamma / 2, -theta_bar * gamma / 2, theta_bar;
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues();
    const PenaltyEigenvalues pe = penalty_matrix_eigenvalues(gamma, theta_bar);
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    worst = std::max(worst, std::max(std::abs(pe.lambda_minus - ev(0)),
                                     std::abs(pe.lambda_plus - ev(1))) / scale);
  }
  double edge = 0.0;
  for (double gamma : {0.1, 0.5, 1.0, 2.0, 4.0, 9.0}) {
    edge = std::min(edge, penalty_matrix_eigenvalues(gamma, 4.0 / gamma).lambda_minus);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu samples, max deviation %.2e, min eigenvalue on edge %.2e",
                samples, worst, edge);
  return {"penalties", worst <= 1e-12 && edge >= -1e-12, buf};
}

SuiteResult verify_lemmas(std::size_t samples) {
  const LemmaMonteCarloReport r = lemma_monte_carlo(samples);
  char buf[192];
  std::snprintf(buf, sizeof buf, "%zu samples, violations %zu/%zu/%zu, max residual %.2e",
                r.samples, r.kappa_lower_violations, r.kappa_left_violations, r.sx_violations,
                std::max({r.max_kappa_lower_residual, r.max_kappa_left_residual,
                          r.max_sx_residual}));
  return {"lemmas", r.pass(), buf};
}

SuiteResult verify_spectrum() {
  ScenarioConfig cfg = ScenarioConfig::preset("cavity-small");
  cfg.model = {ModelKind::ModalUnsplit, 1.0};
  const double modal = spectrum_summary(assemble_semidiscrete_matrix(cfg.model, cfg.discretization())).max_real;
  cfg.model = {ModelKind::PhysicallyMotivated, 0.0};
  cfg.penalties = "universal";
  const double phys = spectrum_summary(assemble_semidiscrete_matrix(cfg.model, cfg.discretization())).max_real;
  char buf[160];
  std::snprintf(buf, sizeof buf, "13x13 cavity, max Re(lambda): modal theta=1 %.2e, physical %.2e",
                modal, phys);
  return {"spectrum", modal <= 1e-8 && phys <= 1e-8, buf};
}

SuiteResult verify_split_equivalence() {
  const Grid2D g = Grid2D::from_counts(-5.0, 5.0, 10, -5.0, 5.0, 10);
  const BoundaryConfig bc;
  const Discretization d(g, 4, DampingProfile::make(g, 3.0, 2.0, 4.0), bc,
                         PenaltyParams::estimate_matching(bc));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    FieldState u = FieldState::zeros(FieldModel::SplitField, g.nx, g.ny);
    for (std::size_t c = 0; c < 4; ++c) {
      for (double& v : u.component(c).values) v = nd(rng);
    }
    const FieldState lhs = reduce_splitfield_to_modal(
        evaluate_rhs({ModelKind::SplitFieldStable, 0.0}, u, d, 0.0), d.profile);
    const FieldState rhs = evaluate_rhs({ModelKind::ModalUnsplit, 1.0},
                                        reduce_splitfield_to_modal(u, d.profile), d, 0.0);
    double diff = 0.0, scale = 1.0;
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t k = 0; k < lhs.ez.size(); ++k) {
        diff = std::max(diff, std::abs(lhs.component(c).values[k] - rhs.component(c).values[k]));
        scale = std::max(scale, std::abs(rhs.component(c).values[k]));
      }
    }
    worst = std::max(worst, diff / scale);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "10x10 grid, 10 random states, max relative deviation %.2e",
                worst);
  return {"split-modal", worst <= 1e-12, buf};
}

int cmd_verify(std::size_t samples) {
  std::vector<SuiteResult> results{verify_operators(), verify_penalties(10000),
                                   verify_lemmas(samples), verify_spectrum(),
                                   verify_split_equivalence()};
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %-12s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

int cmd_converge(const std::string& config, const std::vector<std::string>& overrides,
                 const std::string& orders, const std::string& hs, const std::string& output) {
  ScenarioConfig base = load_config(config, config.empty() ? "waveguide" : "", overrides);
  const auto rows = waveguide_error_study(base, parse_int_list("orders", orders),
                                          parse_double_list("h", hs));
  std::filesystem::create_directories(output);
  const std::string path = (std::filesystem::path(output) / "error_table.csv").string();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  write_error_table(os, rows);
  write_error_table(std::cout, rows);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_modal(const std::string& output, std::size_t n) {
  ComplexParamRegion region;
  region.n_re = n;
  region.n_im = n;
  std::vector<double> ks;
  for (int k = -10; k <= 10; ++k) ks.push_back(k);
  const std::vector<double> gammas{0.25, 1.0, 4.0};
  auto rows = scan_F1_family(ks, {0.0, 1.0}, gammas, region);
  auto f2 = scan_F2_family(ks, gammas, region);
  rows.insert(rows.end(), f2.begin(), f2.end());
  std::size_t roots = 0;
  for (const auto& r : rows) roots += r.result.roots.size();
  std::filesystem::create_directories(output);
  const std::string path = (std::filesystem::path(output) / "modal_scan.csv").string();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  write_scan_csv(os, rows);
  std::printf("%zu windows scanned, %zu roots with Re s >= 0; wrote %s\n", rows.size(), roots,
              path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SBP-SAT solver for 2D TMz Maxwell equations with perfectly matched layers"};
  app.require_subcommand(1);

  std::string config, preset, output, orders = "4,6", hs = "0.04,0.02";
  std::vector<std::string> overrides;
  std::size_t samples = 100000, n_scan = 200;

  auto* run = app.add_subcommand("run", "Run a scenario and write history, snapshot and parameter echo");
  run->add_option("-c,--config", config, "key = value configuration file")->check(CLI::ExistingFile);
  run->add_option("-p,--preset", preset, "Base preset: cavity, cavity-desk, cavity-small, waveguide, reference");
  run->add_option("-s,--set", overrides, "Override a configuration key, key=value (repeatable)");
  run->add_option("-o,--output", output, "Output directory (overrides output_dir)");

  auto* verify = app.add_subcommand("verify", "Operator, penalty, lemma, spectrum and split-field checks");
  verify->add_option("--samples", samples, "Monte-Carlo samples for the lemma checks")
      ->check(CLI::PositiveNumber);

  auto* converge = app.add_subcommand("converge", "Waveguide error study against an enlarged reference");
  converge->set_help_flag("--help", "Print this help message and exit");
  converge->add_option("-c,--config", config, "Base configuration (defaults to the waveguide preset)")
      ->check(CLI::ExistingFile);
  converge->add_option("-s,--set", overrides, "Override a configuration key, key=value (repeatable)");
  converge->add_option("--orders", orders, "Comma separated interior orders")->capture_default_str();
  converge->add_option("--h", hs, "Comma separated grid spacings")->capture_default_str();
  converge->add_option("-o,--output", output, "Output directory for error_table.csv")
      ->default_str(".");

  auto* modal = app.add_subcommand("modal", "Root scans of the boundary dispersion relations");
  modal->add_option("-o,--output", output, "Output directory for modal_scan.csv")->default_str(".");
  modal->add_option("--n", n_scan, "Grid points per axis of the complex window")
      ->check(CLI::Range(8, 4000))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, preset, overrides, output);
    if (*verify) return cmd_verify(samples);
    if (*converge) return cmd_converge(config, overrides, orders, hs, output.empty() ? "." : output);
    if (*modal) return cmd_modal(output.empty() ? "." : output, n_scan);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
