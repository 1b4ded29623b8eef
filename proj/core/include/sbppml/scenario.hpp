#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbppml/config.hpp"
#include "sbppml/diagnostics.hpp"
#include "sbppml/pml.hpp"
#include "sbppml/rk4.hpp"

namespace sbppml {

enum class ScenarioKind { Cavity, Waveguide, Reference };

std::string to_string(ScenarioKind k);

/// Fully resolved run description. Every field round-trips through the
/// key = value echo written next to the run artifacts.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::Cavity;
  double x0 = 50.0;
  double y0 = 50.0;
  double delta = 10.0;
  double h = 1.0;
  double dt_factor = 0.4;
  double t_final = 5000.0;
  int order = 4;
  ModelSpec model{ModelKind::ModalUnsplit, 0.0};
  std::string penalties = "estimate";  // estimate | universal | custom
  double theta_bar_x = 0.0;
  double theta_bar_y = 0.0;
  PenaltyParams custom_penalties;
  double r_x = 0.0;
  double r_y = 0.0;
  double tol = 1e-4;
  bool tol_h_scaled = false;  // use (tol*h)^2 in the damping coefficient
  std::optional<double> d0;   // overrides tol when set
  double x_ref = 8.0;         // right end of the reference domain
  std::string output_dir;
  std::size_t stride = 1;
  double error_interval = 0.05;

  static ScenarioConfig preset(const std::string& name);
  static std::vector<std::string> preset_names();
  /// Starts from the preset named by `preset` (default cavity), then applies keys.
  static ScenarioConfig from_config(const KeyValueConfig& kv);

  KeyValueConfig to_key_values() const;
  std::string echo() const;

  double max_dt() const { return dt_factor * h; }
  TimeGrid time_grid() const { return TimeGrid::covering(t_final, max_dt()); }
  double damping_strength() const;
  Grid2D grid() const;
  BoundaryConfig boundary() const;
  PenaltyParams penalty_params(const BoundaryConfig& bc) const;
  Discretization discretization() const;
  FieldState initial_state(const Grid2D& grid) const;
  void validate() const;
};

/// Ez = exp(-(x^2 + y^2)/9), all other fields zero.
FieldState cavity_initial_state(const Grid2D& grid, FieldModel model = FieldModel::ModalUnsplit);

/// exp(-pi^2 (10 t - 1)^2) exp(-((x-1)^2 + (y-1)^2)/0.01).
double waveguide_forcing(double x, double y, double t);

struct SimulationOutput {
  EnergyHistory history;
  FieldState final_state;  // last finite state
  double t_reached = 0.0;
  std::size_t steps_done = 0;
  std::size_t steps_planned = 0;
  double dt = 0.0;
  std::optional<std::size_t> blowup_step;
};

using StepCallback = std::function<void(std::size_t step, double t, const FieldState& u)>;

/// Time loop with RK4; samples norms and energy every cfg.stride steps and at the end.
SimulationOutput simulate(const ScenarioConfig& cfg, const StepCallback& on_step = {});

struct RunArtifacts {
  std::string history_csv;
  std::string snapshot;
  std::string params_echo;
  std::string error_table;
  SimulationOutput output;
};

/// simulate() plus history.csv, snapshot.txt and params.toml in cfg.output_dir.
RunArtifacts run_scenario(const ScenarioConfig& cfg);

/// Plain text dump: header `nx ny hx hy`, then one line of ny values per x index.
void write_snapshot(std::ostream& os, const Grid2D& grid, const StackedField& f);

/// Max |Ez_a - Ez_b| over grid points with x <= x_limit. The grids must share
/// x_min, y extents and spacing.
double max_interior_error(const FieldState& a, const Grid2D& ga, const FieldState& b,
                          const Grid2D& gb, double x_limit);

struct ErrorRow {
  int order = 0;
  double h = 0.0;
  double error = 0.0;
  std::optional<double> rate;
  std::vector<std::pair<double, double>> history;  // (t, error)
};

/// Runs the layered waveguide and the enlarged reference for each (order, h)
/// in lockstep and measures the final-time interior max-norm error.
std::vector<ErrorRow> waveguide_error_study(const ScenarioConfig& base,
                                            const std::vector<int>& orders,
                                            const std::vector<double>& hs);

/// CSV with header order,h,error,rate (rate empty on the first row of an order).
void write_error_table(std::ostream& os, const std::vector<ErrorRow>& rows);

}  // namespace sbppml
