#include "sbppml/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace sbppml {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ScenarioKind scenario_from_string(const std::string& s) {
  if (s == "cavity") return ScenarioKind::Cavity;
  if (s == "waveguide") return ScenarioKind::Waveguide;
  if (s == "reference") return ScenarioKind::Reference;
  throw ConfigError("field 'scenario': unknown value '" + s +
                    "' (expected cavity, waveguide, reference)");
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "preset",      "scenario",    "x0",      "y0",       "delta",         "h",
      "dt_factor",   "t_final",     "order",   "model",    "theta",         "penalties",
      "theta_bar_x", "theta_bar_y", "alpha_x", "alpha_y",  "theta_x",       "theta_y",
      "r_x",         "r_y",         "tol",     "tol_h_scaled", "d0",        "x_ref",
      "output_dir",  "stride",      "error_interval"};
  return keys;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Cavity: return "cavity";
    case ScenarioKind::Waveguide: return "waveguide";
    case ScenarioKind::Reference: return "reference";
  }
  return "unknown";
}

std::vector<std::string> ScenarioConfig::preset_names() {
  return {"cavity", "cavity-desk", "cavity-small", "waveguide", "reference"};
}

ScenarioConfig ScenarioConfig::preset(const std::string& name) {
  ScenarioConfig c;
  if (name == "cavity") return c;
  if (name == "cavity-desk") {
    c.x0 = 25.0;
    c.y0 = 25.0;
    c.delta = 5.0;
    c.t_final = 2000.0;
    return c;
  }
  if (name == "cavity-small") {
    c.x0 = 4.0;
    c.y0 = 6.0;
    c.delta = 2.0;
    c.t_final = 100.0;
    return c;
  }
  if (name == "waveguide" || name == "reference") {
    c.scenario = name == "waveguide" ? ScenarioKind::Waveguide : ScenarioKind::Reference;
    c.x0 = 2.0;
    c.y0 = 1.0;
    c.delta = 0.4;
    c.h = 0.02;
    c.t_final = 5.0;
    c.model = name == "waveguide" ? ModelSpec{ModelKind::ModalUnsplit, 1.0}
                                  : ModelSpec{ModelKind::Interior, 0.0};
    c.r_x = 0.0;
    c.r_y = 1.0;
    c.tol_h_scaled = true;
    c.stride = 25;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "' (expected cavity, cavity-desk, cavity-small, waveguide, reference)");
}

ScenarioConfig ScenarioConfig::from_config(const KeyValueConfig& kv) {
  for (const auto& [k, v] : kv.values()) {
    if (!known_keys().count(k)) throw ConfigError("unknown configuration key '" + k + "'");
  }
  ScenarioConfig c = preset(kv.get_string("preset", "cavity"));
  if (kv.has("scenario")) c.scenario = scenario_from_string(kv.get_string("scenario", ""));
  c.x0 = kv.get_double("x0", c.x0);
  c.y0 = kv.get_double("y0", c.y0);
  c.delta = kv.get_double("delta", c.delta);
  c.h = kv.get_double("h", c.h);
  c.dt_factor = kv.get_double("dt_factor", c.dt_factor);
  c.t_final = kv.get_double("t_final", c.t_final);
  c.order = static_cast<int>(kv.get_int("order", c.order));
  if (kv.has("model")) {
    try {
      c.model.kind = model_kind_from_string(kv.get_string("model", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("field 'model': ") + e.what());
    }
  }
  c.model.theta = kv.get_double("theta", c.model.theta);
  c.penalties = kv.get_string("penalties", c.penalties);
  c.theta_bar_x = kv.get_double("theta_bar_x", c.theta_bar_x);
  c.theta_bar_y = kv.get_double("theta_bar_y", c.theta_bar_y);
  c.custom_penalties.alpha_x = kv.get_double("alpha_x", c.custom_penalties.alpha_x);
  c.custom_penalties.alpha_y = kv.get_double("alpha_y", c.custom_penalties.alpha_y);
  c.custom_penalties.theta_x = kv.get_double("theta_x", c.custom_penalties.theta_x);
  c.custom_penalties.theta_y = kv.get_double("theta_y", c.custom_penalties.theta_y);
  c.r_x = kv.get_double("r_x", c.r_x);
  c.r_y = kv.get_double("r_y", c.r_y);
  c.tol = kv.get_double("tol", c.tol);
  c.tol_h_scaled = kv.get_bool("tol_h_scaled", c.tol_h_scaled);
  if (kv.has("d0")) {
    const std::string v = kv.get_string("d0", "auto");
    c.d0 = v == "auto" ? std::nullopt : std::optional<double>(parse_double_field("d0", v));
  }
  c.x_ref = kv.get_double("x_ref", c.x_ref);
  c.output_dir = kv.get_string("output_dir", c.output_dir);
  const long stride = kv.get_int("stride", static_cast<long>(c.stride));
  if (stride < 1) throw ConfigError("field 'stride': must be at least 1");
  c.stride = static_cast<std::size_t>(stride);
  c.error_interval = kv.get_double("error_interval", c.error_interval);
  c.validate();
  return c;
}

KeyValueConfig ScenarioConfig::to_key_values() const {
  KeyValueConfig kv;
  kv.set("scenario", to_string(scenario));
  kv.set("x0", fmt(x0));
  kv.set("y0", fmt(y0));
  kv.set("delta", fmt(delta));
  kv.set("h", fmt(h));
  kv.set("dt_factor", fmt(dt_factor));
  kv.set("t_final", fmt(t_final));
  kv.set("order", std::to_string(order));
  kv.set("model", to_string(model.kind));
  kv.set("theta", fmt(model.theta));
  kv.set("penalties", penalties);
  kv.set("theta_bar_x", fmt(theta_bar_x));
  kv.set("theta_bar_y", fmt(theta_bar_y));
  kv.set("alpha_x", fmt(custom_penalties.alpha_x));
  kv.set("alpha_y", fmt(custom_penalties.alpha_y));
  kv.set("theta_x", fmt(custom_penalties.theta_x));
  kv.set("theta_y", fmt(custom_penalties.theta_y));
  kv.set("r_x", fmt(r_x));
  kv.set("r_y", fmt(r_y));
  kv.set("tol", fmt(tol));
  kv.set("tol_h_scaled", tol_h_scaled ? "true" : "false");
  kv.set("d0", d0 ? fmt(*d0) : "auto");
  kv.set("x_ref", fmt(x_ref));
  kv.set("output_dir", output_dir);
  kv.set("stride", std::to_string(stride));
  kv.set("error_interval", fmt(error_interval));
  return kv;
}

std::string ScenarioConfig::echo() const {
  std::ostringstream os;
  const KeyValueConfig kv = to_key_values();
  for (const auto& [k, v] : kv.values()) {
    const bool quote = k == "output_dir" || k == "model" || k == "penalties" || k == "scenario";
    os << k << " = " << (quote ? "\"" + v + "\"" : v) << '\n';
  }
  return os.str();
}

double ScenarioConfig::damping_strength() const {
  if (d0) return *d0;
  const double t = tol_h_scaled ? (tol * h) * (tol * h) : tol;
  return damping_coefficient(delta, t);
}

Grid2D ScenarioConfig::grid() const {
  switch (scenario) {
    case ScenarioKind::Cavity: return Grid2D::from_spacing(-x0 - delta, x0 + delta, -y0, y0, h);
    case ScenarioKind::Waveguide: return Grid2D::from_spacing(-x0, x0 + delta, -y0, y0, h);
    case ScenarioKind::Reference: return Grid2D::from_spacing(-x0, x_ref, -y0, y0, h);
  }
  throw ConfigError("unknown scenario");
}

BoundaryConfig ScenarioConfig::boundary() const {
  BoundaryConfig bc;
  bc.r_x = r_x;
  bc.r_y = r_y;
  if (scenario != ScenarioKind::Cavity) {
    const double ytop = y0;
    bc.top = [ytop](double x, double t) { return waveguide_forcing(x, ytop, t); };
  }
  return bc;
}

PenaltyParams ScenarioConfig::penalty_params(const BoundaryConfig& bc) const {
  if (penalties == "estimate") return PenaltyParams::estimate_matching(bc, theta_bar_x, theta_bar_y);
  if (penalties == "universal") return PenaltyParams::universal();
  if (penalties == "custom") return custom_penalties;
  throw ConfigError("field 'penalties': unknown value '" + penalties +
                    "' (expected estimate, universal, custom)");
}

Discretization ScenarioConfig::discretization() const {
  const Grid2D g = grid();
  const BoundaryConfig bc = boundary();
  DampingProfile prof = scenario == ScenarioKind::Reference
                            ? DampingProfile::none(g)
                            : DampingProfile::make(g, x0, delta, damping_strength());
  return Discretization(g, order, std::move(prof), bc, penalty_params(bc));
}

FieldState ScenarioConfig::initial_state(const Grid2D& g) const {
  const FieldModel fm = field_model(model.kind);
  if (scenario == ScenarioKind::Cavity) return cavity_initial_state(g, fm);
  return FieldState::zeros(fm, g.nx, g.ny);
}

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("field '") + name + "': must be positive");
    }
  };
  positive(h, "h");
  positive(dt_factor, "dt_factor");
  positive(delta, "delta");
  positive(y0, "y0");
  if (!(t_final >= 0.0)) throw ConfigError("field 't_final': must be non-negative");
  if (order != 2 && order != 4 && order != 6) throw ConfigError("field 'order': must be 2, 4 or 6");
  if (!(tol > 0.0 && tol < 1.0) && !d0) throw ConfigError("field 'tol': must lie in (0, 1)");
  if (std::abs(r_x) > 1.0) throw ConfigError("field 'r_x': must satisfy |r_x| <= 1");
  if (std::abs(r_y) > 1.0) throw ConfigError("field 'r_y': must satisfy |r_y| <= 1");
  if (!(error_interval > 0.0)) throw ConfigError("field 'error_interval': must be positive");
  if (penalties != "estimate" && penalties != "universal" && penalties != "custom") {
    throw ConfigError("field 'penalties': unknown value '" + penalties + "'");
  }
  for (auto [v, name] : {std::pair{x0, "x0"}, std::pair{delta, "delta"}}) {
    const double cells = v / h;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
      throw ConfigError(std::string("field '") + name + "': must be an integer multiple of h");
    }
  }
  if (scenario == ScenarioKind::Reference && !(x_ref > x0)) {
    throw ConfigError("field 'x_ref': must exceed x0");
  }
}

FieldState cavity_initial_state(const Grid2D& grid, FieldModel model) {
  FieldState s = FieldState::zeros(model, grid.nx, grid.ny);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double y = grid.y(j);
      s.ez(i, j) = std::exp(-(x * x + y * y) / 9.0);
    }
  }
  return s;
}

double waveguide_forcing(double x, double y, double t) {
  const double pulse = 10.0 * t - 1.0;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return std::exp(-pi2 * pulse * pulse) *
         std::exp(-((x - 1.0) * (x - 1.0) + (y - 1.0) * (y - 1.0)) / 0.01);
}

SimulationOutput simulate(const ScenarioConfig& cfg, const StepCallback& on_step) {
  cfg.validate();
  const Discretization d = cfg.discretization();
  const TimeGrid tg = cfg.time_grid();
  SimulationOutput out;
  out.dt = tg.dt;
  out.steps_planned = tg.n_steps;

  FieldState u = cfg.initial_state(d.grid);
  EnergyMonitor monitor(cfg.model, d);
  monitor.set_step(tg.dt);
  RhsWorkspace rws;
  Rk4Workspace<FieldState> ws;
  auto rhs = [&](double t, const FieldState& x, FieldState& dx) {
    evaluate_rhs_into(cfg.model, x, d, t, dx, rws);
  };
  auto observer = [&](int s, double t, const FieldState& x, const FieldState& k) {
    monitor.observe(s, t, x, k);
  };
  auto sample = [&](double t) {
    out.history.append(t, discrete_l2_norms(u, d.px(), d.py()), monitor.energy(u, t));
  };

  sample(0.0);
  FieldState last_good = u;
  for (std::size_t n = 0; n < tg.n_steps; ++n) {
    const double t = static_cast<double>(n) * tg.dt;
    last_good = u;
    try {
      rk4_step(rhs, u, t, tg.dt, ws, observer, n + 1);
    } catch (const BlowUpError&) {
      out.blowup_step = n + 1;
      u = last_good;
      break;
    }
    out.steps_done = n + 1;
    const double tn = static_cast<double>(n + 1) * tg.dt;
    out.t_reached = tn;
    if ((n + 1) % cfg.stride == 0 || n + 1 == tg.n_steps) sample(tn);
    if (on_step) on_step(n + 1, tn, u);
  }
  out.final_state = std::move(u);
  return out;
}

void write_snapshot(std::ostream& os, const Grid2D& grid, const StackedField& f) {
  char buf[64];
  os << grid.nx << ' ' << grid.ny << ' ' << fmt(grid.hx) << ' ' << fmt(grid.hy) << '\n';
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g", j ? " " : "", f(i, j));
      os << buf;
    }
    os << '\n';
  }
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
  RunArtifacts art;
  art.output = simulate(cfg);
  if (cfg.output_dir.empty()) return art;

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  art.history_csv = (dir / "history.csv").string();
  art.snapshot = (dir / "snapshot.txt").string();
  art.params_echo = (dir / "params.toml").string();

  std::ostringstream hist;
  art.output.history.write_csv(hist);
  write_text(art.history_csv, hist.str());

  std::ostringstream snap;
  write_snapshot(snap, cfg.grid(), art.output.final_state.total_ez());
  write_text(art.snapshot, snap.str());

  std::ostringstream echo;
  echo << "# sbppml run parameters\n" << cfg.echo();
  echo << "# dt = " << fmt(art.output.dt) << ", steps = " << art.output.steps_planned << '\n';
  if (art.output.blowup_step) {
    echo << "# status = diverged at step " << *art.output.blowup_step << " (t = "
         << fmt(static_cast<double>(*art.output.blowup_step) * art.output.dt) << ")\n";
  } else {
    echo << "# status = completed at t = " << fmt(art.output.t_reached) << '\n';
  }
  write_text(art.params_echo, echo.str());
  return art;
}

double max_interior_error(const FieldState& a, const Grid2D& ga, const FieldState& b,
                          const Grid2D& gb, double x_limit) {
  const double tol = 1e-9 * ga.hx;
  if (std::abs(ga.hx - gb.hx) > tol || std::abs(ga.hy - gb.hy) > tol ||
      std::abs(ga.x_min - gb.x_min) > tol || ga.ny != gb.ny ||
      std::abs(ga.y_min - gb.y_min) > tol) {
    throw DimensionError("error measurement needs grids with matching spacing and origin");
  }
  const StackedField ea = a.total_ez();
  const StackedField eb = b.total_ez();
  double err = 0.0;
  for (std::size_t i = 0; i < std::min(ga.nx, gb.nx) && ga.x(i) <= x_limit + tol; ++i) {
    for (std::size_t j = 0; j < ga.ny; ++j) err = std::max(err, std::abs(ea(i, j) - eb(i, j)));
  }
  return err;
}

std::vector<ErrorRow> waveguide_error_study(const ScenarioConfig& base,
                                            const std::vector<int>& orders,
                                            const std::vector<double>& hs) {
  std::vector<ErrorRow> rows;
  for (int order : orders) {
    const ErrorRow* prev = nullptr;
    for (double h : hs) {
      ScenarioConfig pc = base;
      pc.scenario = ScenarioKind::Waveguide;
      pc.order = order;
      pc.h = h;
      ScenarioConfig rc = pc;
      rc.scenario = ScenarioKind::Reference;
      rc.model = {ModelKind::Interior, 0.0};
      pc.validate();
      rc.validate();

      const Discretization dp = pc.discretization();
      const Discretization dr = rc.discretization();
      const TimeGrid tg = pc.time_grid();
      FieldState up = pc.initial_state(dp.grid);
      FieldState ur = rc.initial_state(dr.grid);
      RhsWorkspace wp, wr;
      Rk4Workspace<FieldState> kp, kr;
      auto rhs_p = [&](double t, const FieldState& x, FieldState& dx) {
        evaluate_rhs_into(pc.model, x, dp, t, dx, wp);
      };
      auto rhs_r = [&](double t, const FieldState& x, FieldState& dx) {
        evaluate_rhs_into(rc.model, x, dr, t, dx, wr);
      };

      ErrorRow row;
      row.order = order;
      row.h = h;
      long next_sample = 1;
      for (std::size_t n = 0; n < tg.n_steps; ++n) {
        const double t = static_cast<double>(n) * tg.dt;
        rk4_step(rhs_p, up, t, tg.dt, kp, NoStageObserver{}, n + 1);
        rk4_step(rhs_r, ur, t, tg.dt, kr, NoStageObserver{}, n + 1);
        const double tn = static_cast<double>(n + 1) * tg.dt;
        if (tn + 1e-9 * tg.dt >= static_cast<double>(next_sample) * pc.error_interval) {
          row.history.emplace_back(tn, max_interior_error(up, dp.grid, ur, dr.grid, pc.x0));
          while (static_cast<double>(next_sample) * pc.error_interval <= tn + 1e-9 * tg.dt) {
            ++next_sample;
          }
        }
      }
      row.error = max_interior_error(up, dp.grid, ur, dr.grid, pc.x0);
      if (prev && prev->error > 0.0 && row.error > 0.0) {
        row.rate = std::log(prev->error / row.error) / std::log(prev->h / row.h);
      }
      rows.push_back(std::move(row));
      prev = &rows.back();
    }
  }
  return rows;
}

void write_error_table(std::ostream& os, const std::vector<ErrorRow>& rows) {
  os << "order,h,error,rate\n";
  for (const auto& r : rows) {
    os << r.order << ',' << fmt(r.h) << ',' << fmt(r.error) << ',';
    if (r.rate) os << fmt(*r.rate);
    os << '\n';
  }
}

}  // namespace sbppml
