#include "sbppml/pml.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbppml {

DampingProfile DampingProfile::make(const Grid2D& grid, double x0, double delta, double d0) {
  if (!(delta > 0.0)) throw std::invalid_argument("layer width delta must be positive");
  if (!(x0 >= 0.0)) throw std::invalid_argument("layer start x0 must be non-negative");
  if (!(d0 >= 0.0)) throw std::invalid_argument("damping strength d0 must be non-negative");
  DampingProfile p;
  p.x0 = x0;
  p.delta = delta;
  p.d0 = d0;
  p.sigma_values.resize(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) p.sigma_values[i] = sigma_at(grid.x(i), p);
  return p;
}

DampingProfile DampingProfile::none(const Grid2D& grid) {
  DampingProfile p;
  p.x0 = std::max(std::abs(grid.x_min), std::abs(grid.x_max));
  p.sigma_values.assign(grid.nx, 0.0);
  return p;
}

double DampingProfile::max_sigma() const {
  return sigma_values.empty() ? 0.0 : *std::max_element(sigma_values.begin(), sigma_values.end());
}

double damping_coefficient(double delta, double tol) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(tol > 0.0) || !(tol < 1.0)) throw std::invalid_argument("tol must lie in (0, 1)");
  return 4.0 / (2.0 * delta) * std::log(1.0 / tol);
}

double sigma_at(double x, const DampingProfile& prof) {
  const double depth = std::abs(x) - prof.x0;
  if (depth <= 0.0 || prof.d0 == 0.0) return 0.0;
  const double r = depth / prof.delta;
  return prof.d0 * r * r * r;
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Interior: return "interior";
    case ModelKind::ModalUnsplit: return "modal";
    case ModelKind::PhysicallyMotivated: return "physical";
    case ModelKind::SplitFieldNaive: return "split-naive";
    case ModelKind::SplitFieldStable: return "split-stable";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
  for (ModelKind k : {ModelKind::Interior, ModelKind::ModalUnsplit, ModelKind::PhysicallyMotivated,
                      ModelKind::SplitFieldNaive, ModelKind::SplitFieldStable}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown model '" + s +
                              "' (expected interior, modal, physical, split-naive, split-stable)");
}

FieldModel field_model(ModelKind k) {
  switch (k) {
    case ModelKind::Interior: return FieldModel::Interior;
    case ModelKind::ModalUnsplit: return FieldModel::ModalUnsplit;
    case ModelKind::PhysicallyMotivated: return FieldModel::PhysicallyMotivated;
    case ModelKind::SplitFieldNaive:
    case ModelKind::SplitFieldStable: return FieldModel::SplitField;
  }
  return FieldModel::Interior;
}

Discretization::Discretization(const Grid2D& g, int order, DampingProfile prof, BoundaryConfig b,
                               PenaltyParams p)
    : grid(g),
      ox(SbpOperator1D::build(order, g.nx, g.hx)),
      oy(SbpOperator1D::build(order, g.ny, g.hy)),
      profile(std::move(prof)),
      bc(std::move(b)),
      penalties(p) {
  if (profile.sigma_values.size() != g.nx) {
    throw DimensionError("damping profile does not match the grid");
  }
  bc.validate();
}

namespace {

void ensure_shape(FieldState& out, FieldModel model, std::size_t nx, std::size_t ny) {
  if (out.model != model || out.nx() != nx || out.ny() != ny ||
      out.aux.has_value() != (model != FieldModel::Interior)) {
    out = FieldState::zeros(model, nx, ny);
  }
}

}  // namespace

void evaluate_rhs_into(const ModelSpec& spec, const FieldState& u, const Discretization& d,
                       double t, FieldState& out, RhsWorkspace& ws) {
  const FieldModel model = field_model(spec.kind);
  if (u.model != model) {
    throw std::invalid_argument("state model " + to_string(u.model) + " does not match " +
                                to_string(spec.kind));
  }
  const std::size_t nx = d.grid.nx;
  const std::size_t ny = d.grid.ny;
  if (u.nx() != nx || u.ny() != ny) throw DimensionError("state does not match grid");
  ensure_shape(out, model, nx, ny);

  const bool split = model == FieldModel::SplitField;
  std::span<const double> e = u.ez.values;
  if (split) {
    ws.e_total.resize(nx * ny);
    for (std::size_t k = 0; k < nx * ny; ++k) ws.e_total[k] = u.ez.values[k] + u.aux->values[k];
    e = ws.e_total;
  }
  const std::span<const double> sig = d.sigma();
  const PenaltyParams& p = d.penalties;
  compute_wall_residuals(e, u.hy.values, u.hx.values, d.grid, d.bc, t, ws.residuals);

  std::span<double> dez = out.ez.values;
  std::span<double> dhy = out.hy.values;
  std::span<double> dhx = out.hx.values;

  apply_derivative_into(d.ox, u.hy.values, nx, ny, Axis::X, dez, -1.0, false);
  apply_derivative_into(d.ox, e, nx, ny, Axis::X, dhy, -1.0, false);
  apply_derivative_into(d.oy, e, nx, ny, Axis::Y, dhx, 1.0, false);
  add_sat_x(ws.residuals, p, d.px(), ny, dez, dhy);
  add_sat_y(ws.residuals, p, d.py(), nx, {}, dhx);

  if (spec.kind == ModelKind::Interior) {
    apply_derivative_into(d.oy, u.hx.values, nx, ny, Axis::Y, dez, 1.0, true);
    add_sat_y(ws.residuals, p, d.py(), nx, dez, {});
    return;
  }

  // sigma terms shared by every layer model: -sigma E (or E^(x)) and -sigma Hy
  for (std::size_t i = 0; i < nx; ++i) {
    const double s = sig[i];
    if (s == 0.0) continue;
    for (std::size_t j = 0, k = i * ny; j < ny; ++j, ++k) {
      dez[k] -= s * u.ez.values[k];
      dhy[k] -= s * u.hy.values[k];
    }
  }

  std::span<double> daux = out.aux->values;
  const std::span<const double> aux = u.aux->values;
  switch (spec.kind) {
    case ModelKind::ModalUnsplit: {
      ws.dy_hx.resize(nx * ny);
      apply_derivative_into(d.oy, u.hx.values, nx, ny, Axis::Y, ws.dy_hx, 1.0, false);
      for (std::size_t k = 0; k < nx * ny; ++k) dez[k] += ws.dy_hx[k] + aux[k];
      add_sat_y(ws.residuals, p, d.py(), nx, dez, {});
      for (std::size_t i = 0; i < nx; ++i) {
        const double s = sig[i];
        for (std::size_t j = 0, k = i * ny; j < ny; ++j, ++k) daux[k] = s * ws.dy_hx[k];
      }
      if (spec.theta != 0.0) add_sat_y(ws.residuals, p, d.py(), nx, daux, {}, spec.theta, sig);
      break;
    }
    case ModelKind::PhysicallyMotivated: {
      apply_derivative_into(d.oy, u.hx.values, nx, ny, Axis::Y, dez, 1.0, true);
      add_sat_y(ws.residuals, p, d.py(), nx, dez, {});
      for (std::size_t i = 0; i < nx; ++i) {
        const double s = sig[i];
        for (std::size_t j = 0, k = i * ny; j < ny; ++j, ++k) {
          const double r = s * (u.hx.values[k] - aux[k]);
          dhx[k] += r;
          daux[k] = r;
        }
      }
      break;
    }
    case ModelKind::SplitFieldNaive:
      apply_derivative_into(d.oy, u.hx.values, nx, ny, Axis::Y, daux, 1.0, false);
      add_sat_y(ws.residuals, p, d.py(), nx, dez, {});
      break;
    case ModelKind::SplitFieldStable:
      apply_derivative_into(d.oy, u.hx.values, nx, ny, Axis::Y, daux, 1.0, false);
      add_sat_y(ws.residuals, p, d.py(), nx, daux, {});
      break;
    case ModelKind::Interior:
      break;
  }
}

FieldState evaluate_rhs(const ModelSpec& spec, const FieldState& state, const Discretization& d,
                        double t) {
  FieldState out = FieldState::zeros(field_model(spec.kind), d.grid.nx, d.grid.ny);
  RhsWorkspace ws;
  evaluate_rhs_into(spec, state, d, t, out, ws);
  return out;
}

FieldState reduce_splitfield_to_modal(const FieldState& state, const DampingProfile& prof) {
  if (state.model != FieldModel::SplitField || !state.aux) {
    throw std::invalid_argument("reduction expects a split-field state");
  }
  const std::size_t nx = state.nx();
  const std::size_t ny = state.ny();
  if (prof.sigma_values.size() != nx) throw DimensionError("damping profile does not match state");
  FieldState out = FieldState::zeros(FieldModel::ModalUnsplit, nx, ny);
  out.ez = state.total_ez();
  out.hy = state.hy;
  out.hx = state.hx;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0, k = i * ny; j < ny; ++j, ++k) {
      out.aux->values[k] = prof.sigma_values[i] * state.aux->values[k];
    }
  }
  return out;
}

}  // namespace sbppml
