#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbppml/boundary.hpp"
#include "sbppml/grid.hpp"
#include "sbppml/sbp_operator.hpp"

namespace sbppml {

/// Cubic damping sigma(x) = d0 ((|x|-x0)/delta)^3 for |x| > x0, zero inside.
struct DampingProfile {
  double x0 = 0.0;
  double delta = 1.0;
  double d0 = 0.0;
  std::vector<double> sigma_values;  // one per x grid point

  static DampingProfile make(const Grid2D& grid, double x0, double delta, double d0);
  /// sigma identically zero (no layer).
  static DampingProfile none(const Grid2D& grid);

  double max_sigma() const;
};

/// d0 = (4/(2 delta)) ln(1/tol).
double damping_coefficient(double delta, double tol);

double sigma_at(double x, const DampingProfile& prof);

enum class ModelKind { Interior, ModalUnsplit, PhysicallyMotivated, SplitFieldNaive, SplitFieldStable };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
FieldModel field_model(ModelKind k);

struct ModelSpec {
  ModelKind kind = ModelKind::Interior;
  /// Weight of the stabilizing term; only used by ModalUnsplit.
  double theta = 0.0;
};

/// Everything the semi-discrete operator needs apart from the state.
struct Discretization {
  Grid2D grid;
  SbpOperator1D ox;
  SbpOperator1D oy;
  DampingProfile profile;
  BoundaryConfig bc;
  PenaltyParams penalties;

  Discretization(const Grid2D& g, int order, DampingProfile prof, BoundaryConfig b,
                 PenaltyParams p);

  std::span<const double> px() const { return ox.p_diag(); }
  std::span<const double> py() const { return oy.p_diag(); }
  std::span<const double> sigma() const { return profile.sigma_values; }
};

struct RhsWorkspace {
  WallResiduals residuals;
  std::vector<double> e_total;
  std::vector<double> dy_hx;
};

/// out = du/dt. out is reshaped to match state if needed.
void evaluate_rhs_into(const ModelSpec& spec, const FieldState& state, const Discretization& d,
                       double t, FieldState& out, RhsWorkspace& ws);

FieldState evaluate_rhs(const ModelSpec& spec, const FieldState& state, const Discretization& d,
                        double t);

/// (Ez^(x), Hy, Hx, Ez^(y)) -> (Ez^(x)+Ez^(y), Hy, Hx, sigma Ez^(y)).
FieldState reduce_splitfield_to_modal(const FieldState& state, const DampingProfile& prof);

}  // namespace sbppml
