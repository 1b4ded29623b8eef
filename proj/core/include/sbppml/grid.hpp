#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "sbppml/sbp_operator.hpp"

namespace sbppml {

struct Grid2D {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  std::size_t nx = 3;
  std::size_t ny = 3;
  double hx = 0.5;
  double hy = 0.5;

  /// Grid with nx x ny points; spacings follow from the extents.
  static Grid2D from_counts(double x_min, double x_max, std::size_t nx, double y_min,
                            double y_max, std::size_t ny);
  /// Grid with spacing h in both directions. The extents must be integer
  /// multiples of h (to within 1e-9 relative).
  static Grid2D from_spacing(double x_min, double x_max, double y_min, double y_max, double h);

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * hx; }
  double y(std::size_t j) const { return y_min + static_cast<double>(j) * hy; }
  std::size_t size() const { return nx * ny; }
};

enum class FieldModel { Interior, ModalUnsplit, PhysicallyMotivated, SplitField };

std::string to_string(FieldModel m);

/// Unknowns of one model. For ModalUnsplit aux holds Hx*, for
/// PhysicallyMotivated it holds P, for SplitField ez holds Ez^(x) and aux
/// holds Ez^(y).
struct FieldState {
  FieldModel model = FieldModel::Interior;
  StackedField ez;
  StackedField hy;
  StackedField hx;
  std::optional<StackedField> aux;

  static FieldState zeros(FieldModel model, std::size_t nx, std::size_t ny);

  std::size_t nx() const { return ez.nx; }
  std::size_t ny() const { return ez.ny; }
  std::size_t component_count() const { return aux ? 4 : 3; }
  /// Length of the flattened vector (ez, hy, hx[, aux]).
  std::size_t flat_size() const { return component_count() * ez.size(); }

  /// Total electric field; ez + aux for SplitField.
  StackedField total_ez() const;

  /// Component by position in the flattened layout.
  StackedField& component(std::size_t c);
  const StackedField& component(std::size_t c) const;

  /// Throws if aux presence or component shapes violate the invariants.
  void validate() const;
  bool all_finite() const;

  void scale(double a);
  /// this += a * other
  void axpy(double a, const FieldState& other);

  void to_flat(std::span<double> out) const;
  void from_flat(std::span<const double> in);
};

/// 0-based linear index for 1-based (i, j) with y varying fastest.
std::size_t linear_index(std::size_t i, std::size_t j, std::size_t nx, std::size_t ny);

/// v^T (P_x ⊗ P_y) u.
double weighted_inner_product(const StackedField& u, const StackedField& v,
                              std::span<const double> px, std::span<const double> py);
double weighted_inner_product(std::span<const double> u, std::span<const double> v,
                              std::span<const double> px, std::span<const double> py);
double weighted_norm(const StackedField& u, std::span<const double> px,
                     std::span<const double> py);

}  // namespace sbppml
