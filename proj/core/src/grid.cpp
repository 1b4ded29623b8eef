#include "sbppml/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbppml {

namespace {

std::size_t count_for(double lo, double hi, double h, const char* axis) {
  const double cells = (hi - lo) / h;
  const double rounded = std::round(cells);
  if (!(h > 0.0) || !(hi > lo) || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    throw DimensionError(std::string("extent along ") + axis +
                         " is not an integer multiple of h");
  }
  return static_cast<std::size_t>(rounded) + 1;
}

}  // namespace

Grid2D Grid2D::from_counts(double x_min, double x_max, std::size_t nx, double y_min,
                           double y_max, std::size_t ny) {
  if (nx < 3 || ny < 3) throw DimensionError("grid needs at least 3 points per direction");
  if (!(x_max > x_min) || !(y_max > y_min)) throw DimensionError("empty grid extent");
  Grid2D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.y_min = y_min;
  g.y_max = y_max;
  g.nx = nx;
  g.ny = ny;
  g.hx = (x_max - x_min) / static_cast<double>(nx - 1);
  g.hy = (y_max - y_min) / static_cast<double>(ny - 1);
  return g;
}

Grid2D Grid2D::from_spacing(double x_min, double x_max, double y_min, double y_max, double h) {
  return from_counts(x_min, x_max, count_for(x_min, x_max, h, "x"), y_min, y_max,
                     count_for(y_min, y_max, h, "y"));
}

std::string to_string(FieldModel m) {
  switch (m) {
    case FieldModel::Interior: return "interior";
    case FieldModel::ModalUnsplit: return "modal";
    case FieldModel::PhysicallyMotivated: return "physical";
    case FieldModel::SplitField: return "split";
  }
  return "unknown";
}

FieldState FieldState::zeros(FieldModel model, std::size_t nx, std::size_t ny) {
  FieldState s;
  s.model = model;
  s.ez = StackedField(nx, ny);
  s.hy = StackedField(nx, ny);
  s.hx = StackedField(nx, ny);
  if (model != FieldModel::Interior) s.aux = StackedField(nx, ny);
  return s;
}

StackedField FieldState::total_ez() const {
  StackedField out = ez;
  if (model == FieldModel::SplitField && aux) {
    for (std::size_t k = 0; k < out.size(); ++k) out.values[k] += aux->values[k];
  }
  return out;
}

StackedField& FieldState::component(std::size_t c) {
  switch (c) {
    case 0: return ez;
    case 1: return hy;
    case 2: return hx;
    case 3:
      if (aux) return *aux;
      break;
  }
  throw DimensionError("component index out of range");
}

const StackedField& FieldState::component(std::size_t c) const {
  return const_cast<FieldState*>(this)->component(c);
}

void FieldState::validate() const {
  if (aux.has_value() != (model != FieldModel::Interior)) {
    throw DimensionError("auxiliary field presence does not match model " + to_string(model));
  }
  for (std::size_t c = 0; c < component_count(); ++c) {
    const StackedField& f = component(c);
    if (!f.same_shape(ez) || f.values.size() != f.nx * f.ny) {
      throw DimensionError("field components do not share grid dimensions");
    }
  }
}

bool FieldState::all_finite() const {
  for (std::size_t c = 0; c < component_count(); ++c) {
    for (double v : component(c).values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void FieldState::scale(double a) {
  for (std::size_t c = 0; c < component_count(); ++c) {
    for (double& v : component(c).values) v *= a;
  }
}

void FieldState::axpy(double a, const FieldState& other) {
  if (other.component_count() != component_count() || !other.ez.same_shape(ez)) {
    throw DimensionError("axpy on states of different layout");
  }
  for (std::size_t c = 0; c < component_count(); ++c) {
    auto& dst = component(c).values;
    const auto& src = other.component(c).values;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += a * src[k];
  }
}

void FieldState::to_flat(std::span<double> out) const {
  if (out.size() != flat_size()) throw DimensionError("flat buffer size mismatch");
  const std::size_t n = ez.size();
  for (std::size_t c = 0; c < component_count(); ++c) {
    const auto& src = component(c).values;
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
}

void FieldState::from_flat(std::span<const double> in) {
  if (in.size() != flat_size()) throw DimensionError("flat buffer size mismatch");
  const std::size_t n = ez.size();
  for (std::size_t c = 0; c < component_count(); ++c) {
    auto& dst = component(c).values;
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(c * n),
              in.begin() + static_cast<std::ptrdiff_t>((c + 1) * n), dst.begin());
  }
}

std::size_t linear_index(std::size_t i, std::size_t j, std::size_t nx, std::size_t ny) {
  if (i < 1 || i > nx || j < 1 || j > ny) {
    throw std::out_of_range("grid index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside 1.." + std::to_string(nx) + " x 1.." + std::to_string(ny));
  }
  return (i - 1) * ny + (j - 1);
}

double weighted_inner_product(std::span<const double> u, std::span<const double> v,
                              std::span<const double> px, std::span<const double> py) {
  const std::size_t nx = px.size();
  const std::size_t ny = py.size();
  if (u.size() != nx * ny || v.size() != nx * ny) {
    throw DimensionError("inner product operands do not match the norm dimensions");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    double line = 0.0;
    const std::size_t base = i * ny;
    for (std::size_t j = 0; j < ny; ++j) line += py[j] * u[base + j] * v[base + j];
    total += px[i] * line;
  }
  return total;
}

double weighted_inner_product(const StackedField& u, const StackedField& v,
                              std::span<const double> px, std::span<const double> py) {
  if (!u.same_shape(v)) throw DimensionError("inner product operands differ in shape");
  return weighted_inner_product(std::span<const double>(u.values),
                                std::span<const double>(v.values), px, py);
}

double weighted_norm(const StackedField& u, std::span<const double> px,
                     std::span<const double> py) {
  return std::sqrt(weighted_inner_product(u, u, px, py));
}

}  // namespace sbppml
