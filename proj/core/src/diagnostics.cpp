#include "sbppml/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sbppml {

namespace {

constexpr double kRk4Weights[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

double squared_norm(std::span<const double> u, std::span<const double> px,
                    std::span<const double> py) {
  return weighted_inner_product(u, u, px, py);
}

BoundaryConfig without_data(const BoundaryConfig& bc) {
  BoundaryConfig out;
  out.r_x = bc.r_x;
  out.r_y = bc.r_y;
  return out;
}

}  // namespace

NormRecord discrete_l2_norms(const FieldState& state, std::span<const double> px,
                             std::span<const double> py) {
  NormRecord r;
  r.ez = weighted_norm(state.total_ez(), px, py);
  r.hy = weighted_norm(state.hy, px, py);
  r.hx = weighted_norm(state.hx, px, py);
  if (state.aux) r.aux = weighted_norm(*state.aux, px, py);
  return r;
}

double modal_boundary_integrand(const StackedField& rhs_ez, const Discretization& d) {
  const std::size_t nx = d.grid.nx;
  const std::size_t ny = d.grid.ny;
  const auto px = d.px();
  const auto py = d.py();
  const auto& e = rhs_ez.values;
  double sum = 0.0;
  const std::size_t last = (nx - 1) * ny;
  for (std::size_t j = 0; j < ny; ++j) sum += py[j] * (e[j] * e[j] + e[last + j] * e[last + j]);
  for (std::size_t i = 0; i < nx; ++i) {
    const double b = e[i * ny];
    const double t = e[i * ny + ny - 1];
    sum += px[i] * (b * b + t * t);
  }
  return 2.0 * sum;
}

double modal_energy(const FieldState& state, const StackedField& rhs_ez, const Discretization& d,
                    double theta, double boundary_integral) {
  const std::size_t nx = d.grid.nx;
  const std::size_t ny = d.grid.ny;
  const std::size_t n = nx * ny;
  if (state.nx() != nx || state.ny() != ny || rhs_ez.size() != n) {
    throw DimensionError("energy operands do not match the grid");
  }
  const auto px = d.px();
  const auto py = d.py();
  const auto sig = d.sigma();
  std::vector<double> gx(n), gy(n), shy(n), shx(n);
  apply_derivative_into(d.ox, state.ez.values, nx, ny, Axis::X, gx);
  apply_derivative_into(d.oy, state.ez.values, nx, ny, Axis::Y, gy);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0, k = i * ny; j < ny; ++j, ++k) {
      shy[k] = sig[i] * state.hy.values[k];
      shx[k] = sig[i] * state.hx.values[k];
      gx[k] += shy[k];
      gy[k] += shx[k];
    }
  }
  double e = squared_norm(rhs_ez.values, px, py) + squared_norm(gx, px, py) +
             squared_norm(gy, px, py) + squared_norm(shy, px, py) + squared_norm(shx, px, py);
  if (theta != 0.0) {
    const auto& ez = state.ez.values;
    for (std::size_t i = 0; i < nx; ++i) {
      const double b = ez[i * ny];
      const double t = ez[i * ny + ny - 1];
      e += px[i] * sig[i] * theta * (b * b + t * t);
    }
  }
  return e + boundary_integral;
}

double phys_energy(const FieldState& state, std::span<const double> px,
                   std::span<const double> py, double boundary_integral) {
  double e = squared_norm(state.ez.values, px, py) + squared_norm(state.hy.values, px, py) +
             squared_norm(state.hx.values, px, py);
  if (state.aux) e += squared_norm(state.aux->values, px, py);
  return e + boundary_integral;
}

double phys_boundary_integrand(const FieldState& state, const Discretization& d) {
  FieldState u = FieldState::zeros(FieldModel::Interior, d.grid.nx, d.grid.ny);
  u.ez = state.total_ez();
  u.hy = state.hy;
  u.hx = state.hx;
  const FieldState r = evaluate_rhs({ModelKind::Interior, 0.0}, u, d, 0.0);
  const auto px = d.px();
  const auto py = d.py();
  return -2.0 * (weighted_inner_product(u.ez, r.ez, px, py) +
                 weighted_inner_product(u.hy, r.hy, px, py) +
                 weighted_inner_product(u.hx, r.hx, px, py));
}

EnergyMonitor::EnergyMonitor(const ModelSpec& spec, const Discretization& d)
    : spec_(spec),
      d_(&d),
      homogeneous_(d.grid, d.ox.interior_order(), d.profile, without_data(d.bc), d.penalties) {
  switch (spec.kind) {
    case ModelKind::ModalUnsplit: theta_ = spec.theta; break;
    case ModelKind::SplitFieldStable: theta_ = 1.0; break;
    default: theta_ = 0.0; break;
  }
}

void EnergyMonitor::observe(int stage, double, const FieldState& u, const FieldState& k) {
  const double w = dt_ * kRk4Weights[stage];
  switch (spec_.kind) {
    case ModelKind::ModalUnsplit:
      integral_ += w * modal_boundary_integrand(k.ez, *d_);
      break;
    case ModelKind::SplitFieldNaive:
    case ModelKind::SplitFieldStable:
      integral_ += w * modal_boundary_integrand(k.total_ez(), *d_);
      break;
    case ModelKind::PhysicallyMotivated:
      integral_ += w * phys_boundary_integrand(u, homogeneous_);
      break;
    case ModelKind::Interior:
      break;
  }
}

double EnergyMonitor::energy(const FieldState& state, double t) const {
  const auto px = d_->px();
  const auto py = d_->py();
  switch (spec_.kind) {
    case ModelKind::Interior:
      return phys_energy(state, px, py, 0.0);
    case ModelKind::PhysicallyMotivated:
      return phys_energy(state, px, py, integral_);
    case ModelKind::ModalUnsplit: {
      const FieldState r = evaluate_rhs(spec_, state, *d_, t);
      return modal_energy(state, r.ez, *d_, theta_, integral_);
    }
    case ModelKind::SplitFieldNaive:
    case ModelKind::SplitFieldStable: {
      const FieldState r = evaluate_rhs(spec_, state, *d_, t);
      return modal_energy(reduce_splitfield_to_modal(state, d_->profile), r.total_ez(), *d_,
                          theta_, integral_);
    }
  }
  return 0.0;
}

void EnergyHistory::append(double t, const NormRecord& n, double energy) {
  times.push_back(t);
  norms.push_back(n);
  energies.push_back(energy);
}

void EnergyHistory::write_csv(std::ostream& os) const {
  os << "t,ez_norm,hy_norm,hx_norm,aux_norm,energy\n";
  char buf[256];
  for (std::size_t k = 0; k < times.size(); ++k) {
    const NormRecord& n = norms[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", times[k], n.ez, n.hy,
                  n.hx, n.aux, energies[k]);
    os << buf;
  }
}

void EnergyHistory::validate() const {
  if (norms.size() != times.size() || energies.size() != times.size()) {
    throw std::logic_error("energy history columns differ in length");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::logic_error("energy history times not increasing");
  }
}

GrowthVerdict growth_bound_check(std::span<const double> times, std::span<const double> energies,
                                 double sigma_inf, double tol) {
  if (times.size() != energies.size()) throw std::invalid_argument("history length mismatch");
  if (tol < 0.0) tol = 1e-10;
  GrowthVerdict v;
  double scale = 0.0;
  for (double e : energies) scale = std::max(scale, std::sqrt(std::max(e, 0.0)));
  const double slack = tol * (1.0 + scale);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double prev = std::sqrt(std::max(energies[k], 0.0));
    const double next = std::sqrt(std::max(energies[k + 1], 0.0));
    const double bound = std::exp(sigma_inf * (times[k + 1] - times[k])) * prev;
    if (bound > 0.0) v.worst_ratio = std::max(v.worst_ratio, next / bound);
    if (next > bound + slack && !v.first_violation) {
      v.pass = false;
      v.first_violation = k + 1;
    }
  }
  return v;
}

GrowthVerdict growth_bound_check(const EnergyHistory& hist, double sigma_inf, double tol) {
  return growth_bound_check(hist.times, hist.energies, sigma_inf, tol);
}

Eigen::MatrixXd assemble_semidiscrete_matrix(const ModelSpec& spec, const Discretization& d,
                                             std::size_t max_unknowns) {
  const FieldModel model = field_model(spec.kind);
  FieldState basis = FieldState::zeros(model, d.grid.nx, d.grid.ny);
  const std::size_t n = basis.flat_size();
  if (n > max_unknowns) {
    throw std::length_error("semi-discrete matrix with " + std::to_string(n) +
                            " unknowns exceeds the limit of " + std::to_string(max_unknowns));
  }
  const Discretization h(d.grid, d.ox.interior_order(), d.profile, without_data(d.bc),
                         d.penalties);
  Eigen::MatrixXd a(n, n);
  std::vector<double> flat(n, 0.0);
  std::vector<double> col(n);
  FieldState out;
  RhsWorkspace ws;
  for (std::size_t c = 0; c < n; ++c) {
    flat[c] = 1.0;
    basis.from_flat(flat);
    flat[c] = 0.0;
    evaluate_rhs_into(spec, basis, h, 0.0, out, ws);
    out.to_flat(col);
    for (std::size_t r = 0; r < n; ++r) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
  }
  return a;
}

SpectrumSummary spectrum_summary(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  SpectrumSummary s;
  s.eigenvalues = es.eigenvalues();
  s.max_real = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    s.max_real = std::max(s.max_real, s.eigenvalues(k).real());
    s.spectral_radius = std::max(s.spectral_radius, std::abs(s.eigenvalues(k)));
  }
  return s;
}

}  // namespace sbppml
