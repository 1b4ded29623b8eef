#include "sbppml/boundary.hpp"

#include <cmath>

namespace sbppml {

void BoundaryConfig::validate() const {
  if (!(std::abs(r_x) <= 1.0) || !(std::abs(r_y) <= 1.0)) {
    throw std::invalid_argument("reflection coefficients must satisfy |R| <= 1");
  }
}

PenaltyParams PenaltyParams::estimate_matching(const BoundaryConfig& bc, double theta_bar_x,
                                               double theta_bar_y) {
  bc.validate();
  if (bc.r_x <= -1.0 || bc.r_y <= -1.0) {
    throw PecBoundary("estimate-matching penalties are undefined for R = -1");
  }
  PenaltyParams p;
  p.alpha_x = 2.0 / (1.0 + bc.r_x);
  p.alpha_y = 2.0 / (1.0 + bc.r_y);
  p.theta_x = 2.0 * theta_bar_x / (1.0 + bc.r_x);
  p.theta_y = 2.0 * theta_bar_y / (1.0 + bc.r_y);
  return p;
}

double gamma_from_reflection(double r) {
  if (!(std::abs(r) <= 1.0)) throw std::invalid_argument("reflection coefficient outside [-1, 1]");
  if (r <= -1.0) throw PecBoundary("R = -1 is a PEC wall; gamma is undefined");
  return (1.0 - r) / (1.0 + r);
}

PenaltyEigenvalues penalty_matrix_eigenvalues(double gamma, double theta_bar) {
  PenaltyEigenvalues ev;
  const double tr = gamma + theta_bar;
  const double det = gamma * theta_bar * (1.0 - gamma * theta_bar / 4.0);
  ev.discriminant = tr * tr - 4.0 * det;
  if (ev.discriminant < 0.0) {
    ev.complex_pair = true;
    ev.lambda_minus = ev.lambda_plus = tr / 2.0;
    return ev;
  }
  const double root = std::sqrt(ev.discriminant);
  ev.lambda_plus = (tr + root) / 2.0;
  // det / lambda_plus avoids cancellation in (tr - root) / 2.
  ev.lambda_minus = ev.lambda_plus > 0.0 ? det / ev.lambda_plus : (tr - root) / 2.0;
  return ev;
}

std::string to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::EstimateMatching: return "estimate-matching";
    case PenaltyKind::Universal: return "universal";
    case PenaltyKind::Unstable: return "unstable";
  }
  return "unknown";
}

PenaltyVerdict validate_penalties(const BoundaryConfig& bc, const PenaltyParams& p, double tol) {
  bc.validate();
  PenaltyVerdict v;
  if (!std::isfinite(p.alpha_x) || !std::isfinite(p.alpha_y) || !std::isfinite(p.theta_x) ||
      !std::isfinite(p.theta_y)) {
    v.reason = "non-finite penalty parameter";
    return v;
  }
  auto near = [tol](double a, double b) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); };
  if (near(p.alpha_x, 1.0) && near(p.alpha_y, 1.0) && near(p.theta_x, 1.0) &&
      near(p.theta_y, 1.0)) {
    v.kind = PenaltyKind::Universal;
    v.reason = "unit penalties";
    return v;
  }
  auto direction = [&](double r, double alpha, double theta, const char* name,
                       std::optional<double>& bar) {
    if (r <= -1.0) {
      v.reason = std::string(name) + ": PEC wall admits only the unit penalty set";
      return false;
    }
    if (!near(alpha, 2.0 / (1.0 + r))) {
      v.reason = std::string(name) + ": alpha differs from 2/(1+R)";
      return false;
    }
    const double theta_bar = theta * (1.0 + r) / 2.0;
    const PenaltyEigenvalues ev = penalty_matrix_eigenvalues(gamma_from_reflection(r), theta_bar);
    if (!ev.admissible(tol)) {
      v.reason = std::string(name) + ": penalty matrix has a negative eigenvalue";
      return false;
    }
    bar = theta_bar;
    return true;
  };
  if (direction(bc.r_x, p.alpha_x, p.theta_x, "x", v.theta_bar_x) &&
      direction(bc.r_y, p.alpha_y, p.theta_y, "y", v.theta_bar_y)) {
    v.kind = PenaltyKind::EstimateMatching;
    v.reason = "estimate-matching family";
  }
  return v;
}

namespace {

double eval(const WallData& g, double s, double t) { return g ? g(s, t) : 0.0; }

}  // namespace

void compute_wall_residuals(std::span<const double> e, std::span<const double> hy,
                            std::span<const double> hx, const Grid2D& grid,
                            const BoundaryConfig& bc, double t, WallResiduals& res) {
  const std::size_t nx = grid.nx;
  const std::size_t ny = grid.ny;
  if (e.size() != nx * ny || hy.size() != nx * ny || hx.size() != nx * ny) {
    throw DimensionError("state does not match grid for SAT evaluation");
  }
  const double ax = (1.0 - bc.r_x) / 2.0;
  const double bx = (1.0 + bc.r_x) / 2.0;
  const double ay = (1.0 - bc.r_y) / 2.0;
  const double by = (1.0 + bc.r_y) / 2.0;
  res.left.resize(ny);
  res.right.resize(ny);
  res.bottom.resize(nx);
  res.top.resize(nx);
  const std::size_t last = (nx - 1) * ny;
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = grid.y(j);
    res.left[j] = ax * e[j] + bx * hy[j] - eval(bc.left, y, t);
    res.right[j] = ax * e[last + j] - bx * hy[last + j] - eval(bc.right, y, t);
  }
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = grid.x(i);
    const std::size_t b = i * ny;
    const std::size_t tp = b + ny - 1;
    res.bottom[i] = ay * e[b] - by * hx[b] - eval(bc.bottom, x, t);
    res.top[i] = ay * e[tp] + by * hx[tp] - eval(bc.top, x, t);
  }
}

void add_sat_x(const WallResiduals& res, const PenaltyParams& p, std::span<const double> px,
               std::size_t ny, std::span<double> ez_target, std::span<double> hy_target) {
  const std::size_t nx = px.size();
  const std::size_t last = (nx - 1) * ny;
  const double wl = 1.0 / px[0];
  const double wr = 1.0 / px[nx - 1];
  if (!ez_target.empty()) {
    for (std::size_t j = 0; j < ny; ++j) {
      ez_target[j] -= p.alpha_x * wl * res.left[j];
      ez_target[last + j] -= p.alpha_x * wr * res.right[j];
    }
  }
  if (!hy_target.empty()) {
    for (std::size_t j = 0; j < ny; ++j) {
      hy_target[j] -= p.theta_x * wl * res.left[j];
      hy_target[last + j] += p.theta_x * wr * res.right[j];
    }
  }
}

void add_sat_y(const WallResiduals& res, const PenaltyParams& p, std::span<const double> py,
               std::size_t nx, std::span<double> ez_target, std::span<double> hx_target,
               double ez_scale, std::span<const double> column_weight) {
  const std::size_t ny = py.size();
  const double wb = 1.0 / py[0];
  const double wt = 1.0 / py[ny - 1];
  if (!ez_target.empty()) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double c = ez_scale * p.alpha_y * (column_weight.empty() ? 1.0 : column_weight[i]);
      if (c == 0.0) continue;
      ez_target[i * ny] -= c * wb * res.bottom[i];
      ez_target[i * ny + ny - 1] -= c * wt * res.top[i];
    }
  }
  if (!hx_target.empty()) {
    for (std::size_t i = 0; i < nx; ++i) {
      hx_target[i * ny] += p.theta_y * wb * res.bottom[i];
      hx_target[i * ny + ny - 1] -= p.theta_y * wt * res.top[i];
    }
  }
}

StackedField SatFields::ez() const {
  StackedField out = ez_x;
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] += ez_y.values[k];
  return out;
}

SatFields sat_contributions(const FieldState& state, const BoundaryConfig& bc,
                            const PenaltyParams& p, double t, const Grid2D& grid,
                            std::span<const double> px, std::span<const double> py) {
  state.validate();
  if (state.nx() != grid.nx || state.ny() != grid.ny || px.size() != grid.nx ||
      py.size() != grid.ny) {
    throw DimensionError("state, grid and norms disagree in size");
  }
  const StackedField e = state.total_ez();
  WallResiduals res;
  compute_wall_residuals(e.values, state.hy.values, state.hx.values, grid, bc, t, res);
  SatFields out{StackedField(grid.nx, grid.ny), StackedField(grid.nx, grid.ny),
                StackedField(grid.nx, grid.ny), StackedField(grid.nx, grid.ny)};
  add_sat_x(res, p, px, grid.ny, out.ez_x.values, out.hy.values);
  add_sat_y(res, p, py, grid.nx, out.ez_y.values, out.hx.values);
  return out;
}

}  // namespace sbppml
