#include "sbppml/sbp_operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sbppml {

namespace {

struct Coefficients {
  std::size_t bw;
  std::size_t m;
  std::vector<double> weights;               // P/h for the first bw points
  std::vector<std::vector<double>> upper;    // boundary rows i < bw, columns i+1..m-1
  std::vector<double> stencil;               // offsets 1..hw
};

constexpr double kSixthOrderClosureParameter = 0.7012864708758515873331;

Coefficients coefficients_for(int order) {
  switch (order) {
    case 2:
      return {1, 2, {0.5}, {{0.5}}, {0.5}};
    case 4:
      return {4,
              6,
              {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0},
              {{59.0 / 96.0, -1.0 / 12.0, -1.0 / 32.0, 0.0, 0.0},
               {59.0 / 96.0, 0.0, 0.0, 0.0},
               {59.0 / 96.0, -1.0 / 12.0, 0.0},
               {2.0 / 3.0, -1.0 / 12.0}},
              {2.0 / 3.0, -1.0 / 12.0}};
    case 6: {
      // One-parameter closure family; x = Q(4,5).
      const double x = kSixthOrderClosureParameter;
      return {6,
              9,
              {13649.0 / 43200.0, 12013.0 / 8640.0, 2711.0 / 4320.0, 5359.0 / 4320.0,
               7877.0 / 8640.0, 43801.0 / 43200.0},
              {{x - 953.0 / 16200.0, 715489.0 / 259200.0 - 4 * x, 6 * x - 62639.0 / 14400.0,
                147127.0 / 51840.0 - 4 * x, x - 89387.0 / 129600.0, 0.0, 0.0, 0.0},
               {10 * x - 57139.0 / 8640.0, 745733.0 / 51840.0 - 20 * x,
                15 * x - 18343.0 / 1728.0, 240569.0 / 86400.0 - 4 * x, 0.0, 0.0, 0.0},
               {20 * x - 176839.0 / 12960.0, 242111.0 / 17280.0 - 20 * x,
                6 * x - 182261.0 / 43200.0, 0.0, 0.0, 0.0},
               {10 * x - 165041.0 / 25920.0, 710473.0 / 259200.0 - 4 * x, 1.0 / 60.0, 0.0, 0.0},
               {x, -0.15, 1.0 / 60.0, 0.0},
               {0.75, -0.15, 1.0 / 60.0}},
              {0.75, -0.15, 1.0 / 60.0}};
    }
    default:
      throw SbpError("unsupported interior order " + std::to_string(order) +
                     " (expected 2, 4 or 6)");
  }
}

}  // namespace

std::size_t SbpOperator1D::min_points(int interior_order) {
  return 2 * coefficients_for(interior_order).bw + 1;
}

SbpOperator1D SbpOperator1D::build(int interior_order, std::size_t n, double h) {
  const Coefficients c = coefficients_for(interior_order);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw SbpError("grid spacing must be positive and finite");
  }
  if (n < 2 * c.bw + 1) {
    throw SbpError("order " + std::to_string(interior_order) + " operator needs n >= " +
                   std::to_string(2 * c.bw + 1) + ", got n = " + std::to_string(n));
  }

  SbpOperator1D op;
  op.order_ = interior_order;
  op.n_ = n;
  op.h_ = h;
  op.bw_ = c.bw;
  op.m_ = c.m;
  op.hw_ = c.stencil.size();
  op.stencil_ = c.stencil;

  op.p_.assign(n, h);
  for (std::size_t i = 0; i < c.bw; ++i) {
    op.p_[i] = c.weights[i] * h;
    op.p_[n - 1 - i] = c.weights[i] * h;
  }

  const std::size_t m = c.m;
  op.closure_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double v = 0.0;
      if (i < c.bw) {
        v = c.upper[i][j - i - 1];
      } else if (j - i <= op.hw_) {
        v = c.stencil[j - i - 1];
      }
      op.closure_[i * m + j] = v;
      op.closure_[j * m + i] = -v;
    }
  }
  op.closure_[0] = -0.5;

  op.d_closure_.assign(c.bw * m, 0.0);
  for (std::size_t i = 0; i < c.bw; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      op.d_closure_[i * m + j] = op.closure_[i * m + j] / op.p_[i];
    }
  }
  op.d_stencil_.resize(op.hw_);
  for (std::size_t k = 0; k < op.hw_; ++k) op.d_stencil_[k] = c.stencil[k] / h;
  return op;
}

double SbpOperator1D::q(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw DimensionError("Q index out of range");
  if (i < bw_) return j < m_ ? closure_[i * m_ + j] : 0.0;
  if (i >= n_ - bw_) {
    const std::size_t ri = n_ - 1 - i;
    const std::size_t rj = n_ - 1 - j;
    return rj < m_ ? -closure_[ri * m_ + rj] : 0.0;
  }
  if (i == j) return 0.0;
  const std::size_t off = i > j ? i - j : j - i;
  if (off > hw_) return 0.0;
  return j > i ? stencil_[off - 1] : -stencil_[off - 1];
}

Eigen::MatrixXd SbpOperator1D::dense_q() const {
  Eigen::MatrixXd out(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(i, j) = q(i, j);
  return out;
}

Eigen::MatrixXd SbpOperator1D::dense_d() const {
  Eigen::MatrixXd out = dense_q();
  for (std::size_t i = 0; i < n_; ++i) out.row(i) /= p_[i];
  return out;
}

void SbpOperator1D::apply_line(const double* u, std::ptrdiff_t stride, double* out,
                               std::ptrdiff_t ostride, double scale, bool accumulate) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  const auto bw = static_cast<std::ptrdiff_t>(bw_);
  const auto m = static_cast<std::ptrdiff_t>(m_);
  const auto hw = static_cast<std::ptrdiff_t>(hw_);
  auto store = [&](std::ptrdiff_t r, double v) {
    double& dst = out[r * ostride];
    dst = accumulate ? dst + scale * v : scale * v;
  };
  for (std::ptrdiff_t r = 0; r < bw; ++r) {
    const double* row = &d_closure_[static_cast<std::size_t>(r * m)];
    double left = 0.0;
    double right = 0.0;
    for (std::ptrdiff_t j = 0; j < m; ++j) {
      left += row[j] * u[j * stride];
      right += row[j] * u[(n - 1 - j) * stride];
    }
    store(r, left);
    store(n - 1 - r, -right);
  }
  for (std::ptrdiff_t r = bw; r < n - bw; ++r) {
    double v = 0.0;
    for (std::ptrdiff_t k = 1; k <= hw; ++k) {
      v += d_stencil_[static_cast<std::size_t>(k - 1)] * (u[(r + k) * stride] - u[(r - k) * stride]);
    }
    store(r, v);
  }
}

void apply_derivative_into(const SbpOperator1D& op, std::span<const double> u, std::size_t nx,
                           std::size_t ny, Axis axis, std::span<double> out, double scale,
                           bool accumulate) {
  if (u.size() != nx * ny || out.size() != nx * ny) {
    throw DimensionError("field length does not match nx*ny");
  }
  const std::size_t along = axis == Axis::X ? nx : ny;
  if (op.n() != along) {
    throw DimensionError("operator size " + std::to_string(op.n()) +
                         " does not match grid dimension " + std::to_string(along));
  }
  const auto sny = static_cast<std::ptrdiff_t>(ny);
  if (axis == Axis::Y) {
    for (std::size_t i = 0; i < nx; ++i) {
      op.apply_line(u.data() + i * ny, 1, out.data() + i * ny, 1, scale, accumulate);
    }
  } else {
    for (std::size_t j = 0; j < ny; ++j) {
      op.apply_line(u.data() + j, sny, out.data() + j, sny, scale, accumulate);
    }
  }
}

StackedField apply_derivative(const SbpOperator1D& op, const StackedField& u, Axis axis) {
  if (u.values.size() != u.nx * u.ny) throw DimensionError("stacked field length mismatch");
  StackedField out(u.nx, u.ny);
  apply_derivative_into(op, u.values, u.nx, u.ny, axis, out.values);
  return out;
}

OperatorReport operator_verification_report(const Eigen::VectorXd& p, const Eigen::MatrixXd& q,
                                            int interior_order, double h, double tol) {
  const auto n = static_cast<Eigen::Index>(p.size());
  if (q.rows() != n || q.cols() != n) throw DimensionError("P and Q sizes differ");
  const std::size_t bw = coefficients_for(interior_order).bw;

  OperatorReport rep;
  rep.interior_order = interior_order;
  rep.n = static_cast<std::size_t>(n);
  rep.p_positive = (p.array() > 0.0).all();

  Eigen::MatrixXd b = q + q.transpose();
  b(0, 0) += 1.0;
  b(n - 1, n - 1) -= 1.0;
  rep.sbp_residual = b.cwiseAbs().maxCoeff();
  rep.sbp_pass = rep.sbp_residual <= 1e-14;

  Eigen::MatrixXd d = q;
  for (Eigen::Index i = 0; i < n; ++i) d.row(i) /= p(i);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = static_cast<double>(i) * h;

  bool boundary_ok = true;
  bool interior_ok = true;
  for (int k = 0; k <= interior_order; ++k) {
    Eigen::VectorXd f = x.array().pow(k);
    Eigen::VectorXd df =
        k == 0 ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(k * x.array().pow(k - 1));
    Eigen::VectorXd r = d * f - df;
    const double scale = 1.0 + df.cwiseAbs().maxCoeff();
    DegreeResidual dr;
    dr.degree = k;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool boundary_row = static_cast<std::size_t>(i) < bw ||
                                static_cast<std::size_t>(i) >= static_cast<std::size_t>(n) - bw;
      double& slot = boundary_row ? dr.boundary_residual : dr.interior_residual;
      slot = std::max(slot, std::abs(r(i)) / scale);
    }
    boundary_ok = boundary_ok && dr.boundary_residual <= tol;
    interior_ok = interior_ok && dr.interior_residual <= tol;
    if (boundary_ok) rep.boundary_exact_degree = k;
    if (interior_ok) rep.interior_exact_degree = k;
    rep.degrees.push_back(dr);
  }
  rep.accuracy_pass = rep.boundary_exact_degree >= interior_order / 2 &&
                      rep.interior_exact_degree >= interior_order;
  return rep;
}

OperatorReport operator_verification_report(const SbpOperator1D& op, double tol) {
  Eigen::VectorXd p(op.n());
  for (std::size_t i = 0; i < op.n(); ++i) p(static_cast<Eigen::Index>(i)) = op.p_diag()[i];
  return operator_verification_report(p, op.dense_q(), op.interior_order(), op.h(), tol);
}

}  // namespace sbppml
