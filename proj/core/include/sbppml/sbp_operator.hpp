#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbppml {

class SbpError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Axis { X, Y };

/// A 2D grid function stacked as a vector of length nx*ny, y index fastest:
/// value (i, j) lives at i*ny + j (0-based).
struct StackedField {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;

  StackedField() = default;
  StackedField(std::size_t nx_, std::size_t ny_, double fill = 0.0)
      : nx(nx_), ny(ny_), values(nx_ * ny_, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * ny + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * ny + j]; }

  std::size_t size() const { return values.size(); }
  bool same_shape(const StackedField& o) const { return nx == o.nx && ny == o.ny; }
};

/// Diagonal-norm first-derivative SBP operator D = P^{-1} Q on a uniform
/// grid of n points with spacing h.
///
/// Q is dimensionless and satisfies Q + Q^T = E_R - E_L. It is stored as a
/// skew closure block (upper triangle of the top-left block, the lower
/// triangle being its negative) plus the interior central stencil, so the SBP
/// identity holds exactly in floating point. P includes the factor h.
class SbpOperator1D {
 public:
  /// Interior orders 2, 4 and 6 are supported. The boundary closures are
  /// accurate to order interior_order/2.
  static SbpOperator1D build(int interior_order, std::size_t n, double h);

  /// Smallest admissible grid for a given interior order (2*boundary_width+1).
  static std::size_t min_points(int interior_order);

  int interior_order() const { return order_; }
  std::size_t n() const { return n_; }
  double h() const { return h_; }
  std::size_t boundary_width() const { return bw_; }
  /// Half-width of the interior stencil.
  std::size_t half_width() const { return hw_; }

  std::span<const double> p_diag() const { return p_; }

  /// Entry Q(i, j), 0-based.
  double q(std::size_t i, std::size_t j) const;
  /// Entry D(i, j) = Q(i, j) / P(i).
  double d(std::size_t i, std::size_t j) const { return q(i, j) / p_[i]; }

  Eigen::MatrixXd dense_q() const;
  Eigen::MatrixXd dense_d() const;

  /// out[r*ostride] (+)= scale * (D u)[r] for one line with element stride.
  void apply_line(const double* u, std::ptrdiff_t stride, double* out, std::ptrdiff_t ostride,
                  double scale, bool accumulate) const;

 private:
  SbpOperator1D() = default;

  int order_ = 0;
  std::size_t n_ = 0;
  double h_ = 0.0;
  std::size_t bw_ = 0;  // rows with one-sided stencils
  std::size_t m_ = 0;   // size of the closure block
  std::size_t hw_ = 0;
  std::vector<double> p_;
  std::vector<double> closure_;     // m*m, full skew block (diag(0,0) = -1/2)
  std::vector<double> stencil_;     // Q interior coefficients for offsets 1..hw
  std::vector<double> d_closure_;   // bw*m, D rows of the left closure
  std::vector<double> d_stencil_;   // D interior coefficients for offsets 1..hw
};

/// (D ⊗ I_y) u for Axis::X or (I_x ⊗ D) u for Axis::Y.
StackedField apply_derivative(const SbpOperator1D& op, const StackedField& u, Axis axis);

/// Span form: out (+)= scale * derivative, no allocation.
void apply_derivative_into(const SbpOperator1D& op, std::span<const double> u, std::size_t nx,
                           std::size_t ny, Axis axis, std::span<double> out, double scale = 1.0,
                           bool accumulate = false);

struct DegreeResidual {
  int degree = 0;
  double boundary_residual = 0.0;  // max over boundary rows
  double interior_residual = 0.0;  // max over interior rows
};

struct OperatorReport {
  int interior_order = 0;
  std::size_t n = 0;
  double sbp_residual = 0.0;          // max |(Q+Q^T) - (E_R-E_L)|
  bool p_positive = false;
  std::vector<DegreeResidual> degrees;  // 0..interior_order
  int boundary_exact_degree = -1;     // highest degree exact at boundary rows
  int interior_exact_degree = -1;     // highest degree exact at interior rows
  bool sbp_pass = false;
  bool accuracy_pass = false;
  bool pass() const { return sbp_pass && accuracy_pass && p_positive; }
};

/// Checks the SBP identity and per-degree polynomial exactness of an operator.
/// Degree k counts as exact where the residual is below tol*(1 + |k x^{k-1}|_max).
OperatorReport operator_verification_report(const SbpOperator1D& op, double tol = 1e-12);

/// Same checks applied to explicit (possibly corrupted) P and Q matrices.
OperatorReport operator_verification_report(const Eigen::VectorXd& p, const Eigen::MatrixXd& q,
                                            int interior_order, double h, double tol = 1e-12);

}  // namespace sbppml
