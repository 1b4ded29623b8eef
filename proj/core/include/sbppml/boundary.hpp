#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbppml/grid.hpp"

namespace sbppml {

/// Boundary data g(coordinate along the wall, t). An empty function means zero.
using WallData = std::function<double(double, double)>;

/// Reflection-coefficient wall conditions. The x walls share r_x, the y walls
/// share r_y. Left/right data are functions of y, bottom/top of x.
struct BoundaryConfig {
  double r_x = 0.0;
  double r_y = 0.0;
  WallData left;
  WallData right;
  WallData bottom;
  WallData top;

  /// Throws std::invalid_argument unless |r_x|, |r_y| <= 1.
  void validate() const;
};

struct PenaltyParams {
  double alpha_x = 1.0;
  double alpha_y = 1.0;
  double theta_x = 1.0;
  double theta_y = 1.0;

  /// alpha = 2/(1+R), theta = 2*theta_bar/(1+R) in each direction.
  static PenaltyParams estimate_matching(const BoundaryConfig& bc, double theta_bar_x = 0.0,
                                         double theta_bar_y = 0.0);
  static PenaltyParams universal() { return {}; }
};

/// Raised for R = -1, where gamma is undefined and the R-form SAT applies.
class PecBoundary : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// gamma = (1-R)/(1+R).
double gamma_from_reflection(double r);

struct PenaltyEigenvalues {
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  double discriminant = 0.0;
  bool complex_pair = false;
  /// Both eigenvalues real and >= -tol.
  bool admissible(double tol = 1e-12) const {
    return !complex_pair && lambda_minus >= -tol && lambda_plus >= -tol;
  }
};

/// Eigenvalues of [[gamma, -+theta_bar*gamma/2], [-+theta_bar*gamma/2, theta_bar]].
PenaltyEigenvalues penalty_matrix_eigenvalues(double gamma, double theta_bar);

enum class PenaltyKind { EstimateMatching, Universal, Unstable };

std::string to_string(PenaltyKind k);

struct PenaltyVerdict {
  PenaltyKind kind = PenaltyKind::Unstable;
  std::optional<double> theta_bar_x;
  std::optional<double> theta_bar_y;
  std::string reason;
};

PenaltyVerdict validate_penalties(const BoundaryConfig& bc, const PenaltyParams& p,
                                  double tol = 1e-12);

/// Boundary-condition residuals minus wall data along each wall.
/// left/right have length ny, bottom/top length nx.
struct WallResiduals {
  std::vector<double> left;
  std::vector<double> right;
  std::vector<double> bottom;
  std::vector<double> top;
};

/// Fills res for electric field e and magnetic fields hy, hx at time t.
void compute_wall_residuals(std::span<const double> e, std::span<const double> hy,
                            std::span<const double> hx, const Grid2D& grid,
                            const BoundaryConfig& bc, double t, WallResiduals& res);

/// Adds the x-wall penalties: Ez gets -alpha_x/P r, Hy gets -+theta_x/P r.
/// Either target may be empty to skip it.
void add_sat_x(const WallResiduals& res, const PenaltyParams& p, std::span<const double> px,
               std::size_t ny, std::span<double> ez_target, std::span<double> hy_target);

/// Adds the y-wall penalties: Ez gets -alpha_y/P r, Hx gets +-theta_y/P r.
/// The Ez part is multiplied by ez_scale and, if given, by column_weight[i].
void add_sat_y(const WallResiduals& res, const PenaltyParams& p, std::span<const double> py,
               std::size_t nx, std::span<double> ez_target, std::span<double> hx_target,
               double ez_scale = 1.0, std::span<const double> column_weight = {});

/// Penalty fields of the three Maxwell equations. ez_x and ez_y are the x-
/// and y-wall parts of the Ez penalty.
struct SatFields {
  StackedField ez_x;
  StackedField ez_y;
  StackedField hy;
  StackedField hx;
  StackedField ez() const;
};

/// Uses the total electric field of the state (ez + aux for split fields).
SatFields sat_contributions(const FieldState& state, const BoundaryConfig& bc,
                            const PenaltyParams& p, double t, const Grid2D& grid,
                            std::span<const double> px, std::span<const double> py);

}  // namespace sbppml
