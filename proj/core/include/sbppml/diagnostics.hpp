#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbppml/pml.hpp"

namespace sbppml {

/// P-weighted l2 norms of the state components. For split fields ez is the
/// norm of the total field Ez^(x)+Ez^(y) and aux the norm of Ez^(y).
struct NormRecord {
  double ez = 0.0;
  double hy = 0.0;
  double hx = 0.0;
  double aux = 0.0;
};

NormRecord discrete_l2_norms(const FieldState& state, std::span<const double> px,
                             std::span<const double> py);

/// Modal-layer energy for R = 0, alpha = 2 walls: the five squared norms,
/// the sigma*theta boundary term and the accumulated boundary integral.
double modal_energy(const FieldState& state, const StackedField& rhs_ez, const Discretization& d,
                    double theta, double boundary_integral);

/// Integrand of the modal boundary integral, 2 dEz^T B dEz.
double modal_boundary_integrand(const StackedField& rhs_ez, const Discretization& d);

/// Physically-motivated energy: four squared norms plus the boundary integral.
double phys_energy(const FieldState& state, std::span<const double> px,
                   std::span<const double> py, double boundary_integral);

/// BT_s = -2 <u, L0 u>_P with L0 the undamped scheme with zero wall data.
double phys_boundary_integrand(const FieldState& state, const Discretization& d);

/// Tracks a model's energy through an RK4 run, accumulating boundary
/// integrals stage by stage with the RK4 weights.
class EnergyMonitor {
 public:
  EnergyMonitor(const ModelSpec& spec, const Discretization& d);

  /// Stage hook matching rk4_step's observer signature; dt must be set first.
  void observe(int stage, double t, const FieldState& u, const FieldState& k);
  void set_step(double dt) { dt_ = dt; }

  double energy(const FieldState& state, double t) const;
  double boundary_integral() const { return integral_; }

 private:
  ModelSpec spec_;
  const Discretization* d_;
  Discretization homogeneous_;
  double theta_ = 0.0;
  double dt_ = 0.0;
  double integral_ = 0.0;
};

struct EnergyHistory {
  std::vector<double> times;
  std::vector<NormRecord> norms;
  std::vector<double> energies;

  void append(double t, const NormRecord& n, double energy);
  std::size_t size() const { return times.size(); }
  /// Header t,ez_norm,hy_norm,hx_norm,aux_norm,energy; 17 significant digits.
  void write_csv(std::ostream& os) const;
  /// Throws unless times strictly increase and lengths agree.
  void validate() const;
};

struct GrowthVerdict {
  bool pass = true;
  double worst_ratio = 0.0;  // max sqrt(E_{k+1}) / (e^{sigma dt} sqrt(E_k))
  std::optional<std::size_t> first_violation;
};

/// Checks sqrt(E_{k+1}) <= e^{sigma_inf dt_k} sqrt(E_k) + slack at every sample,
/// slack = tol * (1 + max sqrt(E)). tol < 0 selects the default 1e-10.
GrowthVerdict growth_bound_check(std::span<const double> times, std::span<const double> energies,
                                 double sigma_inf, double tol = -1.0);
GrowthVerdict growth_bound_check(const EnergyHistory& hist, double sigma_inf, double tol = -1.0);

/// Dense matrix of the homogeneous semi-discrete operator, assembled column
/// by column from evaluate_rhs on unit states. Wall data is ignored.
Eigen::MatrixXd assemble_semidiscrete_matrix(const ModelSpec& spec, const Discretization& d,
                                             std::size_t max_unknowns = 5000);

struct SpectrumSummary {
  double max_real = 0.0;
  double spectral_radius = 0.0;
  Eigen::VectorXcd eigenvalues;
};

SpectrumSummary spectrum_summary(const Eigen::MatrixXd& a);

}  // namespace sbppml
