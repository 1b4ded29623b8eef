#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbppml {

using cplx = std::complex<double>;

class ModalDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Square root with arg(z) in (-pi, pi] and arg(sqrt z) = arg(z)/2.
/// The negative real axis maps to the positive imaginary axis for either sign of zero.
cplx principal_sqrt(cplx z);

/// sqrt(s^2 + (kx / (1 + sigma/s))^2); requires Re s > 0.
cplx kappa_lower(cplx s, double kx, double sigma);

/// (1 + sigma/s) sqrt(s^2 + ky^2); requires Re s > 0.
cplx kappa_left(cplx s, double ky, double sigma);

/// Decomposition sqrt(w^2 + k^2) = beta0 Re w + i eps0 Im w (Re w > 0).
struct BetaEps {
  double beta0 = 1.0;
  double eps0 = 1.0;
};
BetaEps beta_eps(cplx w, double k);

/// Closed form of Re(kappa_lower) in terms of beta0, eps0 of sqrt((s+sigma)^2 + kx^2).
double kappa_lower_real_closed(cplx s, double kx, double sigma);
/// Closed form of Re(kappa_left) in terms of beta0, eps0 of sqrt(s^2 + ky^2).
double kappa_left_real_closed(cplx s, double ky, double sigma);

struct SxIdentities {
  double re_inv_sx = 0.0;         // Re(1/Sx)
  double re_ssx_conj_over_sx = 0.0;  // Re((s Sx)^*/Sx)
  double re_s_conj_over_sx = 0.0;    // Re(s^*/Sx)
  double closed_inv_sx = 0.0;
  double closed_ssx_conj_over_sx = 0.0;
  double closed_s_conj_over_sx = 0.0;
  /// Largest |direct - closed| / max(1, |direct|).
  double residual() const;
  bool all_positive() const;
};

SxIdentities sx_identities(cplx s, double sigma);

/// (sqrt((s+sigma)^2 + kx^2) + gamma (s+sigma)) / (s+sigma).
cplx dispersion_F1(cplx s, double kx, double sigma, double gamma);

/// (sqrt(s^2 + ky^2) + gamma s) / s.
cplx dispersion_F2(cplx s, double ky, double gamma);

/// Rectangular window of the complex s-plane sampled on n_re x n_im points.
struct ComplexParamRegion {
  double re_min = 1e-9;
  double re_max = 3.0;
  double im_min = -20.0;
  double im_max = 20.0;
  std::size_t n_re = 200;
  std::size_t n_im = 200;
  void validate() const;
};

struct ScanOptions {
  double candidate_threshold = 1e-6;  // |F| below this flags a candidate
  double root_tolerance = 1e-10;      // |F| at an accepted Newton root
  std::size_t contour_points = 64;    // per side of the winding contour
  bool require_nonnegative_real = true;
};

struct ScanResult {
  double min_abs = 0.0;
  cplx argmin{};
  std::size_t candidates_examined = 0;
  std::vector<cplx> roots;  // sorted by (re, im)
};

using ComplexFunction = std::function<cplx(cplx)>;

/// Grid scan of |F|, winding-number test on boxes around local minima and
/// small values, then Newton refinement.
ScanResult scan_unstable_roots(const ComplexFunction& f, const ComplexParamRegion& region,
                               const ScanOptions& opts = {});

/// Winding number of f along the boundary of [re0,re1] x [im0,im1].
int winding_number(const ComplexFunction& f, double re0, double re1, double im0, double im1,
                   std::size_t points_per_side = 64);

struct LemmaMonteCarloReport {
  std::size_t samples = 0;
  std::size_t kappa_lower_violations = 0;
  std::size_t kappa_left_violations = 0;
  std::size_t sx_violations = 0;
  double max_kappa_lower_residual = 0.0;
  double max_kappa_left_residual = 0.0;
  double max_sx_residual = 0.0;
  bool pass(double tol = 1e-12) const;
};

/// Random samples with Re s in (0, 5], |Im s| <= 20, |k| <= 10, sigma in [0, 5].
LemmaMonteCarloReport lemma_monte_carlo(std::size_t samples, std::uint64_t seed = 12345);

struct DispersionFamilyRow {
  std::string family;
  double k = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  ComplexParamRegion region;
  ScanResult result;
};

/// Scans F1 over kx in ks, sigma in sigmas, gamma in gammas.
std::vector<DispersionFamilyRow> scan_F1_family(const std::vector<double>& ks,
                                                const std::vector<double>& sigmas,
                                                const std::vector<double>& gammas,
                                                const ComplexParamRegion& region,
                                                const ScanOptions& opts = {});
std::vector<DispersionFamilyRow> scan_F2_family(const std::vector<double>& ks,
                                                const std::vector<double>& gammas,
                                                const ComplexParamRegion& region,
                                                const ScanOptions& opts = {});

/// CSV with one row per window: family,k,sigma,gamma,re_min,re_max,im_min,im_max,
/// n_re,n_im,min_abs,argmin_re,argmin_im,n_roots,roots (semicolon separated re:im).
void write_scan_csv(std::ostream& os, const std::vector<DispersionFamilyRow>& rows);

}  // namespace sbppml
