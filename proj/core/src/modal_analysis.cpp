#include "sbppml/modal_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace sbppml {

namespace {

void require_right_half_plane(cplx s) {
  if (!(s.real() > 0.0)) throw ModalDomainError("Re s must be positive");
}

}  // namespace

cplx principal_sqrt(cplx z) {
  if (z.imag() == 0.0 && z.real() < 0.0) return {0.0, std::sqrt(-z.real())};
  return std::sqrt(z);
}

cplx kappa_lower(cplx s, double kx, double sigma) {
  require_right_half_plane(s);
  const cplx q = kx / (1.0 + sigma / s);
  return principal_sqrt(s * s + q * q);
}

cplx kappa_left(cplx s, double ky, double sigma) {
  require_right_half_plane(s);
  return (1.0 + sigma / s) * principal_sqrt(s * s + ky * ky);
}

BetaEps beta_eps(cplx w, double k) {
  const cplx kappa = principal_sqrt(w * w + k * k);
  BetaEps be;
  be.beta0 = kappa.real() / w.real();
  be.eps0 = 1.0 / be.beta0;  // Re(kappa) Im(kappa) = Re(w) Im(w)
  return be;
}

double kappa_lower_real_closed(cplx s, double kx, double sigma) {
  const double a = s.real();
  const double b = s.imag();
  const BetaEps be = beta_eps(s + sigma, kx);
  return be.beta0 * a + sigma * (be.beta0 - be.eps0) * b * b / ((a + sigma) * (a + sigma) + b * b);
}

double kappa_left_real_closed(cplx s, double ky, double sigma) {
  const double a = s.real();
  const double b = s.imag();
  const double m = a * a + b * b;
  const BetaEps be = beta_eps(s, ky);
  return be.beta0 * a * (1.0 + sigma * a / m) + be.eps0 * sigma * b * b / m;
}

double SxIdentities::residual() const {
  auto rel = [](double d, double c) { return std::abs(d - c) / std::max(1.0, std::abs(d)); };
  return std::max({rel(re_inv_sx, closed_inv_sx), rel(re_ssx_conj_over_sx, closed_ssx_conj_over_sx),
                   rel(re_s_conj_over_sx, closed_s_conj_over_sx)});
}

bool SxIdentities::all_positive() const {
  return re_inv_sx > 0.0 && re_ssx_conj_over_sx > 0.0 && re_s_conj_over_sx > 0.0;
}

SxIdentities sx_identities(cplx s, double sigma) {
  require_right_half_plane(s);
  if (!(sigma >= 0.0)) throw ModalDomainError("sigma must be non-negative");
  const cplx sx = 1.0 + sigma / s;
  SxIdentities r;
  r.re_inv_sx = (1.0 / sx).real();
  r.re_ssx_conj_over_sx = (std::conj(s * sx) / sx).real();
  r.re_s_conj_over_sx = (std::conj(s) / sx).real();
  const double a = s.real();
  const double b = s.imag();
  const double c = a * (a + sigma) + b * b;
  const double a0 = (a * a + b * b) / (c * c + sigma * sigma * b * b);
  r.closed_inv_sx = a0 * c;
  r.closed_ssx_conj_over_sx = a0 * ((a + sigma) * c + sigma * b * b);
  r.closed_s_conj_over_sx = a0 * (a * c + sigma * b * b);
  return r;
}

cplx dispersion_F1(cplx s, double kx, double sigma, double gamma) {
  const cplx w = s + sigma;
  if (w == 0.0) throw ModalDomainError("F1 has a pole at s = -sigma");
  return (principal_sqrt(w * w + kx * kx) + gamma * w) / w;
}

cplx dispersion_F2(cplx s, double ky, double gamma) {
  if (s == 0.0) throw ModalDomainError("F2 has a pole at s = 0");
  return (principal_sqrt(s * s + ky * ky) + gamma * s) / s;
}

void ComplexParamRegion::validate() const {
  if (!(re_max > re_min) || !(im_max > im_min) || n_re < 3 || n_im < 3) {
    throw std::invalid_argument("scan region must be a non-empty window with at least 3x3 samples");
  }
  if (re_min < 0.0) throw std::invalid_argument("scan region must lie in Re s >= 0");
}

int winding_number(const ComplexFunction& f, double re0, double re1, double im0, double im1,
                   std::size_t points_per_side) {
  const cplx corners[5] = {{re0, im0}, {re1, im0}, {re1, im1}, {re0, im1}, {re0, im0}};
  double total = 0.0;
  cplx prev = f(corners[0]);
  for (int side = 0; side < 4; ++side) {
    const cplx a = corners[side];
    const cplx b = corners[side + 1];
    // adaptive refinement keeps each phase increment well below pi
    double pos = 0.0;
    const double base = 1.0 / static_cast<double>(points_per_side);
    while (pos < 1.0) {
      double step = std::min(base, 1.0 - pos);
      for (int depth = 0; depth < 40; ++depth) {
        const cplx v = f(a + (pos + step) * (b - a));
        const double d = std::arg(v / prev);
        if (std::abs(d) < std::numbers::pi / 4 || depth == 39) {
          total += d;
          prev = v;
          pos += step;
          break;
        }
        step /= 2;
      }
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

namespace {

bool newton_refine(const ComplexFunction& f, cplx& s, double tol) {
  for (int it = 0; it < 60; ++it) {
    const cplx fs = f(s);
    if (!std::isfinite(fs.real()) || !std::isfinite(fs.imag())) return false;
    if (std::abs(fs) <= tol) return true;
    const double h = 1e-7 * (1.0 + std::abs(s));
    const cplx df = (f(s + h) - f(s - h)) / (2.0 * h);
    if (df == 0.0) return false;
    const cplx ds = fs / df;
    s -= ds;
    if (std::abs(ds) < 1e-14 * (1.0 + std::abs(s))) return std::abs(f(s)) <= tol;
  }
  return std::abs(f(s)) <= tol;
}

}  // namespace

ScanResult scan_unstable_roots(const ComplexFunction& f, const ComplexParamRegion& region,
                               const ScanOptions& opts) {
  region.validate();
  const std::size_t nr = region.n_re;
  const std::size_t ni = region.n_im;
  const double dre = (region.re_max - region.re_min) / static_cast<double>(nr - 1);
  const double dim = (region.im_max - region.im_min) / static_cast<double>(ni - 1);
  auto point = [&](std::size_t i, std::size_t j) {
    return cplx(region.re_min + static_cast<double>(i) * dre,
                region.im_min + static_cast<double>(j) * dim);
  };
  std::vector<double> mag(nr * ni);
  ScanResult res;
  res.min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < ni; ++j) {
      const cplx s = point(i, j);
      const double m = std::abs(f(s));
      mag[i * ni + j] = std::isfinite(m) ? m : std::numeric_limits<double>::infinity();
      if (mag[i * ni + j] < res.min_abs) {
        res.min_abs = mag[i * ni + j];
        res.argmin = s;
      }
    }
  }

  std::vector<cplx> found;
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < ni; ++j) {
      const double m = mag[i * ni + j];
      bool local_min = true;
      bool strictly_above = false;
      for (int di = -1; di <= 1 && local_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(nr) ||
              jj >= static_cast<std::ptrdiff_t>(ni)) {
            continue;
          }
          const double nb = mag[static_cast<std::size_t>(ii) * ni + static_cast<std::size_t>(jj)];
          if (nb < m) {
            local_min = false;
            break;
          }
          if (nb > m) strictly_above = true;
        }
      }
      const bool small = m < opts.candidate_threshold;
      if (!(local_min && strictly_above) && !small) continue;
      ++res.candidates_examined;

      const double re0 = std::max(region.re_min, point(i, j).real() - dre);
      const double re1 = std::min(region.re_max, point(i, j).real() + dre);
      const double im0 = std::max(region.im_min, point(i, j).imag() - dim);
      const double im1 = std::min(region.im_max, point(i, j).imag() + dim);
      const int wind = winding_number(f, re0, re1, im0, im1, opts.contour_points);
      if (wind == 0 && !small) continue;

      cplx s = point(i, j);
      if (!newton_refine(f, s, opts.root_tolerance)) continue;
      const double slack = 1e-9 * (1.0 + std::abs(s));
      if (s.real() < region.re_min - slack || s.real() > region.re_max + slack ||
          s.imag() < region.im_min - slack || s.imag() > region.im_max + slack) {
        continue;
      }
      if (opts.require_nonnegative_real && s.real() < 0.0) continue;
      found.push_back(s);
    }
  }

  std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const cplx& s : found) {
    const bool dup = std::any_of(res.roots.begin(), res.roots.end(), [&](cplx r) {
      return std::abs(r - s) <= 1e-6 * (1.0 + std::abs(s));
    });
    if (!dup) res.roots.push_back(s);
  }
  return res;
}

bool LemmaMonteCarloReport::pass(double tol) const {
  return kappa_lower_violations == 0 && kappa_left_violations == 0 && sx_violations == 0 &&
         max_kappa_lower_residual <= tol && max_kappa_left_residual <= tol &&
         max_sx_residual <= tol;
}

LemmaMonteCarloReport lemma_monte_carlo(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LemmaMonteCarloReport rep;
  rep.samples = samples;
  auto rel = [](double d, double c) { return std::abs(d - c) / std::max(1.0, std::abs(d)); };
  for (std::size_t n = 0; n < samples; ++n) {
    const double a = 5.0 * (1.0 - unit(rng));
    const double b = -20.0 + 40.0 * unit(rng);
    const double k = -10.0 + 20.0 * unit(rng);
    const double sigma = 5.0 * unit(rng);
    const cplx s(a, b);

    const double kl = kappa_lower(s, k, sigma).real();
    const BetaEps be1 = beta_eps(s + sigma, k);
    if (!(kl > 0.0) || be1.beta0 < 1.0 - 1e-12 || be1.eps0 > 1.0 + 1e-12) {
      ++rep.kappa_lower_violations;
    }
    rep.max_kappa_lower_residual =
        std::max(rep.max_kappa_lower_residual, rel(kl, kappa_lower_real_closed(s, k, sigma)));

    const double kr = kappa_left(s, k, sigma).real();
    if (!(kr > 0.0)) ++rep.kappa_left_violations;
    rep.max_kappa_left_residual =
        std::max(rep.max_kappa_left_residual, rel(kr, kappa_left_real_closed(s, k, sigma)));

    const SxIdentities sx = sx_identities(s, sigma);
    if (!sx.all_positive()) ++rep.sx_violations;
    rep.max_sx_residual = std::max(rep.max_sx_residual, sx.residual());
  }
  return rep;
}

std::vector<DispersionFamilyRow> scan_F1_family(const std::vector<double>& ks,
                                                const std::vector<double>& sigmas,
                                                const std::vector<double>& gammas,
                                                const ComplexParamRegion& region,
                                                const ScanOptions& opts) {
  std::vector<DispersionFamilyRow> rows;
  for (double sigma : sigmas) {
    for (double gamma : gammas) {
      for (double k : ks) {
        DispersionFamilyRow row{"F1", k, sigma, gamma, region, {}};
        row.result = scan_unstable_roots(
            [=](cplx s) { return dispersion_F1(s, k, sigma, gamma); }, region, opts);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<DispersionFamilyRow> scan_F2_family(const std::vector<double>& ks,
                                                const std::vector<double>& gammas,
                                                const ComplexParamRegion& region,
                                                const ScanOptions& opts) {
  std::vector<DispersionFamilyRow> rows;
  for (double gamma : gammas) {
    for (double k : ks) {
      DispersionFamilyRow row{"F2", k, 0.0, gamma, region, {}};
      row.result =
          scan_unstable_roots([=](cplx s) { return dispersion_F2(s, k, gamma); }, region, opts);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<DispersionFamilyRow>& rows) {
  os << "family,k,sigma,gamma,re_min,re_max,im_min,im_max,n_re,n_im,min_abs,argmin_re,argmin_im,"
        "n_roots,roots\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu,%.17g,%.17g,%.17g,%zu,",
                  r.family.c_str(), r.k, r.sigma, r.gamma, r.region.re_min, r.region.re_max,
                  r.region.im_min, r.region.im_max, r.region.n_re, r.region.n_im, r.result.min_abs,
                  r.result.argmin.real(), r.result.argmin.imag(), r.result.roots.size());
    os << buf;
    for (std::size_t k = 0; k < r.result.roots.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.17g:%.17g", k ? ";" : "", r.result.roots[k].real(),
                    r.result.roots[k].imag());
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace sbppml
