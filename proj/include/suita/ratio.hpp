#pragma once

// The ratio pi*K/c^2 (>= 1, with equality exactly on discs), the curvature
// identity dd~ log c = pi*K checked by finite differences, the disc-case
// analytic capacity as a Moebius derivative, and the kernel-volume bound
// K(z0)*Vol >= 1.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "core.hpp"
#include "domain.hpp"
#include "green.hpp"
#include "quadrature.hpp"

namespace suita {

struct SuitaRecord {
  Complex z0{};
  double K = 0.0;
  double c = 0.0;
  double ratio = 0.0;      // pi*K/c^2
  double curvature = 0.0;  // Gaussian curvature of c^2|dz|^2, = -4*ratio
  std::string method_K;
  std::string method_c;
};

inline SuitaRecord suita_ratio(const DomainSpec& d, Complex z0, const KernelOptions& opt = {}) {
  const KernelEstimate k = kernel_diag(d, z0, opt);
  const CapacityValue c = log_capacity(d, z0);
  SuitaRecord rec;
  rec.z0 = z0;
  rec.K = k.value.real();
  rec.c = c.value;
  rec.ratio = pi * rec.K / sq(rec.c);
  rec.curvature = -4.0 * rec.ratio;
  rec.method_K = k.method;
  rec.method_c = c.method;
  return rec;
}

namespace detail {

// 5-point Laplacian of log c at step h. The capacity route is whatever
// log_capacity picks for the domain, so the stencil cost is five of those.
inline double capacity_log_laplacian(const DomainSpec& d, Complex z, double h) {
  auto f = [&](Complex w) { return std::log(log_capacity(d, w).value); };
  return (f(z + h) + f(z - h) + f(z + Complex{0.0, h}) + f(z - Complex{0.0, h}) - 4.0 * f(z)) /
         sq(h);
}

inline void require_stencil(const DomainSpec& d, Complex z, double h) {
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      if (!contains(d, z + h * Complex{double(i), double(j)}))
        fail_validation("stencil-outside", "finite-difference stencil leaves the domain");
}

}  // namespace detail

/// |lap(log c)/4 - pi*K| / (pi*K) with a 5-point Laplacian at step h. The
/// full 9-point square of half-width h must lie inside the domain, corners
/// included; stricter than the axis stencil actually read, by design.
inline double curvature_residual(const DomainSpec& d, Complex z, double h) {
  validate(d);
  if (!(h > 0.0)) fail_validation("invalid-step", "stencil width must be positive");
  detail::require_stencil(d, z, h);
  const double pk = pi * kernel_diag(d, z).value.real();
  return std::abs(detail::capacity_log_laplacian(d, z, h) / 4.0 - pk) / pk;
}

inline double default_fd_step(const DomainSpec& d) {
  // closed-form capacity routes tolerate small stencils; series routes get a
  // wider one so probe noise is not amplified by the 1/h^2
  return equivalent_disc(flatten_punctures(d).clean) ? 1e-3 : 1e-2;
}

struct CurvatureCheck {
  double residual = 0.0;        // at step h/2
  double error_estimate = 0.0;  // Richardson gap between the h and h/2 Laplacians
  double step = 0.0;
};

inline CurvatureCheck curvature_check(const DomainSpec& d, Complex z, double h = 0.0) {
  validate(d);
  if (h == 0.0) h = default_fd_step(d);
  if (!(h > 0.0)) fail_validation("invalid-step", "stencil width must be positive");
  detail::require_stencil(d, z, h);
  const double pk = pi * kernel_diag(d, z).value.real();
  const double lap1 = detail::capacity_log_laplacian(d, z, h);
  const double lap2 = detail::capacity_log_laplacian(d, z, 0.5 * h);
  CurvatureCheck out;
  out.residual = std::abs(lap2 / 4.0 - pk) / pk;
  out.error_estimate = std::abs(lap2 - lap1) / (3.0 * 4.0 * pk);
  out.step = 0.5 * h;
  return out;
}

/// Derivative at z0 of the normalized Moebius map m(w) = R(w - z0)/(R^2 -
/// conj(z0) w) of the disc |w| < R, which is its Ahlfors function, so the
/// value is the analytic capacity. Computed as the literal quotient rule;
/// agreement with log_capacity on discs is a checked property downstream,
/// not folded in here.
inline double analytic_capacity_disc(double R, Complex z0) {
  if (!(R > 0.0) || !(std::abs(z0) < R))
    fail_validation("not-in-disc", "analytic capacity needs |z0| < R");
  const Complex num = R * (z0 - z0);             // numerator at w = z0
  const Complex num_d = Complex{R, 0.0};         // d/dw of R(w - z0)
  const Complex den = sq(R) - std::conj(z0) * z0;
  const Complex den_d = -std::conj(z0);
  const Complex deriv = (num_d * den - num * den_d) / sq_c(den);
  return deriv.real();  // the normalization makes m'(z0) real positive
}

struct VolumeReport {
  double kernel = 0.0;
  double volume = 0.0;   // sum of quadrature weights
  double product = 0.0;  // K(z0) * Vol, >= 1
  double tol = 0.0;
  bool pass = false;
  bool equality_case = false;  // domain is a disc centered at z0
};

inline VolumeReport volume_bound_check(const DomainSpec& d, Complex z0,
                                       const QuadratureGrid& grid, double tol = 1e-3,
                                       const KernelOptions& opt = {}) {
  validate(d);
  if (!contains(d, z0)) fail_validation("not-in-domain", "volume bound needs z0 in the domain");
  VolumeReport rep;
  rep.kernel = kernel_diag(d, z0, opt).value.real();
  rep.volume = weight_sum(grid);
  rep.product = rep.kernel * rep.volume;
  rep.tol = tol;
  rep.pass = rep.product >= 1.0 - tol;
  if (auto e = equivalent_disc(flatten_punctures(d).clean))
    rep.equality_case = std::abs(e->center - z0) <= 1e-9 * std::max(1.0, e->radius);
  return rep;
}

/// Elementwise suita_ratio over the points, output in input order. Failures
/// are collected per point and the first one (in input order) is rethrown,
/// so the error surfaced is independent of the thread budget.
inline std::vector<SuitaRecord> suita_scan(const DomainSpec& d, const std::vector<Complex>& points,
                                           const KernelOptions& opt = {}) {
  validate(d);
  std::vector<SuitaRecord> out(points.size());
  std::vector<std::optional<Error>> failed(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      out[i] = suita_ratio(d, points[i], opt);
    } catch (const Error& e) {
      failed[i] = e;
    }
  });
  for (const auto& e : failed)
    if (e) throw *e;
  return out;
}

}  // namespace suita
