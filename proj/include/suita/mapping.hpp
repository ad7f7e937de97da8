#pragma once

// Riemann maps of simply connected sublevel domains, reconstructed by path
// integration of the kernel 1-form df0 = e^s sqrt(pi) K_s(t,z0) /
// sqrt(K_s(z0)) dz. The map sends z0 to 0 with real positive derivative and
// the sublevel onto the disc of radius e^s; its modulus recovers exp(G) and
// on discs df0 equals the global extremal form restricted to the sublevel.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "core.hpp"
#include "domain.hpp"
#include "green.hpp"
#include "variation.hpp"

namespace suita {

/// Moebius uniformizer m(z) = R(z - z0)/(R^2 - conj(z0) z) of the disc
/// |z| < R: m(z0) = 0, m'(z0) = R/(R^2 - |z0|^2) > 0, and log|m| is the
/// Green function of the disc at z0.
struct DiscUniformizer {
  double R = 1.0;
  Complex z0{};

  Complex operator()(Complex z) const { return R * (z - z0) / (sq(R) - std::conj(z0) * z); }
  double derivative_at_pole() const { return R / (sq(R) - std::norm(z0)); }
};

inline DiscUniformizer local_uniformizer_disc(double R, Complex z0) {
  if (!(R > 0.0) || !(std::abs(z0) < R))
    fail_validation("not-in-disc", "uniformizer needs |z0| < R");
  return {R, z0};
}

struct MapSample {
  Complex t{};
  Complex f0{};
};

struct SampledMap {
  Complex pole{};
  double radius = 0.0;  // e^s, the image disc radius
  std::vector<MapSample> samples;
  double derivative_at_pole = 0.0;
};

namespace detail {

// df0 coefficient at a point of the sublevel; closed-form kernel route only
inline Complex df0_coefficient(const DomainSpec& sub, Complex z0, double r, Complex t) {
  const Complex ks = kernel_offdiag(sub, t, z0).value;
  const double k0 = kernel_diag(sub, z0).value.real();
  return r * std::sqrt(pi) * ks / std::sqrt(k0);
}

/// Straight-segment integral of the df0 coefficient from a to b: composite
/// trapezoid under Richardson doubling until the extrapolant settles. Every
/// node is required to stay inside the sublevel.
inline Complex df0_segment(const DomainSpec& sub, Complex z0, double r, Complex a, Complex b,
                           double tol) {
  if (a == b) return {};
  auto coef = [&](Complex p) {
    if (!contains(sub, p))
      fail_validation("path-exits-domain", "integration path leaves the sublevel");
    return df0_coefficient(sub, z0, r, p);
  };
  const Complex dz = b - a;
  Complex ends = 0.5 * (coef(a) + coef(b));
  std::size_t n = 8;
  Complex interior{};
  for (std::size_t i = 1; i < n; ++i) interior += coef(a + dz * (double(i) / n));
  Complex trap = (ends + interior) * (dz / double(n));
  std::optional<Complex> prev_extrap;
  while (n <= (std::size_t(1) << 15)) {
    // refine by the new midpoints only, then one Richardson level
    Complex fresh{};
    for (std::size_t i = 0; i < n; ++i) fresh += coef(a + dz * ((i + 0.5) / n));
    const Complex trap2 = 0.5 * trap + fresh * (dz / double(2 * n));
    const Complex extrap = (4.0 * trap2 - trap) / 3.0;
    if (prev_extrap && std::abs(extrap - *prev_extrap) <= tol * std::max(1.0, std::abs(extrap)))
      return extrap;
    prev_extrap = extrap;
    trap = trap2;
    n *= 2;
  }
  fail_numeric("extrapolation-unstable", "path integral did not settle");
}

}  // namespace detail

inline SampledMap riemann_map_from_kernel(const DomainSpec& base, Complex z0, double s,
                                          const std::vector<Complex>& sample_points,
                                          double tol = 1e-10) {
  const DomainSpec sub = sublevel_domain(base, z0, s);
  if (is_doubly_connected(sub))
    fail_validation("not-simply-connected", "the sublevel at this level is an annulus");
  if (detail::kernel_route(sub, false) != detail::KernelRoute::closed)
    fail_validation("invalid-domain",
                    "map reconstruction needs a closed-form kernel route on the sublevel");
  const double r = std::exp(s);

  SampledMap map;
  map.pole = z0;
  map.radius = r;
  map.derivative_at_pole = r * std::sqrt(pi * kernel_diag(sub, z0).value.real());
  map.samples.resize(sample_points.size());

  std::vector<std::optional<Error>> failed(sample_points.size());
  parallel_for(sample_points.size(), [&](std::size_t i) {
    map.samples[i].t = sample_points[i];
    try {
      map.samples[i].f0 = detail::df0_segment(sub, z0, r, z0, sample_points[i], tol);
    } catch (const Error& e) {
      failed[i] = e;
    }
  });
  for (const auto& e : failed)
    if (e) throw *e;
  return map;
}

struct MapReport {
  double green_residual = 0.0;      // max | log|f0(t)| - G_base(t, z0) |
  double pole_gap = 0.0;            // |f0| at the pole sample, 0 by construction
  bool derivative_positive = false; // stored derivative and sampled phase agree with f0' > 0
  double corollary_residual = 0.0;  // df0 coefficient vs the base extremal form
  double tol = 0.0;
  bool pass = false;
};

/// Validates a sampled map against the base domain's Green function and the
/// restriction identity between df0 and the global form sqrt(pi) K(t,z0) /
/// sqrt(K(z0)). The derivative sign is re-estimated from the sample nearest
/// the pole, so a tampered (rotated) map fails even with a plausible stored
/// derivative.
inline MapReport map_validation(const SampledMap& map, const DomainSpec& base, Complex z0,
                                double s, double tol = 1e-5) {
  const DomainSpec sub = sublevel_domain(base, z0, s);
  const double k0 = kernel_diag(base, z0).value.real();
  const double r = std::exp(s);

  MapReport rep;
  rep.tol = tol;
  rep.derivative_positive = map.derivative_at_pole > 0.0;
  const MapSample* nearest = nullptr;
  for (const auto& smp : map.samples) {
    const double dist = std::abs(smp.t - z0);
    if (dist < 1e-12) {
      rep.pole_gap = std::max(rep.pole_gap, std::abs(smp.f0));
      continue;
    }
    rep.green_residual = std::max(
        rep.green_residual, std::abs(std::log(std::abs(smp.f0)) - green_value(base, smp.t, z0)));
    const Complex form = std::sqrt(pi) * kernel_offdiag(base, smp.t, z0).value / std::sqrt(k0);
    const Complex df0 = detail::df0_coefficient(sub, z0, r, smp.t);
    rep.corollary_residual =
        std::max(rep.corollary_residual, std::abs(df0 - form) / std::abs(form));
    if (!nearest || dist < std::abs(nearest->t - z0)) nearest = &smp;
  }
  if (nearest) {
    const Complex slope = nearest->f0 / (nearest->t - z0);
    if (!(slope.real() > 0.0) || std::abs(std::arg(slope)) > pi / 8.0)
      rep.derivative_positive = false;
  }
  rep.pass = rep.derivative_positive && rep.green_residual <= tol && rep.pole_gap <= tol &&
             rep.corollary_residual <= tol;
  return rep;
}

}  // namespace suita
