#pragma once

// Green functions G(z, z0) and logarithmic capacity c(z0) = exp of the
// regular part of G at the pole. Discs are closed-form; the annulus uses the
// image series; sublevel domains shift G and scale c by construction.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "domain.hpp"

namespace suita {

inline double green_value(const DomainSpec& d, Complex z, Complex z0) {
  validate(d);
  if (!contains(d, z) || !contains(d, z0))
    fail_validation("not-in-domain", "green_value needs z and z0 inside the domain");
  if (std::abs(z - z0) < 1e-13 * (1.0 + std::abs(z)))
    fail_numeric("pole-collision", "green_value evaluated too close to its pole");
  return detail::green_on(d, z, z0);
}

struct CapacityValue {
  double value = 0.0;
  double extrapolation_error = 0.0;
  std::vector<double> probe_radii;
  std::string method;  // closed_form | richardson_probes | sublevel_scaling
};

/// Capacity by sampling G - log|z-z0| on shrinking probe circles: 8-angle
/// means (the discrete mean-value property leaves only order-8 aliasing),
/// then two Richardson levels across radius halvings.
inline CapacityValue capacity_via_probes(const DomainSpec& d, Complex z0) {
  double h0 = 1e-2;
  if (auto bd = boundary_distance(d, z0)) h0 = std::min(h0, 0.25 * *bd);
  const int n_angles = 8;
  const double angle0 = 0.1234;  // keep probes off symmetry axes
  for (int shrink = 0;; ++shrink) {
    if (shrink > 20)
      fail_numeric("extrapolation-unstable", "no admissible probe radius around z0");
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k)
      for (int a = 0; a < n_angles && ok; ++a) {
        const double th = angle0 + 2.0 * pi * a / n_angles;
        const Complex p = z0 + h0 * std::pow(0.5, k) * Complex{std::cos(th), std::sin(th)};
        ok = contains(d, p);
      }
    if (ok) break;
    h0 *= 0.5;
  }
  double u[3];
  CapacityValue out;
  for (int k = 0; k < 3; ++k) {
    const double delta = h0 * std::pow(0.5, k);
    out.probe_radii.push_back(delta);
    double mean = 0.0;
    for (int a = 0; a < n_angles; ++a) {
      const double th = angle0 + 2.0 * pi * a / n_angles;
      mean += detail::green_on(d, z0 + delta * Complex{std::cos(th), std::sin(th)}, z0);
    }
    u[k] = mean / n_angles - std::log(delta);
  }
  const double r1a = (4.0 * u[1] - u[0]) / 3.0;
  const double r1b = (4.0 * u[2] - u[1]) / 3.0;
  const double r2 = (16.0 * r1b - r1a) / 15.0;
  out.value = std::exp(r2);
  out.extrapolation_error = out.value * std::abs(r2 - r1b);
  out.method = "richardson_probes";
  if (std::abs(r2 - r1b) > 1e-4)
    fail_numeric("extrapolation-unstable", "Richardson levels disagree");
  return out;
}

inline CapacityValue log_capacity(const DomainSpec& d, Complex z0) {
  validate(d);
  if (!contains(d, z0)) fail_validation("not-in-domain", "log_capacity needs z0 in the domain");
  if (d.is<Punctured>()) return log_capacity(*d.as<Punctured>().base, z0);
  if (d.is<Sublevel>()) {
    const auto& s = d.as<Sublevel>();
    if (z0 == s.pole) {
      CapacityValue base = log_capacity(*s.base, z0);
      base.value *= std::exp(-s.level);
      base.extrapolation_error *= std::exp(-s.level);
      base.method = "sublevel_scaling";
      return base;
    }
    // away from the defining pole the domain is only usable if it is a disc
    if (auto e = equivalent_disc(d)) {
      CapacityValue out;
      out.value = e->radius / (sq(e->radius) - std::norm(z0 - e->center));
      out.method = "closed_form";
      return out;
    }
    fail_numeric("green-eval-failed", "sublevel capacity known only at its defining pole");
  }
  if (auto e = equivalent_disc(d)) {
    CapacityValue out;
    out.value = e->radius / (sq(e->radius) - std::norm(z0 - e->center));
    out.method = "closed_form";
    return out;
  }
  return capacity_via_probes(d, z0);  // annulus
}

struct GreenValidation {
  double boundary_residual = 0.0;
  double harmonicity_residual = 0.0;
  double symmetry_residual = 0.0;
  bool pass = false;
};

/// Contract check for the Green evaluators: boundary vanishing (64 samples
/// per boundary circle), interior harmonicity (raw 5-point defect at step
/// h = 1e-3, sampled away from the pole), and symmetry G(z,w) = G(w,z).
inline GreenValidation validate_green(const DomainSpec& d, Complex z0, double tol) {
  validate(d);
  if (!(d.is<UnitDisc>() || d.is<Disc>() || d.is<Annulus>()))
    fail_validation("invalid-domain", "validate_green supports disc and annulus domains");
  if (!contains(d, z0)) fail_validation("not-in-domain", "pole must lie in the domain");
  GreenValidation rep;

  std::vector<std::pair<Complex, double>> circles;  // (center, radius)
  if (d.is<Annulus>()) {
    circles = {{0.0, 1.0}, {0.0, d.as<Annulus>().q}};
  } else {
    const Disc e = d.is<Disc>() ? d.as<Disc>() : Disc{0.0, 1.0};
    circles = {{e.center, e.radius}};
  }
  for (const auto& [c, r] : circles)
    for (int j = 0; j < 64; ++j) {
      const double th = 2.0 * pi * (j + 0.37) / 64.0;
      const Complex z = c + r * Complex{std::cos(th), std::sin(th)};
      rep.boundary_residual =
          std::max(rep.boundary_residual, std::abs(detail::green_on(d, z, z0)));
    }

  // sampling geometry scales with the domain so thin annuli keep samples
  const double S = d.is<Annulus>() ? 1.0 - d.as<Annulus>().q
                                   : (d.is<Disc>() ? d.as<Disc>().radius : 1.0);
  const double h = 1e-3 * S;
  auto usable = [&](Complex z) {
    if (std::abs(z - z0) < 0.15 * S) return false;
    auto bd = boundary_distance(d, z);
    return bd && *bd > 8.0 * h && contains(d, z);
  };
  int used = 0;
  for (double ring_frac : {0.16, 0.22, 0.30, 0.45}) {
    const double ring = ring_frac * S;
    for (int a = 0; a < 16; ++a) {
      const double th = 2.0 * pi * (a + 0.21) / 16.0;
      const Complex z = z0 + ring * Complex{std::cos(th), std::sin(th)};
      if (!usable(z)) continue;
      const double defect = detail::green_on(d, z + h, z0) + detail::green_on(d, z - h, z0) +
                            detail::green_on(d, z + Complex{0.0, h}, z0) +
                            detail::green_on(d, z - Complex{0.0, h}, z0) -
                            4.0 * detail::green_on(d, z, z0);
      rep.harmonicity_residual = std::max(rep.harmonicity_residual, std::abs(defect));
      ++used;
    }
  }
  if (used == 0)
    fail_numeric("green-eval-failed", "no interior sample admissible for harmonicity check");

  std::vector<Complex> pts = {z0};
  for (double ring_frac : {0.17, 0.33})
    for (int a = 0; a < 3; ++a) {
      const double th = 2.0 * pi * (a + 0.11) / 3.0;
      const Complex z = z0 + ring_frac * S * Complex{std::cos(th), std::sin(th)};
      if (contains(d, z)) pts.push_back(z);
    }
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      if (std::abs(pts[i] - pts[j]) < 1e-6) continue;
      rep.symmetry_residual =
          std::max(rep.symmetry_residual, std::abs(detail::green_on(d, pts[i], pts[j]) -
                                                   detail::green_on(d, pts[j], pts[i])));
    }

  rep.pass = rep.boundary_residual <= tol && rep.harmonicity_residual <= tol &&
             rep.symmetry_residual <= tol;
  return rep;
}

}  // namespace suita
