#pragma once

// Deterministic area-quadrature grids: tensor polar/annular midpoint rules
// with per-ring angular counts matched to the radial pitch, exact cell areas,
// and seeded angular offsets. Sublevel sets of discs are themselves round
// discs, so they get native polar grids; annulus sublevels fall back to
// membership rejection on the base grid, punctures drop excised nodes.

#include <cmath>
#include <cstdint>
#include <vector>

#include "core.hpp"
#include "domain.hpp"

namespace suita {

struct QuadratureGrid {
  std::vector<Complex> nodes;
  std::vector<double> weights;
  double cell_scale = 0.0;  // max node spacing (radial and angular pitch)
  int resolution = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void polar_rings(QuadratureGrid& g, Complex center, double r_lo, double r_hi, int n,
                        std::uint64_t seed) {
  const double dr = (r_hi - r_lo) / n;
  for (int i = 0; i < n; ++i) {
    const double r = r_lo + (i + 0.5) * dr;
    const int ntheta = std::max<long>(8, std::lround(2.0 * pi * r / dr));
    const double step = 2.0 * pi / ntheta;
    const double offset = seeded_unit(seed, std::uint64_t(i)) * step;
    const double w = r * dr * step;  // ring area 2*pi*r*dr split evenly
    for (int j = 0; j < ntheta; ++j) {
      const double th = offset + (j + 0.5) * step;
      g.nodes.push_back(center + Complex{r * std::cos(th), r * std::sin(th)});
      g.weights.push_back(w);
    }
    g.cell_scale = std::max({g.cell_scale, dr, r * step});
  }
}

}  // namespace detail

inline QuadratureGrid build_quadrature(const DomainSpec& d, int resolution, std::uint64_t seed) {
  validate(d);
  if (resolution < 16) fail_validation("invalid-resolution", "resolution must be >= 16");
  QuadratureGrid g;
  g.resolution = resolution;
  g.seed = seed;
  if (auto e = equivalent_disc(d)) {
    detail::polar_rings(g, e->center, 0.0, e->radius, resolution, seed);
    return g;
  }
  if (d.is<Annulus>()) {
    const double q = d.as<Annulus>().q;
    detail::polar_rings(g, 0.0, q, 1.0, resolution, seed);
    return g;
  }
  // remaining shapes are carved out of their base's grid by membership
  const DomainPtr& base =
      d.is<Sublevel>() ? d.as<Sublevel>().base : d.as<Punctured>().base;
  QuadratureGrid bg = build_quadrature(*base, resolution, seed);
  g.cell_scale = bg.cell_scale;
  for (size_t k = 0; k < bg.nodes.size(); ++k) {
    if (contains(d, bg.nodes[k])) {
      g.nodes.push_back(bg.nodes[k]);
      g.weights.push_back(bg.weights[k]);
    }
  }
  if (g.nodes.empty()) fail_numeric("empty-domain", "no quadrature node passes membership");
  return g;
}

inline double weight_sum(const QuadratureGrid& g) {
  double s = 0.0;
  for (double w : g.weights) s += w;
  return s;
}

}  // namespace suita
