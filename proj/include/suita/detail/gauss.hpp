#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "suita/core.hpp"

namespace suita::detail {

/// Gauss-Legendre nodes/weights on [-1, 1]. Newton on P_n with the usual
/// Chebyshev-like initial guesses; n stays small here (< 100), so no caching.
inline std::vector<std::pair<double, double>> gauss_legendre(int n) {
  std::vector<std::pair<double, double>> rule(n);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence up to degree n at x.
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule[k] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return rule;
}

/// Quadrature over the disc |z - center| <= radius, exact for integrands
/// z^n conj(z)^m (about any point) with n, m <= max_degree. Radial
/// Gauss-Legendre in r (degree 2*n_rad-1 >= 2*max_degree+1) times a uniform
/// angular rule with more than 2*max_degree points.
struct CapNode {
  Complex z;
  double w;
};

inline std::vector<CapNode> cap_rule(Complex center, double radius, int max_degree) {
  int n_rad = max_degree + 2;
  int n_ang = 2 * max_degree + 4;
  auto radial = gauss_legendre(n_rad);
  std::vector<CapNode> nodes;
  nodes.reserve(std::size_t(n_rad) * n_ang);
  double step = 2.0 * pi / n_ang;
  for (const auto& [x, gw] : radial) {
    double r = 0.5 * radius * (x + 1.0);
    double wr = gw * 0.5 * radius * r * step;
    for (int j = 0; j < n_ang; ++j) {
      double th = (j + 0.5) * step;
      nodes.push_back({center + std::polar(r, th), wr});
    }
  }
  return nodes;
}

}  // namespace suita::detail
