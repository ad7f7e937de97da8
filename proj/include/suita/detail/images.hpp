#pragma once

// Annulus A_q = {q < |z| < 1}: Green function by the method of images,
// Bergman kernel as a bilateral power series in t*conj(w).

#include <cmath>
#include <complex>

#include "../core.hpp"

namespace suita::detail {

inline constexpr int max_image_pairs = 200;

// G(z,w) for the annulus. Doubly infinite reflection family q^{2n}w and
// q^{2n}/conj(w), summed in symmetric pairs (the one-sided tails diverge);
// the log|z| term restores the inner boundary condition. Pair n is written
// in a cancellation-free form whose magnitude decays like q^{2n}.
inline double annulus_green(double q, Complex z, Complex w, double tol = 1e-12) {
  const Complex ws = 1.0 / std::conj(w);  // image of w across |z| = 1
  double g = std::log(std::abs(z - w)) - std::log(std::abs(z - ws)) - std::log(std::abs(w));
  double q2n = 1.0;
  for (int n = 1;; ++n) {
    if (n > max_image_pairs)
      fail_numeric("series-diverged", "annulus Green image series did not reach tolerance");
    q2n *= q * q;
    const double pair = std::log(std::abs(1.0 - q2n * w / z)) -
                        std::log(std::abs(1.0 - q2n / (std::conj(w) * z))) +
                        std::log(std::abs(1.0 - q2n * z / w)) -
                        std::log(std::abs(1.0 - q2n * z * std::conj(w)));
    g += pair;
    if (n >= 2 && std::abs(pair) < tol / 10.0) break;
  }
  g -= std::log(std::abs(w)) * std::log(std::abs(z)) / std::log(q);
  return g;
}

/// dG/dz (Wirtinger) of the annulus Green function; grad G = 2*conj of this.
inline Complex annulus_green_dz(double q, Complex z, Complex w, double tol = 1e-12) {
  const Complex ws = 1.0 / std::conj(w);
  Complex d = 0.5 / (z - w) - 0.5 / (z - ws);
  double q2n = 1.0;
  for (int n = 1;; ++n) {
    if (n > max_image_pairs)
      fail_numeric("series-diverged", "annulus Green derivative series did not reach tolerance");
    q2n *= q * q;
    // images q^{2n}w, q^{2n}/conj(w) directly; the distant family q^{-2n}*
    // enters through 1/(z - M) = -(1/M)/(1 - z/M), M large.
    Complex pair = 0.5 / (z - q2n * w) - 0.5 / (z - q2n * ws);
    pair -= 0.5 * (q2n / w) / (1.0 - q2n * z / w);
    pair += 0.5 * (q2n * std::conj(w)) / (1.0 - q2n * z * std::conj(w));
    d += pair;
    if (n >= 2 && std::abs(pair) < tol / 10.0) break;
  }
  d += -std::log(std::abs(w)) / std::log(q) * 0.5 / z;
  return d;
}

/// log c(w) for the annulus: the regular part of G at the pole, summed from
/// the same image family. Independent cross-checks live in the test suite.
inline double annulus_log_capacity(double q, Complex w, double tol = 1e-14) {
  const double rho2 = std::norm(w);
  double lc = -std::log1p(-rho2);
  double q2n = 1.0;
  for (int n = 1;; ++n) {
    if (n > max_image_pairs)
      fail_numeric("series-diverged", "annulus capacity series did not reach tolerance");
    q2n *= q * q;
    const double pair = 2.0 * std::log(1.0 - q2n) - std::log(std::abs(1.0 - q2n / rho2)) -
                        std::log(1.0 - q2n * rho2);
    lc += pair;
    if (n >= 2 && std::abs(pair) < tol / 10.0) break;
  }
  lc -= sq(std::log(std::abs(w))) / std::log(q);
  return lc;
}

/// Squared L2 norm of z^n over the annulus, plane area measure.
inline double annulus_monomial_norm_sq(double q, int n) {
  if (n == -1) return 2.0 * pi * std::log(1.0 / q);
  if (n >= 0) return pi * (1.0 - std::pow(q, 2 * n + 2)) / double(n + 1);
  // n <= -2: rewrite to avoid q^{negative huge}
  const int m = -n;  // m >= 2
  return pi * (std::pow(q, -2 * m + 2) - 1.0) / double(m - 1);
}

/// K(t, conj(w)) for the annulus from the orthogonal bilateral basis z^n.
/// Series in zeta = t*conj(w); both tails decay geometrically since
/// q^2 < |zeta| < 1. Returns value and a tail estimate.
struct SeriesValue {
  Complex value;
  double tail;
};

inline SeriesValue annulus_kernel_series(double q, Complex t, Complex w) {
  const Complex zeta = t * std::conj(w);
  const double q2 = q * q;
  Complex acc = 1.0 / (zeta * 2.0 * pi * std::log(1.0 / q));  // n = -1
  // nonnegative n: zeta^n (n+1)/(pi (1-q^{2n+2}))
  Complex zp = 1.0;
  double q2n2 = q2;
  double tail = 0.0;
  for (int n = 0;; ++n) {
    const Complex term = zp * double(n + 1) / (pi * (1.0 - q2n2));
    acc += term;
    if (n > 8 && std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) {
      tail += std::abs(term) * std::abs(zeta) / std::max(1e-300, 1.0 - std::abs(zeta));
      break;
    }
    if (n > 100000) fail_numeric("series-diverged", "annulus kernel series (positive tail)");
    zp *= zeta;
    q2n2 *= q2;
  }
  // n = -m, m >= 2: (m-1) q^{-2} (q^2/zeta)^m / (pi (1-q^{2m-2}))
  const Complex u = q2 / zeta;  // |u| < 1
  Complex up = u * u;
  double q2m2 = q2;
  for (int m = 2;; ++m) {
    const Complex term = double(m - 1) / (q2 * pi * (1.0 - q2m2)) * up;
    acc += term;
    if (m > 8 && std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) {
      tail += std::abs(term) * std::abs(u) / std::max(1e-300, 1.0 - std::abs(u));
      break;
    }
    if (m > 100000) fail_numeric("series-diverged", "annulus kernel series (negative tail)");
    up *= u;
    q2m2 *= q2;
  }
  return {acc, tail};
}

/// Same kernel from the differentiated image series
/// K = (1/pi) sum_n q^{2n}/(zeta - q^{2n})^2 - 1/(2 pi zeta log q).
/// Used as an independent oracle against the bilateral series.
inline Complex annulus_kernel_images(double q, Complex t, Complex w) {
  const Complex zeta = t * std::conj(w);
  const double q2 = q * q;
  Complex acc = 0.0;
  double q2n = 1.0;
  for (int n = 0;; ++n) {
    const Complex term = q2n / (sq_c(zeta - q2n));
    acc += term;
    if (n > 4 && std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) break;
    if (n > max_image_pairs) fail_numeric("series-diverged", "annulus image kernel (positive)");
    q2n *= q2;
  }
  double q2m = 1.0;
  for (int m = 1;; ++m) {
    q2m *= q2;
    const Complex term = q2m / sq_c(1.0 - zeta * q2m);
    acc += term;
    if (m > 4 && std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) break;
    if (m > max_image_pairs) fail_numeric("series-diverged", "annulus image kernel (negative)");
  }
  return acc / pi - 1.0 / (2.0 * pi * zeta * std::log(q));
}

}  // namespace suita::detail
