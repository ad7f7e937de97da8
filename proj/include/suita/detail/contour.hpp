#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "suita/core.hpp"
#include "suita/domain.hpp"

namespace suita::detail {

/// One closed level curve of G(., pole), sampled uniformly in arc length.
/// Tangents are unit vectors oriented so the sublevel set lies on the left,
/// which is exactly the orientation Stokes' theorem wants (outer curves run
/// counterclockwise, curves around a hole clockwise).
struct LevelContour {
  std::vector<Complex> pts;
  std::vector<Complex> tangents;
  double length = 0.0;
  int winding_hole = 0;  // winding number around the base hole point
};

struct ContourFamily {
  std::vector<LevelContour> contours;  // outer first
  bool doubly_connected = false;
};

inline Complex level_grad(const DomainSpec& base, Complex pole, Complex z) {
  return 2.0 * std::conj(green_on_dz(base, z, pole));
}

/// One Newton step toward {G = level} along the gradient direction.
inline Complex level_newton(const DomainSpec& base, Complex pole, double level, Complex z) {
  Complex g = level_grad(base, pole, z);
  double g2 = std::norm(g);
  if (!(g2 > 0.0)) fail_numeric("contour-failed", "vanishing gradient on level curve");
  return z - (green_on(base, z, pole) - level) * g / g2;
}

inline int winding_number(const std::vector<Complex>& pts, Complex about) {
  double total = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    Complex a = pts[k] - about;
    Complex b = pts[(k + 1) % pts.size()] - about;
    total += std::arg(b / a);
  }
  return int(std::lround(total / (2.0 * pi)));
}

/// Traces the closed level curve through `start` by predictor/corrector
/// marching, then resamples to n_out points uniform in arc length (iterated,
/// with Newton polish each pass, so the parametrization error stays well
/// below the quadrature floor).
inline LevelContour trace_level_curve(const DomainSpec& base, Complex pole, double level,
                                      Complex start, int n_out) {
  for (int it = 0; it < 8; ++it) start = level_newton(base, pole, level, start);

  auto explore = [&](double step) {
    std::vector<Complex> path{start};
    Complex z = start;
    Complex t0 = Complex(0, 1) * level_grad(base, pole, z);
    t0 /= std::abs(t0);
    const int max_steps = 400000;
    for (int k = 0; k < max_steps; ++k) {
      Complex g = level_grad(base, pole, z);
      Complex t = Complex(0, 1) * g / std::abs(g);
      z = level_newton(base, pole, level, z + step * t);
      if (k >= 8 && std::abs(z - start) < 0.75 * step &&
          (t * std::conj(t0)).real() > 0.7) {
        return path;
      }
      path.push_back(z);
    }
    fail_numeric("contour-failed", "level curve did not close");
  };

  std::vector<Complex> path = explore(2e-3);
  if (path.size() < 400) {
    // tiny contour: estimate its perimeter and retrace with a finer step
    double perim = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k)
      perim += std::abs(path[(k + 1) % path.size()] - path[k]);
    path = explore(std::max(perim / 600.0, 1e-7));
  }

  // resample uniformly in arc length, polish back onto the curve, repeat
  for (int pass = 0; pass < 3; ++pass) {
    std::size_t n = path.size();
    std::vector<double> s(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      s[k + 1] = s[k] + std::abs(path[(k + 1) % n] - path[k]);
    double total = s[n];
    std::vector<Complex> out(static_cast<std::size_t>(n_out));
    std::size_t seg = 0;
    for (int k = 0; k < n_out; ++k) {
      double target = total * k / n_out;
      while (seg + 1 < n && s[seg + 1] < target) ++seg;
      double u = (target - s[seg]) / std::max(s[seg + 1] - s[seg], 1e-300);
      Complex z = path[seg] + u * (path[(seg + 1) % n] - path[seg]);
      for (int j = 0; j < 3; ++j) z = level_newton(base, pole, level, z);
      out[std::size_t(k)] = z;
    }
    path = std::move(out);
  }

  LevelContour c;
  c.pts = std::move(path);
  c.tangents.resize(c.pts.size());
  const std::size_t n = c.pts.size();
  double chord1 = 0.0, chord2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Complex g = level_grad(base, pole, c.pts[k]);
    c.tangents[k] = Complex(0, 1) * g / std::abs(g);
    chord1 += std::abs(c.pts[(k + 1) % n] - c.pts[k]);
    if (k % 2 == 0) chord2 += std::abs(c.pts[(k + 2) % n] - c.pts[k]);
  }
  // chordal length underestimates arc length at O(h^2); one Richardson step
  // against the half-resolution polyline removes that bias
  c.length = n % 2 == 0 ? chord1 + (chord1 - chord2) / 3.0 : chord1;
  if (auto hole = hole_point(base)) c.winding_hole = winding_number(c.pts, *hole);
  return c;
}

/// First crossing of {G = level} along the segment a -> b (a near the pole,
/// so G - level starts negative). Bisection after a bracketing scan.
inline Complex find_level_crossing(const DomainSpec& base, Complex pole, double level,
                                   Complex a, Complex b) {
  const int scan = 4000;
  double lo = 0.0;
  double f_lo = green_on(base, a, pole) - level;
  if (f_lo >= 0.0) fail_numeric("contour-failed", "crossing scan starts above the level");
  double hi = -1.0;
  for (int k = 1; k <= scan; ++k) {
    double t = double(k) / scan;
    if (green_on(base, a + t * (b - a), pole) - level >= 0.0) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi < 0.0) fail_numeric("contour-failed", "no level crossing on probe segment");
  for (int it = 0; it < 90; ++it) {
    double mid = 0.5 * (lo + hi);
    (green_on(base, a + mid * (b - a), pole) - level < 0.0 ? lo : hi) = mid;
  }
  return a + 0.5 * (lo + hi) * (b - a);
}

/// Boundary contours of the sublevel set {G(., pole) < level} inside `base`.
/// The outer contour always exists; when it winds around the base hole the
/// sublevel is doubly connected and the inner contour is traced as well.
inline ContourFamily sublevel_contours(const DomainSpec& base, Complex pole, double level,
                                       int n_out = 1024) {
  auto eq = equivalent_disc(base);
  auto hole = hole_point(base);
  Complex out_dir;
  double out_reach = 0.0;
  if (hole) {
    // annulus-family base: walk the ray through the pole toward |z| = 1
    out_dir = pole / std::abs(pole);
    out_reach = 1.0 - std::abs(pole) - 1e-9;
  } else if (eq) {
    Complex off = pole - eq->center;
    out_dir = std::abs(off) > 1e-14 ? off / std::abs(off) : Complex(1, 0);
    out_reach = eq->radius - std::abs(off) - 1e-9 * eq->radius;
  } else {
    fail_validation("invalid-domain", "no boundary metric for contour tracing");
  }

  Complex start_near = pole + 1e-7 * out_dir;
  Complex outer_seed =
      find_level_crossing(base, pole, level, start_near, pole + out_reach * out_dir);
  ContourFamily fam;
  fam.contours.push_back(trace_level_curve(base, pole, level, outer_seed, n_out));

  if (hole) {
    double in_reach = std::abs(pole) - base.as<Annulus>().q - 1e-9;
    Complex inner_seed = find_level_crossing(base, pole, level, pole - 1e-7 * out_dir,
                                             pole - in_reach * out_dir);
    if (fam.contours[0].winding_hole != 0) {
      fam.doubly_connected = true;
      LevelContour inner = trace_level_curve(base, pole, level, inner_seed, n_out);
      if (inner.winding_hole == 0)
        fail_numeric("contour-failed", "inner contour does not circle the hole");
      fam.contours.push_back(std::move(inner));
    } else {
      // simply connected: the inner crossing must sit on the outer contour
      double d = 1e300;
      for (Complex p : fam.contours[0].pts) d = std::min(d, std::abs(p - inner_seed));
      if (d > 8.0 * fam.contours[0].length / n_out)
        fail_numeric("contour-failed", "connectivity detection is inconsistent");
    }
  }
  return fam;
}

/// Area integrals I(n, m) = integral of (z-a)^n conj(z-a)^m over the region
/// bounded by the contour family, reduced to boundary integrals:
///   m != -1:          I = 1/(2i(m+1)) . contour_integral (z-a)^n conj(z-a)^(m+1) dz
///   m == -1, n != -1: I = -1/(2i(n+1)) . contour_integral (z-a)^(n+1) conj(z-a)^(-1) dconj(z)
///   n == m == -1:     I = 1/(2i) . contour_integral 2 log|z-a| (z-a)^(-1) dz
/// Exponent list entries may be negative only when `a` is outside the region
/// (hole point). Returns the Gram matrix gram(j, k) = I(e_j, e_k).
inline Eigen::MatrixXcd stokes_gram(const std::vector<LevelContour>& contours, Complex a,
                                    const std::vector<int>& exponents) {
  int b = int(exponents.size());
  int lo = 0, hi = 0;
  for (int e : exponents) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  --lo;
  ++hi;
  Eigen::MatrixXcd raw = Eigen::MatrixXcd::Zero(b, b);
  std::vector<Complex> pw(std::size_t(hi - lo + 1));
  auto at = [&](int e) -> Complex& { return pw[std::size_t(e - lo)]; };

  for (const auto& c : contours) {
    double ds = c.length / double(c.pts.size());
    for (std::size_t k = 0; k < c.pts.size(); ++k) {
      Complex zeta = c.pts[k] - a;
      at(0) = 1.0;
      for (int e = 1; e <= hi; ++e) at(e) = at(e - 1) * zeta;
      if (lo < 0) {
        Complex inv = 1.0 / zeta;
        for (int e = -1; e >= lo; --e) at(e) = at(e + 1) * inv;
      }
      Complex tds = c.tangents[k] * ds;
      double lg = lo < 0 ? 2.0 * std::log(std::abs(zeta)) : 0.0;
      for (int j = 0; j < b; ++j) {
        int ej = exponents[std::size_t(j)];
        for (int kk = 0; kk < b; ++kk) {
          int ek = exponents[std::size_t(kk)];
          if (ek != -1) {
            raw(j, kk) += at(ej) * std::conj(at(ek + 1)) * tds;
          } else if (ej != -1) {
            raw(j, kk) += at(ej + 1) * std::conj(at(-1)) * std::conj(tds);
          } else {
            raw(j, kk) += lg * at(-1) * tds;
          }
        }
      }
    }
  }

  Eigen::MatrixXcd gram(b, b);
  const Complex two_i(0, 2);
  for (int j = 0; j < b; ++j) {
    int ej = exponents[std::size_t(j)];
    for (int k = 0; k < b; ++k) {
      int ek = exponents[std::size_t(k)];
      if (ek != -1)
        gram(j, k) = raw(j, k) / (two_i * double(ek + 1));
      else if (ej != -1)
        gram(j, k) = -raw(j, k) / (two_i * double(ej + 1));
      else
        gram(j, k) = raw(j, k) / two_i;
    }
  }
  return 0.5 * (gram + Eigen::MatrixXcd(gram.adjoint()));
}

/// Region area from the same boundary reduction; used as a tracer sanity check.
inline double stokes_area(const std::vector<LevelContour>& contours) {
  Complex acc = 0.0;
  for (const auto& c : contours) {
    double ds = c.length / double(c.pts.size());
    for (std::size_t k = 0; k < c.pts.size(); ++k)
      acc += std::conj(c.pts[k]) * c.tangents[k] * ds;
  }
  return (acc / Complex(0, 2)).real();
}

}  // namespace suita::detail
