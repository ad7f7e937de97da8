#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suita/core.hpp"
#include "suita/detail/contour.hpp"
#include "suita/detail/gauss.hpp"
#include "suita/detail/images.hpp"
#include "suita/domain.hpp"
#include "suita/quadrature.hpp"

namespace suita {

struct KernelEstimate {
  Complex value{};
  std::string method;  // closed_form | laurent_series | gram_numeric
  double error_estimate = 0.0;
  double condition = 1.0;
};

struct KernelOptions {
  int resolution = 256;  // area-quadrature resolution for numeric routes
  std::uint64_t seed = 1;
  int max_pos = 16;
  int max_neg = 16;  // applies only when the domain has a hole
  double tol = 1e-3;  // relative target; degrees double while the estimate exceeds it
  int contour_samples = 2048;
  bool force_numeric = false;  // skip analytic routes (route cross-checks)
};

/// Finite slice of the holomorphic basis: (z-a)^n for 0 <= n <= max_pos and
/// (z-b)^{-n} for 1 <= n <= max_neg, with b the hole point of doubly
/// connected domains (a = b = 0 there, so the slice is the Laurent family).
/// The raw Gram is kept as computed; solves run on the diagonal-normalized
/// matrix through a spectral cutoff, which tames the enormous norm spread of
/// the bilateral family without touching the stored entries.
struct BergmanBasis {
  DomainSpec domain;
  Complex center{};
  std::optional<Complex> hole;
  int max_pos = 0;
  int max_neg = 0;
  double spectrum_cutoff = 1e-10;
  Eigen::MatrixXcd gram;

  Eigen::VectorXd scale;  // 1/sqrt(diag)
  Eigen::MatrixXcd evec;  // eigenvectors of scaled Gram, ascending eigenvalues
  Eigen::VectorXd eval;
  int retained = 0;
  double condition = 1.0;

  int size() const { return max_pos + 1 + max_neg; }
  int exponent(int j) const { return j <= max_pos ? j : max_pos - j; }

  Eigen::VectorXcd evaluate(Complex z) const {
    Eigen::VectorXcd v(size());
    Complex u = z - center;
    v(0) = 1.0;
    for (int j = 1; j <= max_pos; ++j) v(j) = v(j - 1) * u;
    if (max_neg > 0) {
      Complex w = 1.0 / (z - *hole);
      v(max_pos + 1) = w;
      for (int j = 2; j <= max_neg; ++j) v(max_pos + j) = v(max_pos + j - 1) * w;
    }
    return v;
  }

  /// Regularized solve gram . x = rhs (pseudo-inverse over retained modes).
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
    Eigen::VectorXcd r = scale.asDiagonal() * rhs;
    Eigen::VectorXcd coeff = evec.rightCols(retained).adjoint() * r;
    coeff.array() /= eval.tail(retained).cast<Complex>().array();
    return scale.asDiagonal() * (evec.rightCols(retained) * coeff);
  }
};

namespace detail {

inline void prepare_basis(BergmanBasis& b) {
  const int n = b.size();
  b.gram = 0.5 * (b.gram + Eigen::MatrixXcd(b.gram.adjoint()));
  b.scale.resize(n);
  for (int i = 0; i < n; ++i) {
    double d = b.gram(i, i).real();
    if (!finite(d) || d <= 0.0)
      fail_numeric("gram-singular", "basis function with degenerate norm");
    b.scale(i) = 1.0 / std::sqrt(d);
  }
  Eigen::MatrixXcd normed = b.scale.asDiagonal() * b.gram * b.scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(normed);
  if (es.info() != Eigen::Success) fail_numeric("gram-singular", "eigen decomposition failed");
  b.eval = es.eigenvalues();
  b.evec = es.eigenvectors();
  double lead = b.eval(n - 1);
  if (!(lead > 0.0)) fail_numeric("gram-singular", "Gram matrix is not positive");
  b.retained = 0;
  for (int i = 0; i < n; ++i)
    if (b.eval(i) >= b.spectrum_cutoff * lead) ++b.retained;
  if (b.retained == 0) fail_numeric("gram-singular", "all modes fell below the cutoff");
  b.condition = lead / b.eval(n - b.retained);
  if (b.condition > 1e12)
    fail_numeric("ill-conditioned", "Gram conditioning exceeds 1e12 after cutoff");
}

/// Gram accumulation over explicit nodes, split into 64 fixed chunks so the
/// summation order (and thus the result) is independent of the thread count.
inline void accumulate_gram(Eigen::MatrixXcd& gram, const BergmanBasis& b,
                            const std::vector<Complex>& nodes, const std::vector<double>& weights,
                            double sign) {
  const int n = b.size();
  const std::size_t chunks = 64;
  std::vector<Eigen::MatrixXcd> partial(chunks, Eigen::MatrixXcd::Zero(n, n));
  parallel_for(chunks, [&](std::size_t c) {
    std::size_t lo = nodes.size() * c / chunks;
    std::size_t hi = nodes.size() * (c + 1) / chunks;
    Eigen::MatrixXcd& acc = partial[c];
    Eigen::VectorXcd v(n);
    for (std::size_t i = lo; i < hi; ++i) {
      v = b.evaluate(nodes[i]);
      double w = sign * weights[i];
      for (int j = 0; j < n; ++j) {
        Complex wv = w * v(j);
        for (int k = 0; k <= j; ++k) acc(j, k) += wv * std::conj(v(k));
      }
    }
  });
  for (const auto& p : partial) gram += p;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) gram(j, k) = std::conj(gram(k, j));
}

inline void subtract_caps(Eigen::MatrixXcd& gram, const BergmanBasis& b,
                          const std::vector<PolarCap>& caps) {
  for (const auto& cap : caps) {
    auto rule = cap_rule(cap.center, cap.radius, b.max_pos + 2);
    std::vector<Complex> nodes(rule.size());
    std::vector<double> weights(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      nodes[i] = rule[i].z;
      weights[i] = rule[i].w;
    }
    accumulate_gram(gram, b, nodes, weights, -1.0);
  }
}

/// Unwinds nested sublevels (same pole, levels add) down to the root domain.
struct RootLevel {
  DomainSpec root;
  Complex pole{};
  double level = 0.0;
};

inline RootLevel collapse_sublevel(const DomainSpec& d) {
  RootLevel r{d, 0.0, 0.0};
  bool first = true;
  while (r.root.is<Sublevel>()) {
    const auto& s = r.root.as<Sublevel>();
    if (first) {
      r.pole = s.pole;
      first = false;
    } else if (std::abs(s.pole - r.pole) > 1e-14) {
      fail_numeric("green-eval-failed", "nested sublevels with distinct poles");
    }
    r.level += s.level;
    r.root = *s.base;
  }
  return r;
}

}  // namespace detail

/// Basis over an explicit area grid. Punctured domains are handled exactly:
/// the Gram is assembled on the un-punctured domain (regenerated at the
/// grid's resolution and seed) and each excised cap is removed by a product
/// Gauss rule that integrates the basis monomials exactly.
inline BergmanBasis numeric_basis(const DomainSpec& domain, int max_pos, int max_neg,
                                  const QuadratureGrid& grid) {
  validate(domain);
  if (max_pos < 0 || max_neg < 0 || max_pos + max_neg == 0)
    fail_validation("invalid-degree", "basis needs a nonneg degree range");
  BergmanBasis b;
  b.domain = domain;
  b.hole = hole_point(domain);
  if (max_neg > 0 && !b.hole)
    fail_validation("invalid-degree", "negative powers require a domain with a hole");
  FlatDomain flat = flatten_punctures(domain);
  if (b.hole) {
    b.center = *b.hole;
  } else if (auto eq = equivalent_disc(flat.clean)) {
    b.center = eq->center;
  } else {
    fail_validation("invalid-domain", "no expansion center available");
  }
  b.max_pos = max_pos;
  b.max_neg = max_neg;
  b.gram = Eigen::MatrixXcd::Zero(b.size(), b.size());
  if (flat.caps.empty()) {
    detail::accumulate_gram(b.gram, b, grid.nodes, grid.weights, 1.0);
  } else {
    QuadratureGrid clean = build_quadrature(flat.clean, grid.resolution, grid.seed);
    detail::accumulate_gram(b.gram, b, clean.nodes, clean.weights, 1.0);
    detail::subtract_caps(b.gram, b, flat.caps);
  }
  detail::prepare_basis(b);
  return b;
}

/// Basis for sublevel sets of annulus-family domains, with Gram entries
/// computed as boundary integrals over traced level curves instead of area
/// sums. This sidesteps the staircase error of membership-filtered grids and
/// is spectrally accurate in the number of contour samples.
inline BergmanBasis contour_basis(const DomainSpec& domain, int max_pos, int max_neg,
                                  int n_samples = 2048) {
  validate(domain);
  FlatDomain flat = flatten_punctures(domain);
  if (!flat.clean.is<Sublevel>())
    fail_validation("invalid-domain", "contour basis expects a sublevel domain");
  detail::RootLevel rl = detail::collapse_sublevel(flat.clean);
  auto hole = hole_point(rl.root);
  if (!hole) fail_validation("invalid-domain", "contour basis expects an annulus-family root");
  BergmanBasis b;
  b.domain = domain;
  b.center = *hole;
  b.hole = hole;
  b.max_pos = max_pos;
  b.max_neg = max_neg;
  std::vector<int> exps(std::size_t(b.size()));
  for (int j = 0; j < b.size(); ++j) exps[std::size_t(j)] = b.exponent(j);
  auto fam = detail::sublevel_contours(rl.root, rl.pole, rl.level, n_samples);
  b.gram = detail::stokes_gram(fam.contours, b.center, exps);
  if (!flat.caps.empty()) detail::subtract_caps(b.gram, b, flat.caps);
  detail::prepare_basis(b);
  return b;
}

/// K(t, z0) from a prepared basis; the error estimate compares against the
/// same solve with the top four degrees (each sign) dropped.
inline KernelEstimate kernel_numeric(const BergmanBasis& basis, Complex t, Complex z0) {
  Eigen::VectorXcd vt = basis.evaluate(t);
  Eigen::VectorXcd vz = basis.evaluate(z0);
  KernelEstimate est;
  est.method = "gram_numeric";
  est.condition = basis.condition;
  est.value = (vt.transpose() * basis.solve(vz.conjugate()))(0);

  int sub_pos = basis.max_pos - 4;
  int sub_neg = basis.max_neg > 0 ? std::max(basis.max_neg - 4, 1) : 0;
  if (sub_pos >= 2) {
    std::vector<int> keep;
    for (int j = 0; j < basis.size(); ++j) {
      int e = basis.exponent(j);
      if (e >= 0 ? e <= sub_pos : -e <= sub_neg) keep.push_back(j);
    }
    BergmanBasis sub;
    sub.domain = basis.domain;
    sub.center = basis.center;
    sub.hole = basis.hole;
    sub.max_pos = sub_pos;
    sub.max_neg = sub_neg;
    sub.spectrum_cutoff = basis.spectrum_cutoff;
    sub.gram = basis.gram(keep, keep);
    detail::prepare_basis(sub);
    Complex reduced = (sub.evaluate(t).transpose() * sub.solve(sub.evaluate(z0).conjugate()))(0);
    est.error_estimate = std::abs(est.value - reduced);
  }
  return est;
}

namespace detail {

enum class KernelRoute { closed, laurent, gram_area, gram_contour };

inline KernelRoute kernel_route(const DomainSpec& d, bool force_numeric) {
  FlatDomain flat = flatten_punctures(d);
  bool punctured = !flat.caps.empty() || d.is<Punctured>();
  if (!punctured && !force_numeric) {
    if (equivalent_disc(flat.clean)) return KernelRoute::closed;
    if (flat.clean.is<Annulus>()) return KernelRoute::laurent;
  }
  if (flat.clean.is<Sublevel>() && hole_point(flat.clean)) return KernelRoute::gram_contour;
  return KernelRoute::gram_area;
}

inline BergmanBasis kernel_basis_at(const DomainSpec& d, KernelRoute route, int mp, int mn,
                                    const KernelOptions& opt) {
  if (route == KernelRoute::gram_contour) return contour_basis(d, mp, mn, opt.contour_samples);
  return numeric_basis(d, mp, mn, build_quadrature(flatten_punctures(d).clean, opt.resolution, opt.seed));
}

inline KernelEstimate kernel_point(const DomainSpec& d, Complex t, Complex z0,
                                   const KernelOptions& opt) {
  validate(d);
  if (!contains(d, t) || !contains(d, z0))
    fail_validation("not-in-domain", "kernel arguments must lie in the domain");
  KernelRoute route = kernel_route(d, opt.force_numeric);
  KernelEstimate est;
  if (route == KernelRoute::closed) {
    auto eq = equivalent_disc(flatten_punctures(d).clean);
    double r2 = sq(eq->radius);
    Complex den = r2 - (t - eq->center) * std::conj(z0 - eq->center);
    est.value = r2 / (pi * sq_c(den));
    est.method = "closed_form";
    return est;
  }
  if (route == KernelRoute::laurent) {
    auto sv = annulus_kernel_series(d.as<Annulus>().q, t, z0);
    est.value = sv.value;
    est.method = "laurent_series";
    est.error_estimate = sv.tail;
    return est;
  }
  int mp = opt.max_pos;
  int mn = hole_point(flatten_punctures(d).clean) ? opt.max_neg : 0;
  while (true) {
    BergmanBasis basis = kernel_basis_at(d, route, mp, mn, opt);
    est = kernel_numeric(basis, t, z0);
    if (est.error_estimate <= opt.tol * std::abs(est.value) || mp >= 64) return est;
    mp *= 2;
    mn *= 2;
  }
}

}  // namespace detail

inline KernelEstimate kernel_diag(const DomainSpec& d, Complex z0, const KernelOptions& opt = {}) {
  KernelEstimate est = detail::kernel_point(d, z0, z0, opt);
  // the quadratic form behind the diagonal value is Hermitian, so the exact
  // result is real; rounding leaves a ~1e-16 imaginary remnant
  est.value = Complex(est.value.real(), 0.0);
  if (!(est.value.real() > 0.0))
    fail_numeric("gram-singular", "diagonal kernel evaluation is not positive");
  return est;
}

inline KernelEstimate kernel_offdiag(const DomainSpec& d, Complex t, Complex z0,
                                     const KernelOptions& opt = {}) {
  return detail::kernel_point(d, t, z0, opt);
}

/// Connectivity of a sublevel domain, decided by the winding number of its
/// traced outer boundary around the base hole.
inline bool is_doubly_connected(const DomainSpec& d) {
  FlatDomain flat = flatten_punctures(d);
  if (flat.clean.is<Annulus>()) return true;
  if (!flat.clean.is<Sublevel>()) return false;
  detail::RootLevel rl = detail::collapse_sublevel(flat.clean);
  if (!hole_point(rl.root)) return false;
  return detail::sublevel_contours(rl.root, rl.pole, rl.level, 512).doubly_connected;
}

/// | integral of |K(t,z0)|^2 dA(t) - K(z0) | / K(z0) over the given grid.
inline double reproducing_residual(const DomainSpec& d, Complex z0, const QuadratureGrid& grid) {
  KernelOptions opt;
  opt.resolution = grid.resolution;
  opt.seed = grid.seed;
  KernelEstimate diag = kernel_diag(d, z0, opt);
  detail::KernelRoute route = detail::kernel_route(d, false);

  std::function<Complex(Complex)> eval;
  std::optional<BergmanBasis> basis;
  Eigen::VectorXcd rep;
  if (route == detail::KernelRoute::closed) {
    auto eq = equivalent_disc(flatten_punctures(d).clean);
    double r2 = sq(eq->radius);
    Complex c = eq->center;
    Complex zb = std::conj(z0 - c);
    eval = [r2, c, zb](Complex t) { return r2 / (pi * sq_c(r2 - (t - c) * zb)); };
  } else if (route == detail::KernelRoute::laurent) {
    double q = d.as<Annulus>().q;
    eval = [q, z0](Complex t) { return detail::annulus_kernel_series(q, t, z0).value; };
  } else {
    basis = detail::kernel_basis_at(d, route, opt.max_pos,
                                    hole_point(flatten_punctures(d).clean) ? opt.max_neg : 0, opt);
    rep = basis->solve(basis->evaluate(z0).conjugate());
    eval = [&](Complex t) { return Complex((basis->evaluate(t).transpose() * rep)(0)); };
  }

  const std::size_t chunks = 64;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    std::size_t lo = grid.nodes.size() * c / chunks;
    std::size_t hi = grid.nodes.size() * (c + 1) / chunks;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      acc += grid.weights[i] * std::norm(eval(grid.nodes[i]));
    partial[c] = acc;
  });
  double integral = 0.0;
  for (double p : partial) integral += p;
  return std::abs(integral - diag.value.real()) / diag.value.real();
}

}  // namespace suita
