#pragma once

// Minimal-norm holomorphic extension of the point datum f(z0) = c(z0): the
// closed form c(z0) K(t,z0)/K(z0) with norm c/sqrt(K), the same problem as
// an equality-constrained least-norm solve over a finite basis, the bound
// norm <= sqrt(pi) with equality exactly in the disc case, and the
// level-derivative form B that coincides with the extremal form F.

#include <cmath>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "core.hpp"
#include "domain.hpp"
#include "green.hpp"
#include "quadrature.hpp"
#include "variation.hpp"

namespace suita {

struct ExtensionSolution {
  std::vector<Complex> coefficients;  // empty on the kernel route
  double norm = 0.0;
  Complex value_at_pole{};
  std::string route;  // kernel_formula | constrained_qp
};

/// The minimizer c(z0) K(t,z0)/K(z0); its norm c/sqrt(K) needs only the
/// diagonal kernel value, through whatever route the domain admits.
inline ExtensionSolution minimal_extension_closed(const DomainSpec& d, Complex z0,
                                                  const KernelOptions& opt = {}) {
  const double k = kernel_diag(d, z0, opt).value.real();
  const double c = log_capacity(d, z0).value;
  ExtensionSolution sol;
  sol.norm = c / std::sqrt(k);
  sol.value_at_pole = c;
  sol.route = "kernel_formula";
  return sol;
}

/// Least-norm coefficients under the single constraint f(z0) = c_target:
/// x = c_target G^+ conj(v) / (v^T G^+ conj(v)) with v the basis row at z0.
/// The reported norm re-integrates |f|^2 over the grid measure, which on an
/// area-built basis reproduces x^H Gram x exactly.
inline ExtensionSolution minimal_extension_numeric(const BergmanBasis& basis,
                                                   const QuadratureGrid& grid, Complex z0,
                                                   double c_target) {
  ExtensionSolution sol;
  sol.route = "constrained_qp";
  const Eigen::VectorXcd v = basis.evaluate(z0);
  if (c_target == 0.0) {
    sol.coefficients.assign(v.size(), Complex{});
    return sol;
  }
  if (!(v.norm() > 1e-300))
    fail_numeric("constraint-infeasible", "every basis function vanishes at z0");
  const Eigen::VectorXcd g = basis.solve(v.conjugate());
  const Complex s = (v.transpose() * g)(0);
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    fail_numeric("gram-singular", "constraint quadratic form is not finite");
  if (!(s.real() > 0.0))
    fail_numeric("constraint-infeasible",
                 "the constraint direction fell below the spectral cutoff");
  const Eigen::VectorXcd x = g * (c_target / s);

  const std::size_t chunks = 64;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = grid.nodes.size() * c / chunks;
    const std::size_t hi = grid.nodes.size() * (c + 1) / chunks;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      acc += grid.weights[i] * std::norm((basis.evaluate(grid.nodes[i]).transpose() * x)(0));
    partial[c] = acc;
  });
  double norm2 = 0.0;
  for (double p : partial) norm2 += p;

  sol.coefficients.assign(x.data(), x.data() + x.size());
  sol.norm = std::sqrt(norm2);
  sol.value_at_pole = (v.transpose() * x)(0);
  return sol;
}

struct ExtensionBound {
  double norm = 0.0;
  double bound = 0.0;  // sqrt(pi), the disc value
  double tol = 0.0;
  bool pass = false;      // norm <= bound + tol
  bool equality = false;  // |norm - bound| < tol, the disc signature
};

inline ExtensionBound extension_bound_check(const DomainSpec& d, Complex z0, double tol = 1e-6,
                                            const KernelOptions& opt = {}) {
  const ExtensionSolution sol = minimal_extension_closed(d, z0, opt);
  ExtensionBound rep;
  rep.norm = sol.norm;
  rep.bound = std::sqrt(pi);
  rep.tol = tol;
  rep.pass = rep.norm <= rep.bound + tol;
  rep.equality = std::abs(rep.norm - rep.bound) < tol;
  return rep;
}

/// Deviation between the level-derivative form B(t) = e^{2s} sqrt(pi)
/// (-dK_s(t,z0)/ds / 2)/sqrt(K(z0)), realized by a centered difference in
/// s, and the extremal form F(t) on the same sublevel. The two coincide
/// identically; the residual is the finite-difference defect.
inline double btau_residual(const DomainSpec& base, Complex z0, Complex t, double s,
                            double h = 1e-3, const KernelOptions& opt = {}) {
  validate(base);
  if (!(h > 0.0) || s + h > 0.0)
    fail_validation("invalid-step", "level derivative needs h > 0 and s + h <= 0");
  if (!contains(make_sublevel(base, z0, s - h), t))
    fail_validation("t-outside-sublevel", "t must lie in the smallest sublevel probed");
  auto kernel_at = [&](double level) {
    return level == 0.0 ? kernel_offdiag(base, t, z0, opt).value
                        : kernel_offdiag(make_sublevel(base, z0, level), t, z0, opt).value;
  };
  const Complex dks = (kernel_at(s + h) - kernel_at(s - h)) / (2.0 * h);
  const double k0 = kernel_diag(base, z0, opt).value.real();
  const Complex b = std::exp(2.0 * s) * std::sqrt(pi) * (-0.5 * dks) / std::sqrt(k0);
  const Complex f = detail::ftau_coefficient(base, z0, s, t, opt);
  return std::abs(b - f) / std::abs(f);
}

}  // namespace suita
