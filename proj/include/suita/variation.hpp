#pragma once

// The sublevel family X_s = {G(., z0) < s} and its variational laws: the
// kernel trace s -> log K_s(z0), convexity and the monotone quantity
// log K_s + 2s, the harmonicity-equality link, capacity scaling
// c_s = c e^{-s}, the kernel identity K = K_s e^{2s} on discs, and its
// differential form dK_s/ds = -2 K_s.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bergman.hpp"
#include "core.hpp"
#include "domain.hpp"
#include "green.hpp"
#include "quadrature.hpp"

namespace suita {

struct TraceSample {
  double re_tau = 0.0;
  double logK = std::numeric_limits<double>::quiet_NaN();
  double c_tau = std::numeric_limits<double>::quiet_NaN();
  double logK_plus_2tau = std::numeric_limits<double>::quiet_NaN();
  std::string kernel_method;
  bool ok = false;
  std::string error_tag;  // set on gap samples
};

struct VariationTrace {
  Complex pole{};
  std::vector<TraceSample> samples;  // re_tau strictly increasing
};

inline DomainSpec sublevel_domain(const DomainSpec& base, Complex z0, double s) {
  validate(base);
  if (!(s < 0.0)) fail_validation("invalid-level", "sublevel domains need s < 0");
  if (!contains(base, z0)) fail_validation("not-in-domain", "pole must lie in the base domain");
  return make_sublevel(base, z0, s);
}

/// 12 points by default, |s| geometric from 0.05 to 3, returned ascending in
/// s (deepest first). The tight end resolves the near-base regime where the
/// convexity of log K_s concentrates; the far end is asymptotic.
inline std::vector<double> default_s_grid(int n = 12, double min_abs = 0.05,
                                          double max_abs = 3.0) {
  if (n < 2 || !(0.0 < min_abs && min_abs < max_abs))
    fail_validation("invalid-level", "s-grid needs n >= 2 and 0 < min < max");
  std::vector<double> out;
  out.reserve(n);
  for (int k = n - 1; k >= 0; --k)
    out.push_back(-min_abs * std::pow(max_abs / min_abs, double(k) / (n - 1)));
  return out;
}

inline VariationTrace variation_trace(const DomainSpec& base, Complex z0,
                                      const std::vector<double>& s_values,
                                      const KernelOptions& opt = {}) {
  validate(base);
  if (!contains(base, z0)) fail_validation("not-in-domain", "pole must lie in the base domain");
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    if (s_values[i] > 0.0)
      fail_validation("invalid-level", "trace levels must be <= 0");
    if (i > 0 && !(s_values[i - 1] < s_values[i]))
      fail_validation("invalid-level", "trace levels must be strictly ascending");
  }
  const CapacityValue c_base = log_capacity(base, z0);

  VariationTrace trace;
  trace.pole = z0;
  trace.samples.resize(s_values.size());
  parallel_for(s_values.size(), [&](std::size_t i) {
    const double s = s_values[i];
    TraceSample& out = trace.samples[i];
    out.re_tau = s;
    try {
      const KernelEstimate k =
          s == 0.0 ? kernel_diag(base, z0, opt)
                   : kernel_diag(make_sublevel(base, z0, s), z0, opt);
      out.logK = std::log(k.value.real());
      out.c_tau = c_base.value * std::exp(-s);
      out.logK_plus_2tau = out.logK + 2.0 * s;
      out.kernel_method = k.method;
      out.ok = true;
    } catch (const Error& e) {
      out.ok = false;
      out.error_tag = e.tag;
    }
  });
  return trace;
}

namespace detail {

// three-point second-derivative estimates 2 f[s-,s0,s+] over consecutive
// non-gap triples; exact zero on affine data regardless of grid spacing
struct SecondDiff {
  double s = 0.0;
  double value = 0.0;
};

inline std::vector<SecondDiff> divided_second_diffs(const VariationTrace& trace) {
  const auto& v = trace.samples;
  std::vector<SecondDiff> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (!v[i - 1].ok || !v[i].ok || !v[i + 1].ok) continue;
    const double h1 = v[i].re_tau - v[i - 1].re_tau;
    const double h2 = v[i + 1].re_tau - v[i].re_tau;
    const double d2 =
        2.0 * ((v[i + 1].logK - v[i].logK) / h2 - (v[i].logK - v[i - 1].logK) / h1) / (h1 + h2);
    out.push_back({v[i].re_tau, d2});
  }
  return out;
}

inline std::size_t count_ok(const VariationTrace& trace) {
  std::size_t n = 0;
  for (const auto& s : trace.samples) n += s.ok ? 1 : 0;
  return n;
}

}  // namespace detail

struct ConvexityReport {
  double min_second_diff = 0.0;
  double max_second_diff = 0.0;
  double tol = 0.0;
  bool pass = false;  // convexity up to tolerance: min >= -tol
};

inline ConvexityReport convexity_report(const VariationTrace& trace, double tol = 1e-3) {
  if (detail::count_ok(trace) < 3)
    fail_validation("insufficient-samples", "convexity needs at least 3 trace samples");
  const auto d2 = detail::divided_second_diffs(trace);
  if (d2.empty())
    fail_validation("insufficient-samples", "gaps leave no consecutive sample triple");
  ConvexityReport rep;
  rep.tol = tol;
  rep.min_second_diff = rep.max_second_diff = d2.front().value;
  for (const auto& d : d2) {
    rep.min_second_diff = std::min(rep.min_second_diff, d.value);
    rep.max_second_diff = std::max(rep.max_second_diff, d.value);
  }
  rep.pass = rep.min_second_diff >= -tol;
  return rep;
}

struct MonotoneReport {
  double max_violation = 0.0;  // largest decrease of logK + 2s between samples
  double terminal_gap = std::numeric_limits<double>::quiet_NaN();  // logK(0) - last column value
  bool has_terminal = false;
  bool non_decreasing = false;
  bool bounded_by_terminal = true;
  bool harmonic_regime = false;  // column constant within tol: the equality case
  double tol = 0.0;
  bool pass = false;
};

/// Checks log K_s + 2s non-decreasing and bounded by its terminal value
/// log K(0). The terminal is the trace's own s = 0 sample when present,
/// otherwise the logK0 argument; without either, the bound check is skipped.
inline MonotoneReport monotone_report(const VariationTrace& trace, double tol = 1e-3,
                                      std::optional<double> logK0 = std::nullopt) {
  if (detail::count_ok(trace) < 2)
    fail_validation("insufficient-samples", "monotonicity needs at least 2 trace samples");
  MonotoneReport rep;
  rep.tol = tol;
  for (const auto& s : trace.samples)
    if (s.ok && s.re_tau == 0.0) logK0 = s.logK;

  double prev = std::numeric_limits<double>::quiet_NaN();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double last = 0.0;
  for (const auto& s : trace.samples) {
    if (!s.ok) continue;
    const double v = s.logK_plus_2tau;
    if (std::isfinite(prev)) rep.max_violation = std::max(rep.max_violation, prev - v);
    prev = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    last = v;
    if (logK0 && v > *logK0 + tol) rep.bounded_by_terminal = false;
  }
  rep.non_decreasing = rep.max_violation <= tol;
  rep.harmonic_regime = hi - lo <= tol;
  if (logK0) {
    rep.has_terminal = true;
    rep.terminal_gap = *logK0 - last;
  }
  rep.pass = rep.non_decreasing && rep.bounded_by_terminal;
  return rep;
}

inline double harmonicity_residual(const VariationTrace& trace) {
  if (detail::count_ok(trace) < 3)
    fail_validation("insufficient-samples", "harmonicity needs at least 3 trace samples");
  const auto d2 = detail::divided_second_diffs(trace);
  if (d2.empty())
    fail_validation("insufficient-samples", "gaps leave no consecutive sample triple");
  double m = 0.0;
  for (const auto& d : d2) m = std::max(m, std::abs(d.value));
  return m;
}

/// Least-squares slope of logK over the three most negative samples; -2 in
/// the shrinking-disc asymptotic regime for every base.
inline double tail_slope(const VariationTrace& trace) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : trace.samples) {
    if (!s.ok) continue;
    pts.push_back({s.re_tau, s.logK});
    if (pts.size() == 3) break;
  }
  if (pts.size() < 3)
    fail_validation("insufficient-samples", "tail slope needs the 3 deepest samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
}

struct TraceReport {  // aggregate view serialized to report JSON
  double min_second_diff = 0.0;
  double max_abs_second_diff = 0.0;
  double slope_tail = 0.0;
  bool pass = false;
};

inline TraceReport trace_report(const VariationTrace& trace, double tol = 1e-3) {
  TraceReport rep;
  const ConvexityReport conv = convexity_report(trace, tol);
  rep.min_second_diff = conv.min_second_diff;
  rep.max_abs_second_diff = harmonicity_residual(trace);
  rep.slope_tail = tail_slope(trace);
  const MonotoneReport mono = monotone_report(trace, tol);
  rep.pass = conv.pass && mono.pass && std::abs(rep.slope_tail + 2.0) <= 0.05;
  return rep;
}

inline double key_lemma_residual(const DomainSpec& base, Complex z0, Complex t, double s,
                                 const KernelOptions& opt = {}) {
  const DomainSpec sub = sublevel_domain(base, z0, s);
  if (!contains(sub, t))
    fail_validation("t-outside-sublevel", "key lemma needs t inside the sublevel");
  const KernelEstimate full = kernel_offdiag(base, t, z0, opt);
  const KernelEstimate shrunk = kernel_offdiag(sub, t, z0, opt);
  return std::abs(full.value - shrunk.value * std::exp(2.0 * s)) / std::abs(full.value);
}

/// Centered finite-difference check of dK_s/ds = -2 K_s at fixed (t, z0).
inline double pde_residual(const DomainSpec& base, Complex z0, Complex t, double s, double h,
                           const KernelOptions& opt = {}) {
  validate(base);
  if (!(h > 0.0) || s + h > 0.0 || !(s < 0.0))
    fail_validation("invalid-step", "pde residual needs h > 0 and s + h <= 0");
  if (!contains(make_sublevel(base, z0, s - h), t))
    fail_validation("t-outside-sublevel", "t must lie in the smallest sublevel probed");
  auto kernel_at = [&](double level) {
    return level == 0.0 ? kernel_offdiag(base, t, z0, opt)
                        : kernel_offdiag(make_sublevel(base, z0, level), t, z0, opt);
  };
  const Complex kp = kernel_at(s + h).value;
  const Complex km = kernel_at(s - h).value;
  const Complex k0 = kernel_at(s).value;
  return std::abs((kp - km) / (2.0 * h) + 2.0 * k0) / std::abs(k0);
}

/// Re-extracts the sublevel capacity by Richardson probe circles (a route
/// independent of the scaling law) and compares with c(z0) e^{-s}. Disc
/// bases only: the probe route needs the sublevel Green function, which is
/// evaluable at its defining pole on any base but certified here against
/// the closed-form disc capacity.
inline double capacity_scaling_check(const DomainSpec& base, Complex z0, double s) {
  validate(base);
  if (!(s < 0.0)) fail_validation("invalid-level", "capacity scaling needs s < 0");
  if (!equivalent_disc(flatten_punctures(base).clean))
    fail_validation("invalid-domain", "capacity scaling check runs on disc bases");
  if (!contains(base, z0)) fail_validation("not-in-domain", "pole must lie in the base domain");
  const DomainSpec sub = make_sublevel(base, z0, s);
  const double c_probe = capacity_via_probes(sub, z0).value;
  const double c_base = log_capacity(base, z0).value;
  return std::abs(c_probe - c_base * std::exp(-s)) / c_base;
}

struct LinearLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |fit - data| over the samples
};

/// Fits log|K_s(t,z0)| as an affine function of s; slope -2 with tiny
/// residual realizes the linear form of the kernel identity on discs.
inline LinearLawFit linear_law_fit(const DomainSpec& base, Complex z0, Complex t,
                                   const std::vector<double>& s_values,
                                   const KernelOptions& opt = {}) {
  validate(base);
  if (s_values.size() < 3)
    fail_validation("insufficient-samples", "affine fit needs at least 3 levels");
  std::vector<double> ys(s_values.size());
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    const double s = s_values[i];
    if (!(s < 0.0)) fail_validation("invalid-level", "fit levels must be < 0");
    const DomainSpec sub = make_sublevel(base, z0, s);
    if (!contains(sub, t))
      fail_validation("t-outside-sublevel", "t must lie in every sublevel probed");
    ys[i] = std::log(std::abs(kernel_offdiag(sub, t, z0, opt).value));
  }
  const double n = double(s_values.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    sx += s_values[i];
    sy += ys[i];
    sxx += s_values[i] * s_values[i];
    sxy += s_values[i] * ys[i];
  }
  LinearLawFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < s_values.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(fit.intercept + fit.slope * s_values[i] - ys[i]));
  return fit;
}

namespace detail {

// coefficient of the extremal form on the sublevel: e^{2s} sqrt(pi)
// K_s(t,z0)/sqrt(K(z0)); its sublevel L2 norm is sqrt(pi) e^s and its value
// at the pole is c(z0) exactly when the base is a disc
inline Complex ftau_coefficient(const DomainSpec& base, Complex z0, double s, Complex t,
                                const KernelOptions& opt = {}) {
  const DomainSpec sub = make_sublevel(base, z0, s);
  const double k0 = kernel_diag(base, z0, opt).value.real();
  const Complex ks = kernel_offdiag(sub, t, z0, opt).value;
  return std::exp(2.0 * s) * std::sqrt(pi) * ks / std::sqrt(k0);
}

}  // namespace detail

struct FtauCheck {
  double norm = 0.0;           // expected sqrt(pi) e^s
  double value_at_pole = 0.0;  // expected c(z0)
};

inline FtauCheck ftau_check(const DomainSpec& base, Complex z0, double s, int resolution = 256,
                            std::uint64_t seed = 1) {
  validate(base);
  if (!(s < 0.0)) fail_validation("invalid-level", "the extremal form lives on a sublevel");
  if (!equivalent_disc(flatten_punctures(base).clean))
    fail_validation("invalid-domain", "the extremal-form check runs on disc bases");
  const DomainSpec sub = make_sublevel(base, z0, s);
  const QuadratureGrid grid = build_quadrature(sub, resolution, seed);
  const double k0 = kernel_diag(base, z0).value.real();
  const double scale = std::exp(2.0 * s) * std::sqrt(pi) / std::sqrt(k0);

  std::vector<double> chunk(64, 0.0);
  const std::size_t n = grid.nodes.size();
  parallel_for(64, [&](std::size_t c) {
    const std::size_t lo = n * c / 64, hi = n * (c + 1) / 64;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      acc += grid.weights[i] *
             std::norm(scale * kernel_offdiag(sub, grid.nodes[i], z0).value);
    chunk[c] = acc;
  });
  double norm2 = 0.0;
  for (double c : chunk) norm2 += c;

  FtauCheck out;
  out.norm = std::sqrt(norm2);
  out.value_at_pole = (scale * kernel_diag(sub, z0).value).real();
  return out;
}

}  // namespace suita
